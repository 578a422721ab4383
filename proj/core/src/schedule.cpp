#include "perthro/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "perthro/errors.hpp"
#include "perthro/qubit.hpp"

namespace perthro {

double wrap_amplitude(double a) {
    double w = std::fmod(a, 2.0);
    if (w < 0.0) w += 2.0;
    return w;
}

PulseSchedule compile_schedule(const Circuit& circuit, const Vec& x,
                               const CalibrationResult& calibration,
                               const std::string& calibration_ref) {
    if (!(calibration.pi_amplitude > 0.0))
        throw std::invalid_argument("compile_schedule: calibration lacks a pi-amplitude");
    if (x.size() != circuit.input_dim())
        throw std::invalid_argument("compile_schedule: input dimension mismatch");

    // Block k's pulse amplitudes depend on its own input, i.e. the previous
    // block's measured z.
    const CircuitForwardResult fwd = circuit_forward(circuit, x);

    PulseSchedule schedule;
    schedule.calibration_ref = calibration_ref;
    schedule.amplitude_scale = calibration.pi_amplitude;
    schedule.pulse_template.amplitude = calibration.pi_amplitude;

    for (std::size_t k = 0; k < circuit.blocks.size(); ++k) {
        const Vec& input = (k == 0) ? x : fwd.traces[k - 1].output;
        const Vec raw = modulate_amplitudes(circuit.blocks[k], input);

        ScheduledBlock block;
        block.qubit_index = k;
        double carry = 0.0;
        for (std::size_t start = 0; start < raw.size(); start += kMaxPulsesPerTrain) {
            const std::size_t end = std::min(start + kMaxPulsesPerTrain, raw.size());
            ScheduledTrain train;
            train.carry_offset_in = start == 0 ? 0.0 : carry;
            train.raw_amplitudes.assign(raw.begin() + static_cast<std::ptrdiff_t>(start),
                                        raw.begin() + static_cast<std::ptrdiff_t>(end));
            train.amplitudes.resize(train.raw_amplitudes.size());
            for (std::size_t i = 0; i < train.raw_amplitudes.size(); ++i) {
                double a = train.raw_amplitudes[i];
                if (i == 0) a += train.carry_offset_in;  // fold carry into first pulse
                train.amplitudes[i] = wrap_amplitude(a);
                carry = wrap_amplitude(carry + train.raw_amplitudes[i]);
            }
            train.reset_after = end < raw.size();
            block.trains.push_back(std::move(train));
        }
        schedule.blocks.push_back(std::move(block));
    }
    return schedule;
}

std::vector<Vec> simulate_schedule(const PulseSchedule& schedule) {
    std::vector<Vec> outputs;
    outputs.reserve(schedule.blocks.size());

    for (const auto& block : schedule.blocks) {
        Vec z;
        double expected_carry = 0.0;
        for (std::size_t t = 0; t < block.trains.size(); ++t) {
            const auto& train = block.trains[t];
            if (train.amplitudes.empty() || train.amplitudes.size() > kMaxPulsesPerTrain)
                throw ValidationError("train must carry 1 to 4 pulses");
            if (train.amplitudes.size() != train.raw_amplitudes.size())
                throw ValidationError("amplitudes and raw_amplitudes disagree in length");

            const double declared_carry = t == 0 ? 0.0 : train.carry_offset_in;
            if (std::abs(wrap_amplitude(declared_carry) - expected_carry) > 1e-9 &&
                std::abs(wrap_amplitude(declared_carry) - expected_carry) < 2.0 - 1e-9)
                throw ValidationError("carry offset does not match accumulated amplitudes");

            QubitState qubit = QubitState::ground();
            for (std::size_t i = 0; i < train.amplitudes.size(); ++i) {
                const double a = train.amplitudes[i];
                if (!(a >= 0.0 && a < 2.0))
                    throw ValidationError("exported amplitude outside [0, 2)");
                const double expected = wrap_amplitude(train.raw_amplitudes[i] +
                                                       (i == 0 ? train.carry_offset_in : 0.0));
                if (std::abs(a - expected) > 1e-9 && std::abs(a - expected) < 2.0 - 1e-9)
                    throw ValidationError("folded amplitude disagrees with raw + carry");
                qubit = apply_pulse(qubit, a);
                z.push_back(qubit.prob_excited());
                expected_carry = wrap_amplitude(expected_carry + train.raw_amplitudes[i]);
            }
        }
        outputs.push_back(std::move(z));
    }
    return outputs;
}

std::string schedule_to_json(const PulseSchedule& schedule) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& block : schedule.blocks) {
        nlohmann::json trains = nlohmann::json::array();
        for (const auto& train : block.trains)
            trains.push_back({{"amplitudes", train.amplitudes},
                              {"raw_amplitudes", train.raw_amplitudes},
                              {"carry_offset_in", train.carry_offset_in},
                              {"reset_after", train.reset_after}});
        blocks.push_back({{"qubit_index", block.qubit_index}, {"trains", trains}});
    }
    nlohmann::json j = {
        {"version", schedule.version},
        {"calibration_ref", schedule.calibration_ref},
        {"pulse_template",
         {{"amplitude_scale", schedule.amplitude_scale},
          {"width_s", schedule.pulse_template.width},
          {"center_s", schedule.pulse_template.duration_center}}},
        {"blocks", blocks},
    };
    return j.dump(2) + "\n";
}

PulseSchedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("schedule JSON parse failed: ") + e.what());
    }
    PulseSchedule schedule;
    try {
        schedule.version = j.at("version").get<int>();
        schedule.calibration_ref = j.at("calibration_ref").get<std::string>();
        schedule.amplitude_scale = j.at("pulse_template").at("amplitude_scale").get<double>();
        schedule.pulse_template.amplitude = schedule.amplitude_scale;
        schedule.pulse_template.width = j.at("pulse_template").at("width_s").get<double>();
        schedule.pulse_template.duration_center =
            j.at("pulse_template").at("center_s").get<double>();
        for (const auto& jb : j.at("blocks")) {
            ScheduledBlock block;
            block.qubit_index = jb.at("qubit_index").get<std::size_t>();
            for (const auto& jt : jb.at("trains")) {
                ScheduledTrain train;
                train.amplitudes = jt.at("amplitudes").get<Vec>();
                train.raw_amplitudes = jt.at("raw_amplitudes").get<Vec>();
                train.carry_offset_in = jt.at("carry_offset_in").get<double>();
                train.reset_after = jt.at("reset_after").get<bool>();
                block.trains.push_back(std::move(train));
            }
            schedule.blocks.push_back(std::move(block));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("schedule JSON malformed: ") + e.what());
    }
    return schedule;
}

}  // namespace perthro
