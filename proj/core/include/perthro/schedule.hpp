#pragma once

#include <string>
#include <vector>

#include "perthro/calibrate.hpp"
#include "perthro/circuit.hpp"
#include "perthro/pulse.hpp"

namespace perthro {

/// One hardware train: at most four pulses, then a reset. The first pulse of
/// a train after a reset has the previous trains' accumulated amplitude
/// (mod 2, the period of sin^2((pi/2)A)) folded into it so measured
/// probabilities are unchanged. Both the folded amplitude and the raw carry
/// are recorded.
struct ScheduledTrain {
    Vec amplitudes;      // 1..4 entries, each wrapped into [0, 2)
    Vec raw_amplitudes;  // pre-fold, pre-wrap values, same length
    double carry_offset_in = 0.0;
    bool reset_after = false;
};

struct ScheduledBlock {
    std::size_t qubit_index = 0;
    std::vector<ScheduledTrain> trains;
};

struct PulseSchedule {
    int version = 1;
    std::string calibration_ref;
    GaussianPulse pulse_template;
    double amplitude_scale = 1.0;  // pi-amplitude from calibration
    std::vector<ScheduledBlock> blocks;
};

inline constexpr std::size_t kMaxPulsesPerTrain = 4;

/// Compile a circuit's pulse program for one input sample. Amplitudes are
/// input-dependent (they contain <w, x>), so each sample compiles to its own
/// schedule. Throws std::invalid_argument if calibration lacks a positive
/// pi-amplitude.
PulseSchedule compile_schedule(const Circuit& circuit, const Vec& x,
                               const CalibrationResult& calibration,
                               const std::string& calibration_ref = "");

/// Replay a schedule on the qubit simulator, honoring resets and carry
/// offsets; returns one z vector per block. Throws ValidationError on a
/// malformed schedule (oversized train, out-of-range amplitude,
/// inconsistent carry chain).
std::vector<Vec> simulate_schedule(const PulseSchedule& schedule);

std::string schedule_to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const std::string& text);

/// Wrap into [0, 2), the period of sin^2((pi/2) A).
double wrap_amplitude(double a);

}  // namespace perthro
