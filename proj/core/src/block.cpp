#include "perthro/block.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "perthro/errors.hpp"
#include "perthro/qubit.hpp"

namespace perthro {

namespace {

constexpr double kPi = std::numbers::pi;

void check_input_dim(const PerthroBlock& block, const Vec& x) {
    if (x.size() != block.input_dim())
        throw std::invalid_argument("input dimension does not match block weights");
}

}  // namespace

PerthroBlock::PerthroBlock(Matrix w, Vec b) : weights(std::move(w)), biases(std::move(b)) {
    if (weights.rows() == 0 || weights.cols() == 0)
        throw std::invalid_argument("block needs n >= 1 pulses and d >= 1 inputs");
    if (biases.size() != weights.rows())
        throw std::invalid_argument("bias length must equal pulse count");
    for (double v : weights.data())
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite weight");
    for (double v : biases)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite bias");
}

Vec modulate_amplitudes(const PerthroBlock& block, const Vec& x) {
    check_input_dim(block, x);
    const std::size_t n = block.pulse_count();
    Vec amps(n);
    for (std::size_t i = 0; i < n; ++i)
        amps[i] = (2.0 / kPi) * (dot(block.weights.row(i), x) + block.biases[i]);
    return amps;
}

BlockForwardTrace forward(const PerthroBlock& block, const Vec& x) {
    check_input_dim(block, x);
    const std::size_t n = block.pulse_count();

    BlockForwardTrace trace;
    trace.partial_sums.resize(n);
    trace.rho.resize(n);
    trace.output.resize(n);

    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trace.rho[i] = running;
        running += dot(block.weights.row(i), x) + block.biases[i];
        trace.partial_sums[i] = running;
        const double s = std::sin(running);
        trace.output[i] = s * s;
    }
    return trace;
}

Vec forward_via_pulse_sim(const PerthroBlock& block, const Vec& x) {
    const Vec amps = modulate_amplitudes(block, x);

    QubitState qubit = QubitState::ground();
    Vec z(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        qubit = apply_pulse(qubit, amps[i]);
        z[i] = qubit.prob_excited();
    }
    return z;
}

BlockGradients backward(const BlockForwardTrace& trace, const PerthroBlock& block,
                        const Vec& x, const Vec& upstream_grad) {
    check_input_dim(block, x);
    const std::size_t n = block.pulse_count();
    const std::size_t d = block.input_dim();
    if (trace.partial_sums.size() != n || trace.output.size() != n)
        throw std::invalid_argument("trace does not match block shape");
    if (upstream_grad.size() != n)
        throw std::invalid_argument("upstream gradient length must equal pulse count");

    // t_j = sum_{i >= j} upstream[i] * sin(2 S_i): the total sensitivity of
    // the loss to the j-th pulse's argument, via every later output.
    Vec suffix(n);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        acc += upstream_grad[i] * std::sin(2.0 * trace.partial_sums[i]);
        suffix[i] = acc;
    }

    BlockGradients grads;
    grads.weights = Matrix(n, d);
    grads.biases = suffix;  // dS_i/db_j = [j <= i]
    grads.input.assign(d, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto w_row = block.weights.row(j);
        auto g_row = grads.weights.row(j);
        for (std::size_t k = 0; k < d; ++k) {
            g_row[k] = suffix[j] * x[k];
            grads.input[k] += suffix[j] * w_row[k];
        }
    }
    return grads;
}

std::string block_to_json(const PerthroBlock& block) {
    nlohmann::json j = {
        {"n", block.pulse_count()},
        {"d", block.input_dim()},
        {"weights", block.weights.data()},
        {"biases", block.biases},
    };
    return j.dump(2) + "\n";
}

PerthroBlock block_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("block JSON parse failed: ") + e.what());
    }
    try {
        const auto n = j.at("n").get<std::size_t>();
        const auto d = j.at("d").get<std::size_t>();
        auto weights = j.at("weights").get<Vec>();
        auto biases = j.at("biases").get<Vec>();
        if (weights.size() != n * d)
            throw ValidationError("block JSON: weights size does not match n*d");
        if (biases.size() != n)
            throw ValidationError("block JSON: biases size does not match n");
        return PerthroBlock(Matrix(n, d, std::move(weights)), std::move(biases));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("block JSON missing field: ") + e.what());
    }
}

}  // namespace perthro
