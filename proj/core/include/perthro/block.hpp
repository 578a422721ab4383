#pragma once

#include <string>

#include "perthro/linalg.hpp"

namespace perthro {

/// Single-qubit feed-forward block: one pulse train of n amplitude-modulated
/// pulses driving one qubit, read out after every pulse. Row i of the weight
/// matrix and entry i of the bias vector shape the i-th pulse.
struct PerthroBlock {
    Matrix weights;  // n x d
    Vec biases;      // length n

    PerthroBlock() = default;
    PerthroBlock(Matrix w, Vec b);

    std::size_t pulse_count() const { return weights.rows(); }
    std::size_t input_dim() const { return weights.cols(); }
};

/// Forward-pass record kept for the backward pass.
///
/// partial_sums[i] = sum_{j<=i} (<w_j, x> + b_j); the cumulative phase
/// rho[i] = partial_sums[i-1] (rho[0] = 0); output[i] = sin^2(partial_sums[i]).
struct BlockForwardTrace {
    Vec partial_sums;
    Vec rho;
    Vec output;
};

/// Raw per-pulse amplitudes before superposition accumulation:
/// A_i = (2/pi) * (<w_i, x> + b_i).
Vec modulate_amplitudes(const PerthroBlock& block, const Vec& x);

/// Closed-form forward pass through the prefix sums.
BlockForwardTrace forward(const PerthroBlock& block, const Vec& x);

/// Same map evaluated on the qubit simulator: pulses applied sequentially to
/// |0>, P(|1>) read after each pulse. Agrees with forward() to 1e-12.
Vec forward_via_pulse_sim(const PerthroBlock& block, const Vec& x);

struct BlockGradients {
    Matrix weights;  // n x d
    Vec biases;      // length n
    Vec input;       // length d
};

/// Reverse-mode gradients of the block outputs contracted with upstream_grad.
///
/// dz_i/dS_i = sin(2 S_i) and S_i depends on every (w_j, b_j) with j <= i,
/// so each parameter's gradient is a suffix sum of upstream[i]*sin(2 S_i).
/// Computed with one reverse cumulative sum: O(n*d), not O(n^2*d).
BlockGradients backward(const BlockForwardTrace& trace, const PerthroBlock& block,
                        const Vec& x, const Vec& upstream_grad);

/// JSON: {n, d, weights: row-major array, biases: array}.
std::string block_to_json(const PerthroBlock& block);
PerthroBlock block_from_json(const std::string& text);

}  // namespace perthro
