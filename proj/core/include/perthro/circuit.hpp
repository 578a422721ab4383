#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "perthro/block.hpp"

namespace perthro {

/// XOR-style two-threshold rule: y = 0 iff z1 >= high and z2 <= low.
struct ThresholdHead {
    double tau_low = 0.5;
    double tau_high = 0.5;
};

struct SoftmaxHead {
    std::size_t num_classes = 0;
};

/// Raw z passthrough (regression).
struct IdentityHead {};

using Head = std::variant<ThresholdHead, SoftmaxHead, IdentityHead>;

/// Ordered Perthro blocks with chained dimensions plus a classical head
/// stage. One qubit per block.
struct Circuit {
    std::vector<PerthroBlock> blocks;
    Head head = IdentityHead{};

    Circuit() = default;
    Circuit(std::vector<PerthroBlock> b, Head h);

    std::size_t input_dim() const { return blocks.front().input_dim(); }
    std::size_t output_dim() const { return blocks.back().pulse_count(); }
    std::size_t qubit_count() const { return blocks.size(); }
};

struct HeadOutput {
    /// Class index (softmax), 0/1 (threshold), or unused (-1) for identity.
    int prediction = -1;
    /// Softmax probabilities, or the raw z for an identity head.
    std::optional<Vec> probabilities;
};

struct CircuitForwardResult {
    Vec z_final;
    std::vector<BlockForwardTrace> traces;
};

/// Feed each block's z into the next; keeps every trace for backprop.
CircuitForwardResult circuit_forward(const Circuit& circuit, const Vec& x);

/// Binary decision of the two-threshold rule, inclusive comparisons.
int xor_head(const Vec& z, const ThresholdHead& head = {});

/// Numerically stabilized softmax (max subtraction) with argmax prediction.
HeadOutput softmax_head(const Vec& z);

Vec softmax(const Vec& z);

/// Apply whichever head the circuit carries to a final z vector.
HeadOutput apply_head(const Circuit& circuit, const Vec& z_final);

/// Trainable parameter count: sum over blocks of n*(d+1).
std::size_t count_parameters(const Circuit& circuit);

/// JSON: {blocks:[{n,d,weights,biases}], head:{kind, params}}; lossless.
std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const std::string& text);

}  // namespace perthro
