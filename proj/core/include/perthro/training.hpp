#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "perthro/circuit.hpp"
#include "perthro/dataset.hpp"
#include "perthro/rng.hpp"

namespace perthro {

enum class LossKind { mse, categorical_cross_entropy };

struct LossValue {
    double value = 0.0;
    Vec grad;  // d(value)/d(prediction)
};

/// MSE: mean over output dimensions of (p - t)^2.
/// Cross-entropy: -sum t_i log p_i over probabilities, one-hot targets.
LossValue loss(LossKind kind, const Vec& prediction, const Vec& target);

struct Sgd {};
struct SgdMomentum {
    double beta = 0.9;
};
struct Adam {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};
using Optimizer = std::variant<Sgd, SgdMomentum, Adam>;

struct TrainConfig {
    double learning_rate = 0.05;
    std::size_t epochs = 1000;
    std::size_t batch_size = 16;
    std::uint64_t seed = 7;
    /// Weights drawn uniform in [-init_scale, init_scale]; biases start at 0.
    /// The default 0.5 rad keeps initial prefix sums inside one half-period
    /// of the sine.
    double init_scale = 0.5;
    Optimizer optimizer = Adam{};
};

struct TrainReport {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_accuracy;  // empty for regression
    double final_train_loss = 0.0;
    double wall_seconds = 0.0;
};

/// Per-parameter loss gradients for a full circuit, same shapes as blocks.
struct CircuitGradients {
    std::vector<BlockGradients> blocks;
};

/// End-to-end backprop through all blocks and the head for one sample.
/// Returns the loss value; accumulates gradients into `acc` (summed).
double backprop_sample(const Circuit& circuit, const Vec& x, const Vec& target,
                       LossKind kind, CircuitGradients& acc);

/// Seeded parameter initialization (weights uniform, biases zero).
void init_circuit(Circuit& circuit, std::uint64_t seed, double init_scale);

/// Mini-batch gradient descent. Deterministic for a fixed config: the
/// initialization and every per-epoch shuffle derive from cfg.seed.
/// Throws TrainingError (with the epoch) if the loss leaves the finite range.
TrainReport train(Circuit& circuit, const Dataset& data, LossKind kind,
                  const TrainConfig& cfg);

/// Re-encode a binary-labeled dataset for a threshold-head circuit:
/// label y maps to the target pair (1 - y, y), the regions the two-threshold
/// rule separates.
Dataset with_threshold_targets(const Dataset& data);

enum class Metric { accuracy, mse };

struct ShotNoise {
    std::size_t shots = 0;  // 0 = noiseless
    std::uint64_t seed = 0;
};

/// Accuracy (argmax, or the threshold rule for a threshold head) or MSE.
/// With shots > 0 every block output is replaced by its binomial estimate.
double evaluate(const Circuit& circuit, const Dataset& data, Metric metric,
                const ShotNoise& noise = {});

/// Forward pass with per-pulse binomial readout noise.
Vec noisy_circuit_forward(const Circuit& circuit, const Vec& x, std::size_t shots,
                          Rng& rng);

/// CSV `epoch,loss,accuracy` (accuracy column empty for regression).
std::string report_to_csv(const TrainReport& report);
std::string report_to_json(const TrainReport& report);

}  // namespace perthro
