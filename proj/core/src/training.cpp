#include "perthro/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "perthro/errors.hpp"
#include "perthro/qubit.hpp"

namespace perthro {

LossValue loss(LossKind kind, const Vec& prediction, const Vec& target) {
    if (prediction.size() != target.size())
        throw std::invalid_argument("loss: prediction/target shape mismatch");
    LossValue out;
    out.grad.assign(prediction.size(), 0.0);
    if (kind == LossKind::mse) {
        const double inv_m = 1.0 / static_cast<double>(prediction.size());
        for (std::size_t k = 0; k < prediction.size(); ++k) {
            const double diff = prediction[k] - target[k];
            out.value += diff * diff * inv_m;
            out.grad[k] = 2.0 * diff * inv_m;
        }
    } else {
        for (std::size_t k = 0; k < prediction.size(); ++k) {
            if (target[k] != 0.0) {
                out.value -= target[k] * std::log(std::max(prediction[k], 1e-300));
                out.grad[k] = -target[k] / std::max(prediction[k], 1e-300);
            }
        }
    }
    return out;
}

namespace {

// Loss value and its gradient w.r.t. the final block output z. For the
// softmax + cross-entropy pair the fused gradient q - t is used; it is the
// exact chain of loss() through the softmax Jacobian.
double loss_grad_wrt_z(const Circuit& circuit, const Vec& z_final, const Vec& target,
                       LossKind kind, Vec& grad_z) {
    if (kind == LossKind::categorical_cross_entropy) {
        if (!std::holds_alternative<SoftmaxHead>(circuit.head))
            throw std::invalid_argument("cross-entropy loss pairs only with a softmax head");
        const Vec q = softmax(z_final);
        const LossValue lv = loss(kind, q, target);
        grad_z.resize(z_final.size());
        for (std::size_t k = 0; k < q.size(); ++k) grad_z[k] = q[k] - target[k];
        return lv.value;
    }
    const LossValue lv = loss(kind, z_final, target);
    grad_z = lv.grad;
    return lv.value;
}

}  // namespace

double backprop_sample(const Circuit& circuit, const Vec& x, const Vec& target, LossKind kind,
                       CircuitGradients& acc) {
    const CircuitForwardResult fwd = circuit_forward(circuit, x);

    Vec upstream;
    const double value = loss_grad_wrt_z(circuit, fwd.z_final, target, kind, upstream);

    for (std::size_t k = circuit.blocks.size(); k-- > 0;) {
        const Vec& input = (k == 0) ? x : fwd.traces[k - 1].output;
        BlockGradients g = backward(fwd.traces[k], circuit.blocks[k], input, upstream);
        auto& a = acc.blocks[k];
        for (std::size_t i = 0; i < g.weights.data().size(); ++i)
            a.weights.data()[i] += g.weights.data()[i];
        for (std::size_t i = 0; i < g.biases.size(); ++i) a.biases[i] += g.biases[i];
        upstream = std::move(g.input);
    }
    return value;
}

void init_circuit(Circuit& circuit, std::uint64_t seed, double init_scale) {
    Rng rng(seed);
    for (auto& block : circuit.blocks) {
        for (double& w : block.weights.data()) w = rng.uniform(-init_scale, init_scale);
        std::fill(block.biases.begin(), block.biases.end(), 0.0);
    }
}

namespace {

CircuitGradients zero_gradients(const Circuit& circuit) {
    CircuitGradients g;
    g.blocks.reserve(circuit.blocks.size());
    for (const auto& block : circuit.blocks) {
        BlockGradients bg;
        bg.weights = Matrix(block.pulse_count(), block.input_dim());
        bg.biases.assign(block.pulse_count(), 0.0);
        g.blocks.push_back(std::move(bg));
    }
    return g;
}

// Flat view over all trainable parameters, blocks in order, weights then
// biases within a block.
std::vector<double*> parameter_view(Circuit& circuit) {
    std::vector<double*> params;
    for (auto& block : circuit.blocks) {
        for (double& w : block.weights.data()) params.push_back(&w);
        for (double& b : block.biases) params.push_back(&b);
    }
    return params;
}

std::vector<double> gradient_flat(const CircuitGradients& grads) {
    std::vector<double> flat;
    for (const auto& bg : grads.blocks) {
        flat.insert(flat.end(), bg.weights.data().begin(), bg.weights.data().end());
        flat.insert(flat.end(), bg.biases.begin(), bg.biases.end());
    }
    return flat;
}

struct OptimizerState {
    Vec momentum;
    Vec adam_m;
    Vec adam_v;
    std::size_t step_count = 0;
};

void apply_step(const Optimizer& opt, double lr, const std::vector<double>& grad,
                std::vector<double*>& params, OptimizerState& state) {
    ++state.step_count;
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Sgd>) {
                for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= lr * grad[i];
            } else if constexpr (std::is_same_v<T, SgdMomentum>) {
                if (state.momentum.empty()) state.momentum.assign(params.size(), 0.0);
                for (std::size_t i = 0; i < params.size(); ++i) {
                    state.momentum[i] = o.beta * state.momentum[i] + grad[i];
                    *params[i] -= lr * state.momentum[i];
                }
            } else {
                if (state.adam_m.empty()) {
                    state.adam_m.assign(params.size(), 0.0);
                    state.adam_v.assign(params.size(), 0.0);
                }
                const auto t = static_cast<double>(state.step_count);
                const double bc1 = 1.0 - std::pow(o.beta1, t);
                const double bc2 = 1.0 - std::pow(o.beta2, t);
                for (std::size_t i = 0; i < params.size(); ++i) {
                    state.adam_m[i] = o.beta1 * state.adam_m[i] + (1.0 - o.beta1) * grad[i];
                    state.adam_v[i] =
                        o.beta2 * state.adam_v[i] + (1.0 - o.beta2) * grad[i] * grad[i];
                    const double m_hat = state.adam_m[i] / bc1;
                    const double v_hat = state.adam_v[i] / bc2;
                    *params[i] -= lr * m_hat / (std::sqrt(v_hat) + o.epsilon);
                }
            }
        },
        opt);
}

double classification_accuracy(const Circuit& circuit, const Dataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec z = circuit_forward(circuit, data.sample(i)).z_final;
        const HeadOutput out = apply_head(circuit, z);
        if (out.prediction == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

TrainReport train(Circuit& circuit, const Dataset& data, LossKind kind, const TrainConfig& cfg) {
    if (data.size() == 0) throw std::invalid_argument("training dataset is empty");
    if (!(cfg.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
    if (cfg.epochs == 0 || cfg.batch_size == 0)
        throw std::invalid_argument("epochs and batch_size must be positive");
    if (data.features.cols() != circuit.input_dim())
        throw std::invalid_argument("dataset feature dimension does not match circuit");
    if (data.targets.cols() != circuit.output_dim())
        throw std::invalid_argument("dataset target dimension does not match circuit output");

    const auto t_start = std::chrono::steady_clock::now();

    Rng master(cfg.seed);
    init_circuit(circuit, master.fork_seed(), cfg.init_scale);

    auto params = parameter_view(circuit);
    OptimizerState state;
    const bool classification = data.is_classification();

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    report.epoch_loss.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng epoch_rng(master.fork_seed());
        shuffle(order, epoch_rng);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            CircuitGradients grads = zero_gradients(circuit);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t i = order[k];
                batch_loss += backprop_sample(circuit, data.sample(i), data.target(i), kind, grads);
            }
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            std::vector<double> flat = gradient_flat(grads);
            for (double& g : flat) g *= inv_batch;
            apply_step(cfg.optimizer, cfg.learning_rate, flat, params, state);
            epoch_loss += batch_loss;
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss))
            throw TrainingError("training diverged: non-finite loss", epoch);
        report.epoch_loss.push_back(epoch_loss);
        if (classification) report.epoch_accuracy.push_back(classification_accuracy(circuit, data));
    }

    report.final_train_loss = report.epoch_loss.back();
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

Dataset with_threshold_targets(const Dataset& data) {
    if (!data.is_classification())
        throw std::invalid_argument("threshold targets need a labeled dataset");
    Dataset out = data;
    out.targets = Matrix(data.size(), 2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] != 0 && data.labels[i] != 1)
            throw std::invalid_argument("threshold targets need binary labels");
        out.targets(i, 0) = data.labels[i] == 0 ? 1.0 : 0.0;
        out.targets(i, 1) = data.labels[i] == 1 ? 1.0 : 0.0;
    }
    return out;
}

Vec noisy_circuit_forward(const Circuit& circuit, const Vec& x, std::size_t shots, Rng& rng) {
    Vec input = x;
    for (const auto& block : circuit.blocks) {
        Vec z = forward(block, input).output;
        for (double& p : z) {
            std::size_t count = 0;
            for (std::size_t s = 0; s < shots; ++s)
                if (rng.bernoulli(p)) ++count;
            p = static_cast<double>(count) / static_cast<double>(shots);
        }
        input = std::move(z);
    }
    return input;
}

double evaluate(const Circuit& circuit, const Dataset& data, Metric metric,
                const ShotNoise& noise) {
    Rng rng(noise.seed);
    auto forward_one = [&](std::size_t i) {
        return noise.shots == 0 ? circuit_forward(circuit, data.sample(i)).z_final
                                : noisy_circuit_forward(circuit, data.sample(i), noise.shots, rng);
    };

    if (metric == Metric::accuracy) {
        if (!data.is_classification())
            throw std::invalid_argument("accuracy metric needs a labeled dataset");
        std::size_t correct = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const HeadOutput out = apply_head(circuit, forward_one(i));
            if (out.prediction == data.labels[i]) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(data.size());
    }

    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec z = forward_one(i);
        const Vec t = data.target(i);
        total += loss(LossKind::mse, z, t).value;
    }
    return total / static_cast<double>(data.size());
}

std::string report_to_csv(const TrainReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "epoch,loss,accuracy\n";
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
        os << e << ',' << report.epoch_loss[e] << ',';
        if (e < report.epoch_accuracy.size()) os << report.epoch_accuracy[e];
        os << '\n';
    }
    return os.str();
}

std::string report_to_json(const TrainReport& report) {
    nlohmann::json j = {
        {"epoch_loss", report.epoch_loss},
        {"epoch_accuracy", report.epoch_accuracy},
        {"final_train_loss", report.final_train_loss},
        {"wall_seconds", report.wall_seconds},
    };
    return j.dump(2) + "\n";
}

}  // namespace perthro
