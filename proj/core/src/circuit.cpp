#include "perthro/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "perthro/errors.hpp"

namespace perthro {

Circuit::Circuit(std::vector<PerthroBlock> b, Head h) : blocks(std::move(b)), head(std::move(h)) {
    if (blocks.empty()) throw std::invalid_argument("circuit needs at least one block");
    for (std::size_t k = 1; k < blocks.size(); ++k)
        if (blocks[k].input_dim() != blocks[k - 1].pulse_count())
            throw std::invalid_argument("block dimensions do not chain");
    if (const auto* sm = std::get_if<SoftmaxHead>(&head)) {
        if (sm->num_classes != blocks.back().pulse_count())
            throw std::invalid_argument("softmax head requires final block n == num_classes");
    } else if (std::holds_alternative<ThresholdHead>(head)) {
        if (blocks.back().pulse_count() != 2)
            throw std::invalid_argument("threshold head requires final block n == 2");
    }
}

CircuitForwardResult circuit_forward(const Circuit& circuit, const Vec& x) {
    CircuitForwardResult result;
    result.traces.reserve(circuit.blocks.size());
    const Vec* input = &x;
    for (const auto& block : circuit.blocks) {
        result.traces.push_back(forward(block, *input));
        input = &result.traces.back().output;
    }
    result.z_final = *input;
    return result;
}

int xor_head(const Vec& z, const ThresholdHead& head) {
    if (z.size() != 2) throw std::invalid_argument("xor_head expects a length-2 vector");
    return (z[0] >= head.tau_high && z[1] <= head.tau_low) ? 0 : 1;
}

Vec softmax(const Vec& z) {
    const double m = *std::max_element(z.begin(), z.end());
    Vec p(z.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        p[k] = std::exp(z[k] - m);
        sum += p[k];
    }
    for (double& v : p) v /= sum;
    return p;
}

HeadOutput softmax_head(const Vec& z) {
    if (z.empty()) throw std::invalid_argument("softmax_head expects a non-empty vector");
    for (double v : z)
        if (!std::isfinite(v)) throw std::invalid_argument("softmax_head: non-finite input");
    HeadOutput out;
    out.probabilities = softmax(z);
    out.prediction = static_cast<int>(
        std::max_element(out.probabilities->begin(), out.probabilities->end()) -
        out.probabilities->begin());
    return out;
}

HeadOutput apply_head(const Circuit& circuit, const Vec& z_final) {
    return std::visit(
        [&](const auto& head) -> HeadOutput {
            using T = std::decay_t<decltype(head)>;
            if constexpr (std::is_same_v<T, ThresholdHead>) {
                HeadOutput out;
                out.prediction = xor_head(z_final, head);
                return out;
            } else if constexpr (std::is_same_v<T, SoftmaxHead>) {
                return softmax_head(z_final);
            } else {
                HeadOutput out;
                out.probabilities = z_final;
                return out;
            }
        },
        circuit.head);
}

std::size_t count_parameters(const Circuit& circuit) {
    std::size_t total = 0;
    for (const auto& block : circuit.blocks)
        total += block.pulse_count() * (block.input_dim() + 1);
    return total;
}

namespace {

nlohmann::json head_to_json(const Head& head) {
    return std::visit(
        [](const auto& h) -> nlohmann::json {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, ThresholdHead>) {
                return {{"kind", "threshold"},
                        {"params", {{"tau_low", h.tau_low}, {"tau_high", h.tau_high}}}};
            } else if constexpr (std::is_same_v<T, SoftmaxHead>) {
                return {{"kind", "softmax"}, {"params", {{"num_classes", h.num_classes}}}};
            } else {
                return {{"kind", "identity"}, {"params", nlohmann::json::object()}};
            }
        },
        head);
}

Head head_from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "threshold") {
        ThresholdHead h;
        h.tau_low = j.at("params").at("tau_low").get<double>();
        h.tau_high = j.at("params").at("tau_high").get<double>();
        return h;
    }
    if (kind == "softmax") {
        SoftmaxHead h;
        h.num_classes = j.at("params").at("num_classes").get<std::size_t>();
        return h;
    }
    if (kind == "identity") return IdentityHead{};
    throw ValidationError("unknown head kind: " + kind);
}

}  // namespace

std::string circuit_to_json(const Circuit& circuit) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : circuit.blocks)
        blocks.push_back({{"n", b.pulse_count()},
                          {"d", b.input_dim()},
                          {"weights", b.weights.data()},
                          {"biases", b.biases}});
    nlohmann::json j = {{"blocks", blocks}, {"head", head_to_json(circuit.head)}};
    return j.dump(2) + "\n";
}

Circuit circuit_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("circuit JSON parse failed: ") + e.what());
    }
    try {
        std::vector<PerthroBlock> blocks;
        for (const auto& jb : j.at("blocks")) {
            const auto n = jb.at("n").get<std::size_t>();
            const auto d = jb.at("d").get<std::size_t>();
            auto weights = jb.at("weights").get<Vec>();
            auto biases = jb.at("biases").get<Vec>();
            if (weights.size() != n * d || biases.size() != n)
                throw ValidationError("circuit JSON: block shape mismatch");
            blocks.emplace_back(Matrix(n, d, std::move(weights)), std::move(biases));
        }
        return Circuit(std::move(blocks), head_from_json(j.at("head")));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("circuit JSON malformed: ") + e.what());
    }
}

}  // namespace perthro
