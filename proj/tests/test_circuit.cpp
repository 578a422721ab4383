#include <doctest.h>

#include <cmath>

#include "perthro/circuit.hpp"
#include "perthro/errors.hpp"
#include "test_helpers.hpp"

using namespace perthro;
using namespace perthro::testing;

namespace {

Circuit random_circuit(Rng& rng, const std::vector<std::size_t>& dims, Head head) {
    std::vector<PerthroBlock> blocks;
    for (std::size_t k = 1; k < dims.size(); ++k)
        blocks.push_back(random_block(rng, dims[k], dims[k - 1]));
    return Circuit(std::move(blocks), std::move(head));
}

}  // namespace

TEST_CASE("circuit_forward chains blocks") {
    SUBCASE("single zero block") {
        Circuit c({PerthroBlock(Matrix(3, 2), Vec(3, 0.0))}, IdentityHead{});
        for (double z : circuit_forward(c, {0.3, 0.8}).z_final) CHECK(z == 0.0);
    }
    SUBCASE("XOR solution circuit delivers (0,1) on x=(1,0)") {
        const Circuit c = xor_solution_circuit();
        const Vec z = circuit_forward(c, {1, 0}).z_final;
        CHECK(std::abs(z[0] - 0.0) <= 1e-12);
        CHECK(std::abs(z[1] - 1.0) <= 1e-12);
    }
    SUBCASE("chained 2->3->2 random circuit stays in [0,1]") {
        Rng rng(31);
        const Circuit c = random_circuit(rng, {2, 3, 2}, IdentityHead{});
        for (double z : circuit_forward(c, {0.1, 0.9}).z_final) {
            CHECK(z >= 0.0);
            CHECK(z <= 1.0);
        }
    }
    SUBCASE("dimension mismatch is a usage error") {
        const Circuit c = xor_solution_circuit();
        CHECK_THROWS_AS(circuit_forward(c, {1.0}), std::invalid_argument);
    }
}

TEST_CASE("circuit_forward equals manual block-by-block composition") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit c = random_circuit(rng, {3, 4, 2, 5}, IdentityHead{});
        const Vec x = random_vec(rng, 3);
        const auto result = circuit_forward(c, x);
        Vec manual = x;
        for (const auto& block : c.blocks) manual = forward(block, manual).output;
        REQUIRE(result.z_final.size() == manual.size());
        for (std::size_t i = 0; i < manual.size(); ++i)
            REQUIRE(std::abs(result.z_final[i] - manual[i]) <= 1e-15);
    }
}

TEST_CASE("xor_head threshold rule, inclusive comparisons") {
    CHECK(xor_head({1.0, 0.0}) == 0);
    CHECK(xor_head({0.0, 1.0}) == 1);
    CHECK(xor_head({0.5, 0.5}) == 0);  // boundary: >= and <= as written
    CHECK(xor_head({0.4, 0.4}) == 1);
    CHECK(xor_head({0.9, 0.6}) == 1);
}

TEST_CASE("xor_head on the solution circuit reproduces the truth table") {
    const Circuit c = xor_solution_circuit();
    const std::vector<std::pair<Vec, int>> table = {
        {{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}};
    for (const auto& [x, y] : table)
        CHECK(apply_head(c, circuit_forward(c, x).z_final).prediction == y);
}

TEST_CASE("softmax head") {
    SUBCASE("symmetric input gives uniform probabilities") {
        const auto out = softmax_head({0.0, 0.0, 0.0});
        for (double p : *out.probabilities) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("argmax prediction") { CHECK(softmax_head({1.0, 0.0, 0.0}).prediction == 0); }
    SUBCASE("probabilities sum to 1") {
        Rng rng(41);
        for (int trial = 0; trial < 50; ++trial) {
            const auto out = softmax_head(random_vec(rng, 1 + rng.index(6), 3.0));
            double sum = 0.0;
            for (double p : *out.probabilities) sum += p;
            REQUIRE(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    SUBCASE("shift invariance at +1000") {
        const Vec z = {0.2, 0.8, 0.5};
        Vec shifted = z;
        for (double& v : shifted) v += 1000.0;
        const Vec a = softmax(z), b = softmax(shifted);
        for (std::size_t i = 0; i < z.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-12);
    }
}

TEST_CASE("count_parameters sums n*(d+1)") {
    CHECK(count_parameters(xor_solution_circuit()) == 6);
}

TEST_CASE("count_parameters on the experiment architectures") {
    Rng rng(47);
    // 4 -> 6 -> 12 -> 3: 30 + 84 + 39 = 153 by the formula.
    const Circuit iris_like = random_circuit(rng, {4, 6, 12, 3}, SoftmaxHead{3});
    CHECK(count_parameters(iris_like) == 153);
    CHECK(iris_like.qubit_count() == 3);
    // One pulse on 12 inputs: 13.
    const Circuit single = random_circuit(rng, {12, 1}, IdentityHead{});
    CHECK(count_parameters(single) == 13);
    CHECK(single.qubit_count() == 1);
}

TEST_CASE("circuit construction validates head/block compatibility") {
    Rng rng(53);
    CHECK_THROWS_AS(Circuit({random_block(rng, 3, 2)}, ThresholdHead{}), std::invalid_argument);
    CHECK_THROWS_AS(Circuit({random_block(rng, 3, 2)}, SoftmaxHead{4}), std::invalid_argument);
    std::vector<PerthroBlock> mismatched;
    mismatched.push_back(random_block(rng, 3, 2));
    mismatched.push_back(random_block(rng, 2, 4));
    CHECK_THROWS_AS(Circuit(std::move(mismatched), IdentityHead{}), std::invalid_argument);
}

TEST_CASE("circuit JSON round-trips losslessly") {
    Rng rng(59);
    for (Head head : std::vector<Head>{ThresholdHead{}, SoftmaxHead{3}, IdentityHead{}}) {
        const bool threshold = std::holds_alternative<ThresholdHead>(head);
        const bool softmax_kind = std::holds_alternative<SoftmaxHead>(head);
        const std::vector<std::size_t> dims =
            threshold ? std::vector<std::size_t>{2, 2}
                      : (softmax_kind ? std::vector<std::size_t>{4, 3} : std::vector<std::size_t>{3, 5, 1});
        const Circuit c = random_circuit(rng, dims, head);
        const std::string first = circuit_to_json(c);
        const Circuit parsed = circuit_from_json(first);
        CHECK(circuit_to_json(parsed) == first);
        CHECK(parsed.head.index() == c.head.index());
    }
    CHECK_THROWS_AS(circuit_from_json("{\"blocks\":[]}"), ValidationError);
}
