// Microbenchmarks for the hot paths: block forward/backward, full-circuit
// forward, schedule compilation + replay, and the pulse-level simulator.

#include <benchmark/benchmark.h>

#include "perthro/block.hpp"
#include "perthro/circuit.hpp"
#include "perthro/rng.hpp"
#include "perthro/schedule.hpp"
#include "perthro/training.hpp"

using namespace perthro;

namespace {

PerthroBlock make_block(Rng& rng, std::size_t n, std::size_t d) {
    Matrix w(n, d);
    for (double& v : w.data()) v = rng.uniform(-1.5, 1.5);
    Vec b(n);
    for (double& v : b) v = rng.uniform(-1.5, 1.5);
    return PerthroBlock(std::move(w), std::move(b));
}

Vec make_input(Rng& rng, std::size_t d) {
    Vec x(d);
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    return x;
}

Circuit make_circuit(Rng& rng, std::initializer_list<std::size_t> dims) {
    std::vector<std::size_t> ds(dims);
    std::vector<PerthroBlock> blocks;
    for (std::size_t k = 1; k < ds.size(); ++k)
        blocks.push_back(make_block(rng, ds[k], ds[k - 1]));
    return Circuit(std::move(blocks), IdentityHead{});
}

void BM_BlockForward(benchmark::State& state) {
    Rng rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const PerthroBlock block = make_block(rng, n, n);
    const Vec x = make_input(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(forward(block, x));
}
BENCHMARK(BM_BlockForward)->Arg(4)->Arg(16)->Arg(64);

void BM_BlockBackward(benchmark::State& state) {
    Rng rng(2);
    const auto n = static_cast<std::size_t>(state.range(0));
    const PerthroBlock block = make_block(rng, n, n);
    const Vec x = make_input(rng, n);
    const BlockForwardTrace trace = forward(block, x);
    const Vec upstream(n, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(backward(trace, block, x, upstream));
}
BENCHMARK(BM_BlockBackward)->Arg(4)->Arg(16)->Arg(64);

void BM_CircuitForwardIrisShape(benchmark::State& state) {
    Rng rng(3);
    const Circuit circuit = make_circuit(rng, {4, 6, 12, 3});
    const Vec x = make_input(rng, 4);
    for (auto _ : state) benchmark::DoNotOptimize(circuit_forward(circuit, x));
}
BENCHMARK(BM_CircuitForwardIrisShape);

void BM_BackpropSample(benchmark::State& state) {
    Rng rng(4);
    const Circuit circuit = make_circuit(rng, {4, 6, 12, 3});
    const Vec x = make_input(rng, 4);
    const Vec target = {0.2, 0.5, 0.3};
    for (auto _ : state) {
        CircuitGradients grads;
        for (const auto& block : circuit.blocks) {
            BlockGradients bg;
            bg.weights = Matrix(block.pulse_count(), block.input_dim());
            bg.biases.assign(block.pulse_count(), 0.0);
            grads.blocks.push_back(std::move(bg));
        }
        benchmark::DoNotOptimize(
            backprop_sample(circuit, x, target, LossKind::mse, grads));
    }
}
BENCHMARK(BM_BackpropSample);

void BM_CompileSchedule(benchmark::State& state) {
    Rng rng(5);
    const Circuit circuit = make_circuit(rng, {4, 6, 12, 3});
    const Vec x = make_input(rng, 4);
    CalibrationResult cal;
    cal.pi_amplitude = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(compile_schedule(circuit, x, cal));
}
BENCHMARK(BM_CompileSchedule);

void BM_SimulateSchedule(benchmark::State& state) {
    Rng rng(6);
    const Circuit circuit = make_circuit(rng, {4, 6, 12, 3});
    const Vec x = make_input(rng, 4);
    CalibrationResult cal;
    cal.pi_amplitude = 1.0;
    const PulseSchedule schedule = compile_schedule(circuit, x, cal);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_schedule(schedule));
}
BENCHMARK(BM_SimulateSchedule);

void BM_PulseSimForward(benchmark::State& state) {
    Rng rng(7);
    const auto n = static_cast<std::size_t>(state.range(0));
    const PerthroBlock block = make_block(rng, n, n);
    const Vec x = make_input(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(forward_via_pulse_sim(block, x));
}
BENCHMARK(BM_PulseSimForward)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
