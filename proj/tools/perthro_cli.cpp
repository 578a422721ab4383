// perthro: command-line front end for the Perthro feed-forward block
// simulator. Subcommands: calibrate, run, export-schedule, verify-schedule,
// plot. Every run directory receives a manifest (config hash + seed) that
// reproduces the run bit-for-bit.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perthro/calibrate.hpp"
#include "perthro/circuit.hpp"
#include "perthro/dataset.hpp"
#include "perthro/errors.hpp"
#include "perthro/schedule.hpp"
#include "perthro/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perthro;

namespace {

constexpr const char* kVersion = "1.0.0";

// Distinct exit codes per failure class.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;
constexpr int kExitVerification = 5;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(std::string(what) + " file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

Vec parse_vector(const std::string& text) {
    Vec out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("--input: not a number: '" + cell + "'");
        }
    }
    if (out.empty()) throw ConfigError("--input: empty vector");
    return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration: flags > config file > per-experiment defaults.

struct ExperimentConfig {
    std::string experiment;  // xor | iris | airfoil
    std::string data_path;
    std::string out_dir;
    double learning_rate = 0.0;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    double init_scale = 0.5;
    std::string optimizer = "adam";  // sgd | momentum | adam
    std::uint64_t seed = 7;
    std::size_t shots = 1024;
    double train_fraction = 0.8;
};

ExperimentConfig defaults_for(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.out_dir = "out/" + experiment;
    if (experiment == "xor") {
        c.learning_rate = 0.3;
        c.epochs = 5000;
        c.batch_size = 4;
    } else if (experiment == "iris") {
        c.data_path = "data/iris.csv";
        c.learning_rate = 0.001;
        c.epochs = 40;
        c.batch_size = 16;
    } else if (experiment == "airfoil") {
        c.data_path = "data/airfoil_self_noise.dat";
        c.learning_rate = 0.003;
        c.epochs = 600;
        c.batch_size = 32;
    } else {
        throw ConfigError("unknown experiment '" + experiment +
                          "' (expected xor, iris, or airfoil)");
    }
    return c;
}

Optimizer make_optimizer(const std::string& name) {
    if (name == "sgd") return Sgd{};
    if (name == "momentum") return SgdMomentum{};
    if (name == "adam") return Adam{};
    throw ConfigError("optimizer must be sgd, momentum, or adam; got '" + name + "'");
}

// Canonical serialization of the effective config; hashed into the manifest.
json config_to_json(const ExperimentConfig& c) {
    return json{{"experiment", c.experiment},
                {"data_path", c.data_path},
                {"out_dir", c.out_dir},
                {"learning_rate", c.learning_rate},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"init_scale", c.init_scale},
                {"optimizer", c.optimizer},
                {"seed", c.seed},
                {"shots", c.shots},
                {"train_fraction", c.train_fraction}};
}

// Apply a JSON config file underneath any flags the user passed. `passed`
// reports whether a given flag appeared on the command line.
template <typename Passed>
void apply_config_file(ExperimentConfig& c, const std::string& path, Passed passed) {
    json j;
    try {
        j = json::parse(read_file(path, "config"));
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    auto take = [&](const char* key, auto& field) {
        if (j.contains(key) && !passed(key)) {
            try {
                field = j.at(key).get<std::decay_t<decltype(field)>>();
            } catch (const json::exception& e) {
                throw ConfigError("config field '" + std::string(key) + "': " + e.what());
            }
        }
    };
    take("data_path", c.data_path);
    take("out_dir", c.out_dir);
    take("learning_rate", c.learning_rate);
    take("epochs", c.epochs);
    take("batch_size", c.batch_size);
    take("init_scale", c.init_scale);
    take("optimizer", c.optimizer);
    take("seed", c.seed);
    take("shots", c.shots);
    take("train_fraction", c.train_fraction);
    static const std::vector<std::string> known = {
        "experiment", "data_path", "out_dir",   "learning_rate",
        "epochs",     "batch_size", "init_scale", "optimizer",
        "seed",       "shots",      "train_fraction"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("config " + path + ": unknown field '" + it.key() + "'");
    }
}

TrainConfig to_train_config(const ExperimentConfig& c) {
    TrainConfig t;
    t.learning_rate = c.learning_rate;
    t.epochs = c.epochs;
    t.batch_size = c.batch_size;
    t.seed = c.seed;
    t.init_scale = c.init_scale;
    t.optimizer = make_optimizer(c.optimizer);
    return t;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const ExperimentConfig& c, const json& dataset_info) {
    json effective = config_to_json(c);
    json manifest{{"version", kVersion},
                  {"config", effective},
                  {"config_hash_fnv1a", hash_hex(fnv1a_bytes(effective.dump()))},
                  {"seed", c.seed},
                  {"dataset", dataset_info}};
    write_file(fs::path(c.out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Circuit builders (one qubit per block; widths follow the block diagrams).

Circuit xor_circuit_shape() {
    std::vector<PerthroBlock> blocks;
    blocks.emplace_back(Matrix(2, 2), Vec(2, 0.0));
    return Circuit(std::move(blocks), ThresholdHead{});
}

Circuit iris_circuit_shape() {
    std::vector<PerthroBlock> blocks;
    blocks.emplace_back(Matrix(6, 4), Vec(6, 0.0));
    blocks.emplace_back(Matrix(12, 6), Vec(12, 0.0));
    blocks.emplace_back(Matrix(3, 12), Vec(3, 0.0));
    return Circuit(std::move(blocks), SoftmaxHead{3});
}

Circuit airfoil_circuit_shape() {
    std::vector<PerthroBlock> blocks;
    blocks.emplace_back(Matrix(6, 5), Vec(6, 0.0));
    blocks.emplace_back(Matrix(12, 6), Vec(12, 0.0));
    blocks.emplace_back(Matrix(1, 12), Vec(1, 0.0));
    return Circuit(std::move(blocks), IdentityHead{});
}

// ---------------------------------------------------------------------------
// run subcommand

void write_common_artifacts(const ExperimentConfig& c, const Circuit& circuit,
                            const TrainReport& report, const json& metrics) {
    fs::path out(c.out_dir);
    write_file(out / "training_curve.csv", report_to_csv(report));
    write_file(out / "trained_circuit.json", circuit_to_json(circuit));
    // metrics.json must be byte-identical across reruns: sorted keys (nlohmann
    // default), no wall-clock fields.
    write_file(out / "metrics.json", metrics.dump(2) + "\n");
}

void run_xor(const ExperimentConfig& c) {
    Dataset raw = xor_dataset();
    Dataset data = with_threshold_targets(raw);
    Circuit circuit = xor_circuit_shape();
    TrainReport report = train(circuit, data, LossKind::mse, to_train_config(c));

    double noiseless = evaluate(circuit, data, Metric::accuracy);
    double shot_acc = 0.0;

    // Scatter of (P1, P2, truth) over shot-sampled trials: cycle the four
    // truth-table rows and re-sample each block output binomially.
    const std::size_t trials = 1024;
    Rng rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
    std::ostringstream scatter;
    scatter << "p1,p2,truth\n";
    std::size_t correct = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t row = t % raw.size();
        Vec z = noisy_circuit_forward(circuit, raw.sample(row), c.shots, rng);
        int truth = raw.labels[row];
        scatter << z[0] << ',' << z[1] << ',' << truth << '\n';
        if (xor_head(z) == truth) ++correct;
    }
    shot_acc = static_cast<double>(correct) / static_cast<double>(trials);
    write_file(fs::path(c.out_dir) / "xor_scatter.csv", scatter.str());

    json metrics{{"experiment", "xor"},
                 {"noiseless_accuracy", noiseless},
                 {"shot_accuracy", shot_acc},
                 {"shots", c.shots},
                 {"trials", trials},
                 {"final_train_loss", report.final_train_loss},
                 {"epochs", report.epoch_loss.size()},
                 {"parameters", count_parameters(circuit)}};
    write_common_artifacts(c, circuit, report, metrics);
    write_manifest(c, json{{"source", "builtin xor truth table"}, {"rows", raw.size()}});
    std::cout << "xor: noiseless accuracy " << noiseless << ", shot accuracy "
              << shot_acc << "\n";
}

void run_iris(const ExperimentConfig& c) {
    Dataset iris = load_iris(c.data_path);
    auto sp = split(iris, c.train_fraction, c.seed);
    NormStats stats = fit_min_max(sp.train);
    Dataset train_ds = apply_min_max(sp.train, stats);
    Dataset test_ds = apply_min_max(sp.test, stats);

    Circuit circuit = iris_circuit_shape();
    TrainReport report =
        train(circuit, train_ds, LossKind::categorical_cross_entropy, to_train_config(c));

    double train_acc = evaluate(circuit, train_ds, Metric::accuracy);
    double test_acc = evaluate(circuit, test_ds, Metric::accuracy);
    double shot_acc =
        evaluate(circuit, test_ds, Metric::accuracy, ShotNoise{c.shots, c.seed});

    json metrics{{"experiment", "iris"},
                 {"train_accuracy", train_acc},
                 {"test_accuracy", test_acc},
                 {"shot_test_accuracy", shot_acc},
                 {"shots", c.shots},
                 {"final_train_loss", report.final_train_loss},
                 {"epochs", report.epoch_loss.size()},
                 {"parameters", count_parameters(circuit)}};
    write_common_artifacts(c, circuit, report, metrics);
    write_manifest(c, json::parse(dataset_manifest_json(
                          c.data_path, "iris csv: 4 features, species label",
                          c.seed, iris)));
    std::cout << "iris: test accuracy " << test_acc << " (noiseless), "
              << shot_acc << " (" << c.shots << " shots)\n";
}

void run_airfoil(const ExperimentConfig& c) {
    Dataset air;
    std::string source;
    if (fs::exists(c.data_path)) {
        air = load_airfoil(c.data_path);
        source = c.data_path;
    } else {
        // The UCI file is a manual download; fall back to the deterministic
        // surrogate with the same schema so the experiment stays runnable.
        air = make_airfoil_surrogate();
        source = "builtin surrogate (data file not found at " + c.data_path + ")";
        std::cerr << "note: " << source << "\n";
    }
    auto sp = split(air, c.train_fraction, c.seed);
    NormStats stats = fit_min_max(sp.train);
    Dataset train_ds = apply_min_max(sp.train, stats);
    Dataset test_ds = apply_min_max(sp.test, stats);
    TargetScale tscale = fit_target_scale(train_ds);
    train_ds = apply_target_scale(train_ds, tscale);
    test_ds = apply_target_scale(test_ds, tscale);

    Circuit circuit = airfoil_circuit_shape();
    TrainReport report = train(circuit, train_ds, LossKind::mse, to_train_config(c));

    double train_mse = evaluate(circuit, train_ds, Metric::mse);
    double test_mse = evaluate(circuit, test_ds, Metric::mse);

    json metrics{{"experiment", "airfoil"},
                 {"normalized_train_mse", train_mse},
                 {"normalized_test_mse", test_mse},
                 {"target_min", tscale.min},
                 {"target_max", tscale.max},
                 {"final_train_loss", report.final_train_loss},
                 {"epochs", report.epoch_loss.size()},
                 {"parameters", count_parameters(circuit)}};
    write_common_artifacts(c, circuit, report, metrics);
    json dataset_info;
    if (fs::exists(c.data_path)) {
        dataset_info = json::parse(dataset_manifest_json(
            c.data_path, "airfoil self-noise: 5 features, SPL target", c.seed, air));
    } else {
        dataset_info = json{{"source", source}, {"rows", air.size()}, {"surrogate_seed", 29}};
    }
    write_manifest(c, dataset_info);
    std::cout << "airfoil: normalized test MSE " << test_mse << "\n";
}

// ---------------------------------------------------------------------------
// calibrate subcommand

void run_calibrate(const std::string& out_dir, std::uint64_t seed, std::size_t shots,
                   bool sweep_only, double true_frequency, double noise_sigma) {
    fs::path out(out_dir);

    // Frequency sweep: +-40 MHz around a deliberately offset initial guess.
    const double guess = true_frequency - 3.7e6;
    const std::size_t points = 161;
    Vec grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = guess - 40e6 + 0.5e6 * static_cast<double>(i);
    Vec response = frequency_sweep_response(true_frequency, grid, noise_sigma, seed);
    CalibrationResult sweep = frequency_sweep(true_frequency, grid, noise_sigma, seed);

    std::ostringstream sweep_csv;
    sweep_csv << "frequency_hz,response\n";
    for (std::size_t i = 0; i < points; ++i)
        sweep_csv << grid[i] << ',' << response[i] << '\n';
    write_file(out / "sweep.csv", sweep_csv.str());

    CalibrationResult result = sweep;
    if (!sweep_only) {
        Vec amps(81);
        for (std::size_t i = 0; i < amps.size(); ++i)
            amps[i] = 0.05 * static_cast<double>(i);
        Vec rabi = rabi_response(amps, shots, seed);
        CalibrationResult fit = rabi_experiment(amps, shots, seed);
        result.pi_amplitude = fit.pi_amplitude;
        result.fit = fit.fit;
        result.fit_phase = fit.fit_phase;
        result.fit_residual = fit.fit_residual;

        std::ostringstream rabi_csv;
        rabi_csv << "amplitude,p_excited\n";
        for (std::size_t i = 0; i < amps.size(); ++i)
            rabi_csv << amps[i] << ',' << rabi[i] << '\n';
        write_file(out / "rabi.csv", rabi_csv.str());
    }

    write_file(out / "calibration.json", calibration_to_json(result));
    std::cout << "calibration: resonant frequency " << result.resonant_frequency
              << " Hz";
    if (!sweep_only) std::cout << ", pi amplitude " << result.pi_amplitude;
    std::cout << "\n";
}

// ---------------------------------------------------------------------------
// schedule subcommands

double max_block_deviation(const std::vector<Vec>& a,
                           const std::vector<BlockForwardTrace>& traces) {
    double worst = 0.0;
    if (a.size() != traces.size()) return 1.0;
    for (std::size_t b = 0; b < a.size(); ++b) {
        if (a[b].size() != traces[b].output.size()) return 1.0;
        for (std::size_t i = 0; i < a[b].size(); ++i)
            worst = std::max(worst, std::abs(a[b][i] - traces[b].output[i]));
    }
    return worst;
}

void run_export_schedule(const std::string& circuit_path, const std::string& input,
                         const std::string& calibration_path,
                         const std::string& out_path) {
    Circuit circuit = circuit_from_json(read_file(circuit_path, "circuit"));
    Vec x = parse_vector(input);
    CalibrationResult cal =
        calibration_from_json(read_file(calibration_path, "calibration"));

    PulseSchedule schedule;
    try {
        schedule = compile_schedule(circuit, x, cal, calibration_path);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("calibration: ") + e.what());
    }

    // Round-trip verification gates the write: replay the schedule on the
    // qubit simulator and compare against the direct forward pass.
    auto replayed = simulate_schedule(schedule);
    auto direct = circuit_forward(circuit, x);
    double dev = max_block_deviation(replayed, direct.traces);
    if (dev > 1e-9)
        throw VerificationError("schedule round-trip deviates by " +
                                std::to_string(dev) + "; not writing " + out_path);

    write_file(out_path, schedule_to_json(schedule));
    std::size_t trains = 0;
    for (const auto& b : schedule.blocks) trains += b.trains.size();
    std::cout << "schedule: " << schedule.blocks.size() << " block(s), " << trains
              << " train(s), max deviation " << dev << "\n";
}

void run_verify_schedule(const std::string& schedule_path,
                         const std::string& circuit_path, const std::string& input) {
    PulseSchedule schedule = schedule_from_json(read_file(schedule_path, "schedule"));
    std::vector<Vec> replayed;
    try {
        replayed = simulate_schedule(schedule);
    } catch (const ValidationError& e) {
        throw VerificationError(std::string("schedule invalid: ") + e.what());
    }
    Circuit circuit = circuit_from_json(read_file(circuit_path, "circuit"));
    Vec x = parse_vector(input);
    auto direct = circuit_forward(circuit, x);
    double dev = max_block_deviation(replayed, direct.traces);
    if (dev > 1e-9)
        throw VerificationError("schedule disagrees with the circuit by " +
                                std::to_string(dev));
    std::cout << "verify-schedule: ok (max deviation " << dev << ")\n";
}

// ---------------------------------------------------------------------------
// plot subcommand: SVG rendered from already-written CSVs.

struct CsvTable {
    std::vector<std::string> header;
    std::vector<Vec> rows;
};

CsvTable read_csv_table(const std::string& path) {
    std::istringstream in(read_file(path, "csv"));
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw DataError("csv is empty: " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Vec row;
        std::stringstream rs(line);
        while (std::getline(rs, cell, ',')) row.push_back(cell.empty() ? NAN : std::stod(cell));
        while (row.size() < t.header.size()) row.push_back(NAN);
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) throw DataError("csv has no data rows: " + path);
    return t;
}

void run_plot(const std::string& csv_path, const std::string& out_path,
              const std::string& kind, std::size_t x_col, std::size_t y_col) {
    CsvTable t = read_csv_table(csv_path);
    if (x_col >= t.header.size() || y_col >= t.header.size())
        throw ConfigError("plot: column index out of range for " + csv_path);

    const double w = 640, h = 480, m = 56;  // canvas and margin
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& r : t.rows) {
        if (std::isnan(r[x_col]) || std::isnan(r[y_col])) continue;
        xmin = std::min(xmin, r[x_col]);
        xmax = std::max(xmax, r[x_col]);
        ymin = std::min(ymin, r[y_col]);
        ymax = std::max(ymax, r[y_col]);
    }
    if (!(xmin <= xmax) || !(ymin <= ymax))
        throw DataError("plot: no finite data in selected columns");
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto sx = [&](double v) { return m + (v - xmin) / (xmax - xmin) * (w - 2 * m); };
    auto sy = [&](double v) { return h - m - (v - ymin) / (ymax - ymin) * (h - 2 * m); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m
        << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\""
        << h - m << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"" << h - 14
        << "\" text-anchor=\"middle\" font-size=\"13\">" << t.header[x_col]
        << "</text>\n"
        << "<text x=\"16\" y=\"" << h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << h / 2 << ")\">" << t.header[y_col] << "</text>\n";

    if (kind == "curve") {
        svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (const auto& r : t.rows) {
            if (std::isnan(r[x_col]) || std::isnan(r[y_col])) continue;
            svg << sx(r[x_col]) << ',' << sy(r[y_col]) << ' ';
        }
        svg << "\"/>\n";
    } else if (kind == "scatter") {
        // Optional third column colors the points (e.g. class / truth label).
        std::size_t c_col = t.header.size() > 2 ? 2 : y_col;
        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
        for (const auto& r : t.rows) {
            if (std::isnan(r[x_col]) || std::isnan(r[y_col])) continue;
            int cls = std::isnan(r[c_col]) ? 0 : static_cast<int>(r[c_col]) & 3;
            svg << "<circle cx=\"" << sx(r[x_col]) << "\" cy=\"" << sy(r[y_col])
                << "\" r=\"2.5\" fill=\"" << palette[cls] << "\" fill-opacity=\"0.6\"/>\n";
        }
    } else {
        throw ConfigError("plot: kind must be 'curve' or 'scatter'");
    }
    svg << "</svg>\n";
    write_file(out_path, svg.str());
    std::cout << "plot: wrote " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perthro block simulator and training harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Train and evaluate an experiment");
    std::string experiment;
    run->add_option("experiment", experiment, "xor | iris | airfoil")->required();
    std::string config_path, data_path, out_dir, optimizer_name;
    double learning_rate = 0, init_scale = 0, train_fraction = 0;
    std::size_t epochs = 0, batch_size = 0, shots = 0;
    std::uint64_t seed = 0;
    auto* o_cfg = run->add_option("--config", config_path, "JSON config file");
    auto* o_data = run->add_option("--data", data_path, "dataset path");
    auto* o_out = run->add_option("--out", out_dir, "output directory");
    auto* o_lr = run->add_option("--learning-rate", learning_rate, "step size");
    auto* o_ep = run->add_option("--epochs", epochs, "training epochs");
    auto* o_bs = run->add_option("--batch-size", batch_size, "mini-batch size");
    auto* o_is = run->add_option("--init-scale", init_scale, "weight init range");
    auto* o_opt = run->add_option("--optimizer", optimizer_name, "sgd | momentum | adam");
    auto* o_seed = run->add_option("--seed", seed, "master RNG seed");
    auto* o_shots = run->add_option("--shots", shots, "shots per evaluation");
    auto* o_tf = run->add_option("--train-fraction", train_fraction, "train split fraction");

    // --- calibrate ----------------------------------------------------------
    auto* cal = app.add_subcommand("calibrate", "Simulated frequency sweep + Rabi fit");
    std::string cal_out = "out/calibration";
    std::uint64_t cal_seed = 7;
    std::size_t cal_shots = 0;
    bool sweep_only = false;
    double true_frequency = 5.0e9, noise_sigma = 0.0;
    cal->add_option("--out", cal_out, "output directory");
    cal->add_option("--seed", cal_seed, "RNG seed");
    cal->add_option("--shots", cal_shots, "shots per Rabi point (0 = exact)");
    cal->add_flag("--sweep-only", sweep_only, "skip the Rabi fit");
    cal->add_option("--frequency", true_frequency, "simulated qubit frequency (Hz)");
    cal->add_option("--noise", noise_sigma, "sweep noise sigma");

    // --- export-schedule ------------------------------------------------------
    auto* exp = app.add_subcommand("export-schedule", "Compile a verified pulse schedule");
    std::string circuit_path, input_text, calibration_path, schedule_out = "schedule.json";
    exp->add_option("--circuit", circuit_path, "trained circuit JSON")->required();
    exp->add_option("--input", input_text, "comma-separated input sample")->required();
    exp->add_option("--calibration", calibration_path, "calibration JSON")->required();
    exp->add_option("--out", schedule_out, "schedule output path");

    // --- verify-schedule -------------------------------------------------------
    auto* ver = app.add_subcommand("verify-schedule", "Replay a schedule against a circuit");
    std::string v_schedule, v_circuit, v_input;
    ver->add_option("--schedule", v_schedule, "schedule JSON")->required();
    ver->add_option("--circuit", v_circuit, "circuit JSON")->required();
    ver->add_option("--input", v_input, "comma-separated input sample")->required();

    // --- plot -------------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "Render an SVG from a CSV");
    std::string p_csv, p_out, p_kind = "curve";
    std::size_t p_x = 0, p_y = 1;
    plot->add_option("--csv", p_csv, "input CSV")->required();
    plot->add_option("--out", p_out, "output SVG")->required();
    plot->add_option("--kind", p_kind, "curve | scatter");
    plot->add_option("--x", p_x, "x column index");
    plot->add_option("--y", p_y, "y column index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            ExperimentConfig c = defaults_for(experiment);
            auto passed = [&](const std::string& key) {
                if (key == "data_path") return o_data->count() > 0;
                if (key == "out_dir") return o_out->count() > 0;
                if (key == "learning_rate") return o_lr->count() > 0;
                if (key == "epochs") return o_ep->count() > 0;
                if (key == "batch_size") return o_bs->count() > 0;
                if (key == "init_scale") return o_is->count() > 0;
                if (key == "optimizer") return o_opt->count() > 0;
                if (key == "seed") return o_seed->count() > 0;
                if (key == "shots") return o_shots->count() > 0;
                if (key == "train_fraction") return o_tf->count() > 0;
                return false;
            };
            if (o_cfg->count() > 0) apply_config_file(c, config_path, passed);
            if (o_data->count()) c.data_path = data_path;
            if (o_out->count()) c.out_dir = out_dir;
            if (o_lr->count()) c.learning_rate = learning_rate;
            if (o_ep->count()) c.epochs = epochs;
            if (o_bs->count()) c.batch_size = batch_size;
            if (o_is->count()) c.init_scale = init_scale;
            if (o_opt->count()) c.optimizer = optimizer_name;
            if (o_seed->count()) c.seed = seed;
            if (o_shots->count()) c.shots = shots;
            if (o_tf->count()) c.train_fraction = train_fraction;
            make_optimizer(c.optimizer);  // validate early
            if (c.train_fraction <= 0.0 || c.train_fraction >= 1.0)
                throw ConfigError("train_fraction must lie in (0, 1)");

            if (experiment == "xor") run_xor(c);
            else if (experiment == "iris") run_iris(c);
            else run_airfoil(c);
        } else if (*cal) {
            run_calibrate(cal_out, cal_seed, cal_shots, sweep_only, true_frequency,
                          noise_sigma);
        } else if (*exp) {
            run_export_schedule(circuit_path, input_text, calibration_path, schedule_out);
        } else if (*ver) {
            run_verify_schedule(v_schedule, v_circuit, v_input);
        } else if (*plot) {
            run_plot(p_csv, p_out, p_kind, p_x, p_y);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const TrainingError& e) {
        std::cerr << "training error at epoch " << e.epoch << ": " << e.what() << "\n";
        return kExitTraining;
    } catch (const CalibrationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const VerificationError& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}
