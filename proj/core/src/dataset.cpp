#include "perthro/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "perthro/errors.hpp"
#include "perthro/rng.hpp"

namespace perthro {

Vec Dataset::sample(std::size_t i) const {
    auto row = features.row(i);
    return Vec(row.begin(), row.end());
}

Vec Dataset::target(std::size_t i) const {
    auto row = targets.row(i);
    return Vec(row.begin(), row.end());
}

Dataset xor_dataset() {
    Dataset ds;
    ds.features = Matrix(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
    ds.targets = Matrix(4, 1, {0, 1, 1, 0});
    ds.labels = {0, 1, 1, 0};
    ds.feature_names = {"x1", "x2"};
    ds.class_names = {"0", "1"};
    return ds;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, const CsvSchema& schema) {
    std::vector<std::string> fields;
    if (schema.whitespace_delimited) {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) fields.push_back(tok);
    } else {
        std::string tok;
        std::istringstream ss(line);
        while (std::getline(ss, tok, schema.delimiter)) fields.push_back(tok);
        if (!line.empty() && line.back() == schema.delimiter) fields.push_back("");
    }
    return fields;
}

double parse_number(const std::string& field, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": bad numeric field '" +
                              field + "'");
    }
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path);

    const std::size_t max_col =
        std::max(schema.target_column,
                 *std::max_element(schema.feature_columns.begin(), schema.feature_columns.end()));

    std::vector<Vec> rows;
    std::vector<std::string> raw_labels;
    Vec raw_targets;
    std::vector<std::string> feature_names;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = schema.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line, schema);
        if (header_pending) {
            header_pending = false;
            for (std::size_t c : schema.feature_columns)
                feature_names.push_back(c < fields.size() ? fields[c]
                                                          : "f" + std::to_string(c));
            continue;
        }
        if (fields.size() <= max_col)
            throw ValidationError("line " + std::to_string(line_no) + ": expected at least " +
                                  std::to_string(max_col + 1) + " columns, got " +
                                  std::to_string(fields.size()));
        Vec row;
        row.reserve(schema.feature_columns.size());
        for (std::size_t c : schema.feature_columns) row.push_back(parse_number(fields[c], line_no));
        rows.push_back(std::move(row));
        if (schema.target_is_label)
            raw_labels.push_back(fields[schema.target_column]);
        else
            raw_targets.push_back(parse_number(fields[schema.target_column], line_no));
    }
    if (rows.empty()) throw ValidationError("no data rows in " + path);

    Dataset ds;
    const std::size_t d = schema.feature_columns.size();
    ds.features = Matrix(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < d; ++k) ds.features(i, k) = rows[i][k];
    if (feature_names.size() == d) ds.feature_names = std::move(feature_names);

    if (schema.target_is_label) {
        std::vector<std::string> classes = schema.class_order;
        if (classes.empty()) {
            classes.assign(raw_labels.begin(), raw_labels.end());
            std::sort(classes.begin(), classes.end());
            classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
        }
        std::map<std::string, int> index;
        for (std::size_t c = 0; c < classes.size(); ++c) index[classes[c]] = static_cast<int>(c);
        ds.targets = Matrix(rows.size(), classes.size());
        ds.labels.resize(rows.size());
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
            auto it = index.find(raw_labels[i]);
            if (it == index.end())
                throw ValidationError("unknown class label '" + raw_labels[i] + "'");
            ds.labels[i] = it->second;
            ds.targets(i, static_cast<std::size_t>(it->second)) = 1.0;
        }
        ds.class_names = std::move(classes);
    } else {
        ds.targets = Matrix(rows.size(), 1);
        for (std::size_t i = 0; i < raw_targets.size(); ++i) ds.targets(i, 0) = raw_targets[i];
    }
    return ds;
}

Dataset load_iris(const std::string& path) {
    CsvSchema schema;
    schema.feature_columns = {0, 1, 2, 3};
    schema.target_column = 4;
    schema.target_is_label = true;
    schema.class_order = {"setosa", "versicolor", "virginica"};
    return load_csv(path, schema);
}

Dataset load_airfoil(const std::string& path) {
    CsvSchema schema;
    schema.whitespace_delimited = true;
    schema.has_header = false;
    schema.feature_columns = {0, 1, 2, 3, 4};
    schema.target_column = 5;
    return load_csv(path, schema);
}

Dataset make_airfoil_surrogate(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = 1503;
    Dataset ds;
    ds.features = Matrix(n, 5);
    ds.targets = Matrix(n, 1);
    ds.feature_names = {"frequency_hz", "angle_deg", "chord_m", "velocity_mps", "thickness_m"};
    for (std::size_t i = 0; i < n; ++i) {
        const double lf = rng.uniform(std::log10(200.0), std::log10(20000.0));
        const double freq = std::pow(10.0, lf);
        const double aoa = rng.uniform(0.0, 22.0);
        const double chord = rng.uniform(0.025, 0.30);
        const double vel = rng.uniform(31.7, 71.3);
        const double thick = 0.0004 + 0.0026 * aoa * rng.uniform(0.5, 1.5);
        ds.features(i, 0) = freq;
        ds.features(i, 1) = aoa;
        ds.features(i, 2) = chord;
        ds.features(i, 3) = vel;
        ds.features(i, 4) = thick;
        const double spl = 132.0 - 9.0 * (lf - 2.9) * (lf - 2.9) + 0.30 * aoa - 16.0 * chord +
                           0.11 * vel - 130.0 * thick + 2.0 * std::sin(1.7 * lf) +
                           0.5 * rng.normal();
        ds.targets(i, 0) = spl;
    }
    return ds;
}

void write_airfoil_file(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write dataset file: " + path);
    out.precision(10);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t k = 0; k < ds.features.cols(); ++k) out << ds.features(i, k) << '\t';
        out << ds.targets(i, 0) << '\n';
    }
}

namespace {

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.features = Matrix(idx.size(), ds.features.cols());
    out.targets = Matrix(idx.size(), ds.targets.cols());
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    out.normalization = ds.normalization;
    if (!ds.labels.empty()) out.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t k = 0; k < ds.features.cols(); ++k)
            out.features(i, k) = ds.features(idx[i], k);
        for (std::size_t k = 0; k < ds.targets.cols(); ++k)
            out.targets(i, k) = ds.targets(idx[i], k);
        if (!ds.labels.empty()) out.labels[i] = ds.labels[idx[i]];
    }
    return out;
}

}  // namespace

SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must be in (0, 1)");

    Rng rng(seed);
    std::vector<std::size_t> train_idx, test_idx;

    if (ds.is_classification()) {
        const int num_classes =
            1 + *std::max_element(ds.labels.begin(), ds.labels.end());
        std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(num_classes));
        for (std::size_t i = 0; i < ds.size(); ++i)
            groups[static_cast<std::size_t>(ds.labels[i])].push_back(i);
        for (auto& group : groups) {
            shuffle(group, rng);
            const auto n_train = static_cast<std::size_t>(
                std::llround(train_fraction * static_cast<double>(group.size())));
            for (std::size_t k = 0; k < group.size(); ++k)
                (k < n_train ? train_idx : test_idx).push_back(group[k]);
        }
    } else {
        std::vector<std::size_t> all(ds.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        shuffle(all, rng);
        const auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(all.size())));
        train_idx.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    if (train_idx.empty() || test_idx.empty())
        throw std::invalid_argument("degenerate split: one side is empty");

    SplitResult result;
    result.train = select_rows(ds, train_idx);
    result.test = select_rows(ds, test_idx);
    result.train_indices = std::move(train_idx);
    result.test_indices = std::move(test_idx);
    return result;
}

NormStats fit_min_max(const Dataset& ds) {
    const std::size_t d = ds.features.cols();
    NormStats stats;
    stats.min.assign(d, std::numeric_limits<double>::infinity());
    stats.max.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t k = 0; k < d; ++k) {
            stats.min[k] = std::min(stats.min[k], ds.features(i, k));
            stats.max[k] = std::max(stats.max[k], ds.features(i, k));
        }
    return stats;
}

Dataset apply_min_max(const Dataset& ds, const NormStats& stats) {
    Dataset out = ds;
    for (std::size_t k = 0; k < ds.features.cols(); ++k) {
        const double span = stats.max[k] - stats.min[k];
        const double inv = span > 0.0 ? 1.0 / span : 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i)
            out.features(i, k) = (ds.features(i, k) - stats.min[k]) * inv;
    }
    out.normalization = stats;
    return out;
}

Dataset denormalize(const Dataset& ds) {
    if (!ds.normalization) throw std::invalid_argument("dataset carries no normalization stats");
    Dataset out = ds;
    const auto& stats = *ds.normalization;
    for (std::size_t k = 0; k < ds.features.cols(); ++k) {
        const double span = stats.max[k] - stats.min[k];
        for (std::size_t i = 0; i < ds.size(); ++i)
            out.features(i, k) = ds.features(i, k) * span + stats.min[k];
    }
    out.normalization.reset();
    return out;
}

TargetScale fit_target_scale(const Dataset& train) {
    if (train.is_classification())
        throw std::invalid_argument("target scaling applies to regression targets");
    TargetScale scale;
    scale.min = std::numeric_limits<double>::infinity();
    scale.max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < train.size(); ++i) {
        scale.min = std::min(scale.min, train.targets(i, 0));
        scale.max = std::max(scale.max, train.targets(i, 0));
    }
    return scale;
}

Dataset apply_target_scale(const Dataset& ds, const TargetScale& scale) {
    Dataset out = ds;
    const double span = scale.max - scale.min;
    const double inv = span > 0.0 ? 1.0 / span : 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        out.targets(i, 0) = (ds.targets(i, 0) - scale.min) * inv;
    return out;
}

std::uint64_t fnv1a_bytes(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file for checksum: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_bytes(ss.str());
}

std::string dataset_manifest_json(const std::string& source_path, const std::string& schema_note,
                                  std::uint64_t split_seed, const Dataset& ds) {
    nlohmann::json j = {
        {"source", source_path},
        {"checksum_fnv1a", source_path.empty() ? 0 : fnv1a_file(source_path)},
        {"schema", schema_note},
        {"split_seed", split_seed},
        {"samples", ds.size()},
        {"features", ds.features.cols()},
        {"targets", ds.targets.cols()},
    };
    return j.dump(2) + "\n";
}

}  // namespace perthro
