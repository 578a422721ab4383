#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perthro/linalg.hpp"

namespace perthro {

/// Per-feature min/max, always fitted on the training split only.
struct NormStats {
    Vec min;
    Vec max;
};

struct Dataset {
    Matrix features;                   // rows = samples
    Matrix targets;                    // one-hot for classification, values for regression
    std::vector<int> labels;           // class indices; empty for regression
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::optional<NormStats> normalization;

    std::size_t size() const { return features.rows(); }
    bool is_classification() const { return !labels.empty(); }

    Vec sample(std::size_t i) const;
    Vec target(std::size_t i) const;
};

/// The four-row XOR truth table: (0,0)->0, (0,1)->1, (1,0)->1, (1,1)->0.
Dataset xor_dataset();

struct CsvSchema {
    char delimiter = ',';
    bool whitespace_delimited = false;  // Airfoil-style: any run of spaces/tabs
    bool has_header = true;
    std::vector<std::size_t> feature_columns;
    std::size_t target_column = 0;
    bool target_is_label = false;  // map distinct strings to one-hot classes
    /// Fixed class order when target_is_label; inferred (sorted) when empty.
    std::vector<std::string> class_order;
};

/// Parse with row/column validation; errors name the offending line.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Iris: 4 features, species label, classes fixed alphabetically.
Dataset load_iris(const std::string& path);

/// Airfoil Self-Noise layout: whitespace-delimited, 5 features, 1 target,
/// no header.
Dataset load_airfoil(const std::string& path);

/// Deterministic stand-in with the Airfoil schema (1503 rows, 5 features,
/// 1 target): a smooth nonlinear response plus mild seeded noise. For use
/// when the real UCI file is not locally available.
Dataset make_airfoil_surrogate(std::uint64_t seed = 29);

/// Write a dataset in the Airfoil file layout (whitespace-delimited).
void write_airfoil_file(const std::string& path, const Dataset& ds);

struct SplitResult {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Seeded shuffle then split; stratified per class for classification.
SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// Fit per-feature min/max on ds (call on the training split).
NormStats fit_min_max(const Dataset& ds);

/// Map features into [0,1] by the given stats; records them on the result.
Dataset apply_min_max(const Dataset& ds, const NormStats& stats);

/// Inverse of apply_min_max.
Dataset denormalize(const Dataset& ds);

/// Min-max normalize regression targets by the training split's target range.
struct TargetScale {
    double min = 0.0;
    double max = 1.0;
};
TargetScale fit_target_scale(const Dataset& train);
Dataset apply_target_scale(const Dataset& ds, const TargetScale& scale);

/// Provenance manifest: source path, FNV-1a checksum, schema note, seed.
std::string dataset_manifest_json(const std::string& source_path,
                                  const std::string& schema_note,
                                  std::uint64_t split_seed, const Dataset& ds);

/// FNV-1a 64-bit over a file's bytes; stable and documented.
std::uint64_t fnv1a_file(const std::string& path);
std::uint64_t fnv1a_bytes(const std::string& bytes);

}  // namespace perthro
