#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "perthro/dataset.hpp"
#include "perthro/errors.hpp"

using namespace perthro;

#ifndef PERTHRO_DATA_DIR
#define PERTHRO_DATA_DIR "data"
#endif

namespace {

const std::string kDataDir = PERTHRO_DATA_DIR;

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/perthro_test_" + name) {
        std::ofstream(path) << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("xor_dataset is the four-row truth table") {
    const Dataset ds = xor_dataset();
    REQUIRE(ds.size() == 4);
    CHECK(ds.labels == std::vector<int>{0, 1, 1, 0});
    CHECK(ds.features(1, 1) == 1.0);
    CHECK(ds.features(2, 0) == 1.0);
    CHECK(ds.targets(3, 0) == 0.0);
}

TEST_CASE("iris CSV loads with 150 samples, 4 features, 3 classes") {
    const Dataset ds = load_iris(kDataDir + "/iris.csv");
    REQUIRE(ds.size() == 150);
    CHECK(ds.features.cols() == 4);
    CHECK(ds.class_names == std::vector<std::string>{"setosa", "versicolor", "virginica"});
    std::vector<int> counts(3, 0);
    for (int label : ds.labels) ++counts[static_cast<std::size_t>(label)];
    CHECK(counts == std::vector<int>{50, 50, 50});
}

TEST_CASE("one-hot targets have exactly one unit entry") {
    const Dataset ds = load_iris(kDataDir + "/iris.csv");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double sum = 0.0;
        int units = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            sum += ds.targets(i, c);
            if (ds.targets(i, c) == 1.0) ++units;
        }
        REQUIRE(sum == 1.0);
        REQUIRE(units == 1);
    }
}

TEST_CASE("malformed rows are reported with their line number") {
    SUBCASE("truncated row") {
        TempFile f("truncated.csv", "a,b,c,d,species\n1,2,3,4,setosa\n1,2\n");
        CsvSchema schema;
        schema.feature_columns = {0, 1, 2, 3};
        schema.target_column = 4;
        schema.target_is_label = true;
        try {
            load_csv(f.path, schema);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("non-numeric field") {
        TempFile f("badnum.csv", "a,b\n1,oops\n");
        CsvSchema schema;
        schema.feature_columns = {0};
        schema.target_column = 1;
        CHECK_THROWS_AS(load_csv(f.path, schema), ValidationError);
    }
    SUBCASE("unknown label") {
        TempFile f("badlabel.csv", "a,species\n1,nessie\n");
        CsvSchema schema;
        schema.feature_columns = {0};
        schema.target_column = 1;
        schema.target_is_label = true;
        schema.class_order = {"setosa"};
        CHECK_THROWS_AS(load_csv(f.path, schema), ValidationError);
    }
    SUBCASE("missing file") {
        CsvSchema schema;
        schema.feature_columns = {0};
        schema.target_column = 1;
        CHECK_THROWS_AS(load_csv("/nonexistent/never.csv", schema), ValidationError);
    }
}

TEST_CASE("stratified split: 150 rows at 0.8 gives 120/30 with 40/10 per class") {
    const Dataset ds = load_iris(kDataDir + "/iris.csv");
    const auto sp = split(ds, 0.8, 99);
    REQUIRE(sp.train.size() == 120);
    REQUIRE(sp.test.size() == 30);
    std::vector<int> train_counts(3, 0), test_counts(3, 0);
    for (int l : sp.train.labels) ++train_counts[static_cast<std::size_t>(l)];
    for (int l : sp.test.labels) ++test_counts[static_cast<std::size_t>(l)];
    CHECK(train_counts == std::vector<int>{40, 40, 40});
    CHECK(test_counts == std::vector<int>{10, 10, 10});

    SUBCASE("partition: disjoint and exhaustive") {
        std::set<std::size_t> all(sp.train_indices.begin(), sp.train_indices.end());
        for (std::size_t i : sp.test_indices) REQUIRE(all.insert(i).second);
        REQUIRE(all.size() == 150);
    }
    SUBCASE("same seed gives the identical partition") {
        const auto again = split(ds, 0.8, 99);
        CHECK(again.train_indices == sp.train_indices);
        CHECK(again.test_indices == sp.test_indices);
    }
    SUBCASE("degenerate fractions are usage errors") {
        CHECK_THROWS_AS(split(ds, 1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(split(ds, 0.0, 1), std::invalid_argument);
    }
}

TEST_CASE("min-max normalization round-trips within 1e-12") {
    const Dataset ds = load_iris(kDataDir + "/iris.csv");
    const NormStats stats = fit_min_max(ds);
    const Dataset normalized = apply_min_max(ds, stats);
    for (std::size_t i = 0; i < normalized.size(); ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            REQUIRE(normalized.features(i, k) >= 0.0);
            REQUIRE(normalized.features(i, k) <= 1.0);
        }
    const Dataset back = denormalize(normalized);
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t k = 0; k < 4; ++k)
            REQUIRE(std::abs(back.features(i, k) - ds.features(i, k)) <= 1e-12);
}

TEST_CASE("airfoil surrogate has the documented shape and loads back from disk") {
    const Dataset ds = make_airfoil_surrogate();
    REQUIRE(ds.size() == 1503);
    REQUIRE(ds.features.cols() == 5);
    REQUIRE(ds.targets.cols() == 1);
    CHECK_FALSE(ds.is_classification());

    const std::string path = "/tmp/perthro_test_airfoil.dat";
    write_airfoil_file(path, ds);
    const Dataset loaded = load_airfoil(path);
    REQUIRE(loaded.size() == 1503);
    CHECK(loaded.features.cols() == 5);
    CHECK(std::abs(loaded.targets(0, 0) - ds.targets(0, 0)) <= 1e-6);
    std::remove(path.c_str());
}

TEST_CASE("regression target scaling maps the train range to [0,1]") {
    const Dataset ds = make_airfoil_surrogate();
    const auto sp = split(ds, 0.8, 5);
    const TargetScale scale = fit_target_scale(sp.train);
    const Dataset scaled = apply_target_scale(sp.train, scale);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        lo = std::min(lo, scaled.targets(i, 0));
        hi = std::max(hi, scaled.targets(i, 0));
    }
    CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dataset manifest records source, checksum and seed") {
    const Dataset ds = xor_dataset();
    const std::string manifest =
        dataset_manifest_json(kDataDir + "/iris.csv", "iris-csv", 42, ds);
    CHECK(manifest.find("\"split_seed\": 42") != std::string::npos);
    CHECK(manifest.find("checksum_fnv1a") != std::string::npos);
}
