#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pms2l/data.hpp"
#include "pms2l/error.hpp"

using namespace pms2l;

namespace {

LabeledPool parse(const std::string& text) {
    std::istringstream in(text);
    return parse_libsvm(in, "mem");
}

LabeledPool two_class_pool(int per_class) {
    LabeledPool pool;
    pool.num_classes = 2;
    pool.label_values = {0.0, 1.0};
    pool.dimension = 1;
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < per_class; ++i) pool.samples.push_back(oracle::sample({1.0 + i + 100.0 * k}, k));
    }
    return pool;
}

}  // namespace

TEST_CASE("libsvm line maps to a sparse sample with remapped label") {
    const auto pool = parse("1 1:2\n2 2:1\n3 1:0.5 4:-1.0\n");
    REQUIRE(pool.samples.size() == 3);
    CHECK(pool.num_classes == 3);
    CHECK(pool.dimension == 4);
    const auto& s = pool.samples[2];
    CHECK(s.label == 2);
    REQUIRE(s.features.size() == 2);
    CHECK(s.features[0] == Feature{0, 0.5});
    CHECK(s.features[1] == Feature{3, -1.0});
    CHECK(pool.label_values == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("empty input gives an empty fragment") {
    const auto pool = parse("");
    CHECK(pool.samples.empty());
    CHECK(pool.dimension == 0);
}

TEST_CASE("comments and blank lines are skipped") {
    const auto pool = parse("# header\n\n-1 1:1\n  \n+1 2:1 # trailing\n");
    CHECK(pool.samples.size() == 2);
    CHECK(pool.samples[0].label == 0);
    CHECK(pool.samples[1].label == 1);
}

TEST_CASE("malformed lines are parse errors with the line number") {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("1 1:1\n2 4:1.0 2:1.0\n") == 2);  // unsorted
    CHECK(line_of("1 2:1 2:3\n") == 1);             // duplicate
    CHECK(line_of("1 1:1\n1 1:1\n1 0:1\n") == 3);   // 0 is not a 1-based index
    CHECK(line_of("1 1:abc\n") == 1);
    CHECK(line_of("x 1:1\n") == 1);
    CHECK(line_of("1 1\n") == 1);
}

TEST_CASE("non-finite values are data errors") {
    CHECK_THROWS_AS(parse("1 1:nan\n"), DataError);
    CHECK_THROWS_AS(parse("1 1:inf\n"), DataError);
}

TEST_CASE("test files can share the training label table") {
    std::istringstream in("5 1:1\n9 1:2\n");
    const std::vector<double> table{5.0, 7.0, 9.0};
    const auto pool = parse_libsvm(in, "mem", table);
    CHECK(pool.num_classes == 3);
    CHECK(pool.samples[1].label == 2);
    std::istringstream bad("6 1:1\n");
    CHECK_THROWS_AS(parse_libsvm(bad, "mem", table), DataError);
}

TEST_CASE("write then parse round-trips exactly") {
    const auto pool = make_synthetic_blobs(3, 20, 4.0, 1.5, 11);
    std::ostringstream out;
    write_libsvm(out, pool.samples, pool.label_values);
    const auto back = parse(out.str());
    CHECK(back.samples == pool.samples);
    CHECK(back.label_values == pool.label_values);
    CHECK(back.dimension == pool.dimension);
}

TEST_CASE("split is deterministic per seed") {
    const auto pool = make_synthetic_blobs(3, 30, 5.0, 1.0, 1);
    SplitSpec spec{0.2, 2, 99};
    const auto a = split(pool, spec);
    const auto b = split(pool, spec);
    CHECK(a.labeled_indices == b.labeled_indices);
    CHECK(a.labeled == b.labeled);
    CHECK(a.unlabeled == b.unlabeled);
    spec.seed = 100;
    CHECK(split(pool, spec).labeled_indices != a.labeled_indices);
}

TEST_CASE("labeled fraction 1 leaves nothing unlabeled") {
    const auto r = split(two_class_pool(5), SplitSpec{1.0, 1, 0});
    CHECK(r.labeled.size() == 10);
    CHECK(r.unlabeled.empty());
}

TEST_CASE("100 samples, fraction 0.1, two classes: 10 labeled covering both") {
    const auto r = split(two_class_pool(50), SplitSpec{0.1, 1, 3});
    CHECK(r.labeled.size() == 10);
    std::set<int> classes;
    for (const auto& s : r.labeled) classes.insert(*s.label);
    CHECK(classes == std::set<int>{0, 1});
    // balanced pool: proportional allocation gives 5 + 5
    CHECK(std::count_if(r.labeled.begin(), r.labeled.end(), [](const Sample& s) { return *s.label == 0; }) == 5);
}

TEST_CASE("split is a stratified partition of the pool") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int K = 2 + static_cast<int>(seed % 4);
        const auto pool = make_synthetic_blobs(K, 8 + static_cast<int>(seed % 7), 3.0, 1.0, seed);
        const SplitSpec spec{0.05 + 0.02 * static_cast<double>(seed % 10), 1 + static_cast<int>(seed % 3), seed};
        const auto target = static_cast<std::size_t>(std::ceil(spec.labeled_fraction * pool.samples.size() - 1e-9));
        if (target < static_cast<std::size_t>(spec.per_class_minimum * K)) {
            CHECK_THROWS_AS(split(pool, spec), SplitError);
            continue;
        }
        const auto r = split(pool, spec);
        std::vector<int> seen(pool.samples.size(), 0);
        for (const auto i : r.labeled_indices) ++seen[i];
        for (const auto i : r.unlabeled_indices) ++seen[i];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
        REQUIRE(r.labeled.size() == r.labeled_indices.size());
        for (std::size_t j = 0; j < r.labeled.size(); ++j) {
            CHECK(r.labeled[j] == pool.samples[r.labeled_indices[j]]);
        }
        for (std::size_t j = 0; j < r.unlabeled.size(); ++j) {
            CHECK_FALSE(r.unlabeled[j].label.has_value());
            CHECK(r.unlabeled[j].features == pool.samples[r.unlabeled_indices[j]].features);
        }
        std::vector<int> per_class(static_cast<std::size_t>(K), 0);
        for (const auto& s : r.labeled) ++per_class[static_cast<std::size_t>(*s.label)];
        for (const int c : per_class) CHECK(c >= spec.per_class_minimum);
        CHECK(r.labeled.size() == target);
    }
}

TEST_CASE("a class below the minimum is a split error naming it") {
    auto pool = two_class_pool(5);
    pool.samples.resize(7);  // class 1 keeps 2
    try {
        split(pool, SplitSpec{0.9, 3, 0});
        FAIL("expected a split error");
    } catch (const SplitError& e) {
        CHECK(std::string(e.what()).find("class 1") != std::string::npos);
    }
}

TEST_CASE("split from explicit indices") {
    const auto pool = two_class_pool(3);
    const std::vector<std::size_t> labeled{4, 0};
    const auto r = split_from_indices(pool, labeled);
    CHECK(r.labeled_indices == std::vector<std::size_t>{0, 4});
    CHECK(r.unlabeled_indices == std::vector<std::size_t>{1, 2, 3, 5});
    const std::vector<std::size_t> dup{1, 1};
    CHECK_THROWS_AS(split_from_indices(pool, dup), ArgumentError);
}

TEST_CASE("l2 normalization") {
    const std::vector<Sample> s{oracle::sample({3.0, 4.0})};
    const auto n = l2_normalize(s);
    CHECK(n[0].features[0].value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n[0].features[1].value == doctest::Approx(0.8).epsilon(1e-15));
    const auto again = l2_normalize(n);
    CHECK(std::abs(again[0].features[0].value - n[0].features[0].value) < 1e-12);
    CHECK(std::abs(again[0].features[1].value - n[0].features[1].value) < 1e-12);

    const std::vector<Sample> zero{oracle::sample({1.0}), Sample{}};
    try {
        l2_normalize(zero, "train");
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("train 1") != std::string::npos);
    }
}

TEST_CASE("normalized dataset has radius 1") {
    const auto pool = make_synthetic_blobs(3, 20, 6.0, 2.0, 5);
    const auto test = make_synthetic_blobs(3, 5, 6.0, 2.0, 6).samples;
    const auto ds = l2_normalize(make_dataset(pool, split(pool, SplitSpec{0.2, 1, 0}), test));
    CHECK(ds.feature_radius == 1.0);
    for (const auto& s : ds.labeled) CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    for (const auto& s : ds.unlabeled) CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    for (const auto& s : ds.test) CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("dataset invariants") {
    const auto pool = make_synthetic_blobs(4, 10, 6.0, 1.0, 2);
    const auto ds = make_dataset(pool, split(pool, SplitSpec{0.25, 1, 0}), {});
    CHECK_NOTHROW(ds.validate());
    CHECK(ds.n() + ds.u() == pool.samples.size());
    for (const auto& s : ds.labeled) CHECK(s.norm() <= ds.feature_radius);
    for (const auto& s : ds.unlabeled) CHECK(s.norm() <= ds.feature_radius);

    auto broken = ds;
    broken.unlabeled[0].label = 0;
    CHECK_THROWS_AS(broken.validate(), DataError);
    broken = ds;
    broken.feature_radius = 0.5;
    CHECK_THROWS_AS(broken.validate(), DataError);
}

TEST_CASE("well separated blobs are solved by nearest centroid") {
    const auto pool = make_synthetic_blobs(2, 50, 10.0, 0.1, 4);
    CHECK(oracle::nearest_centroid_accuracy(pool.samples, 2, 2) == 1.0);
}

TEST_CASE("blob generator contract") {
    CHECK(make_synthetic_blobs(3, 10, 4.0, 1.0, 8).samples == make_synthetic_blobs(3, 10, 4.0, 1.0, 8).samples);
    CHECK(make_synthetic_blobs(3, 0, 4.0, 1.0, 8).samples.empty());
    CHECK_THROWS_AS(make_synthetic_blobs(3, 10, 0.0, 1.0, 8), ArgumentError);
    CHECK_THROWS_AS(make_synthetic_blobs(3, 10, 4.0, -1.0, 8), ArgumentError);
    for (int K = 2; K <= 9; ++K) {
        const auto c = blob_centers(K, 8.0);
        for (int a = 0; a < K; ++a) {
            for (int b = a + 1; b < K; ++b) {
                const double d = std::hypot(c[a][0] - c[b][0], c[a][1] - c[b][1]);
                CHECK(d >= 8.0 - 1e-9);
            }
        }
    }
}

TEST_CASE("feature radius is the largest training norm") {
    const std::vector<Sample> l{oracle::sample({3.0, 4.0}, 0)};
    const std::vector<Sample> u{oracle::sample({0.0, 6.0}), oracle::sample({1.0})};
    CHECK(feature_radius(l, u) == 6.0);
}
