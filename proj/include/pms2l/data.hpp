#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pms2l {

/// One nonzero coordinate of a sparse feature vector (0-based index).
struct Feature {
    std::uint32_t index = 0;
    double value = 0.0;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// Sparse sample. Indices are strictly increasing and values finite; `label` is a
/// contiguous class index when present and absent for unlabeled data.
struct Sample {
    std::vector<Feature> features;
    std::optional<int> label;

    double squared_norm() const noexcept;
    double norm() const noexcept;
    /// Inner product with a dense vector; coordinates beyond `dense.size()` contribute 0.
    double dot(std::span<const double> dense) const noexcept;
    /// One past the largest stored index (0 for an empty vector).
    std::size_t extent() const noexcept;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Checks sortedness/uniqueness of indices and finiteness of values.
void validate_features(const Sample& s, std::string_view context);

/// A labeled sample pool: what a single LIBSVM file or a synthetic generator yields.
/// `label_values[k]` is the original label encoded as class index k.
struct LabeledPool {
    std::vector<Sample> samples;
    std::vector<double> label_values;
    int num_classes = 0;
    std::size_t dimension = 0;
};

/// Training/test data for one run. Immutable once built.
struct Dataset {
    std::vector<Sample> labeled;
    std::vector<Sample> unlabeled;
    std::vector<Sample> test;
    int num_classes = 0;
    std::size_t dimension = 0;
    double feature_radius = 0.0;

    std::size_t n() const noexcept { return labeled.size(); }
    std::size_t u() const noexcept { return unlabeled.size(); }
    /// Throws DataError when an invariant is broken (K >= 2, n >= 1, u >= 1, labels, radius).
    void validate() const;
};

/// Largest Euclidean norm over labeled and unlabeled samples.
double feature_radius(std::span<const Sample> labeled, std::span<const Sample> unlabeled);

// --- LIBSVM text format -------------------------------------------------------------

/// Parses "label idx:val ..." lines (1-based indices). Labels are remapped to 0..K-1 by
/// ascending original value. Blank lines and '#' comments are skipped.
LabeledPool parse_libsvm(std::istream& in, std::string_view source = "<stream>",
                         std::optional<int> num_classes = std::nullopt);

/// Same as above, but maps labels through an existing table (e.g. a test file that must
/// share the training file's encoding). Unknown labels are a DataError.
LabeledPool parse_libsvm(std::istream& in, std::string_view source,
                         std::span<const double> label_values);

LabeledPool load_libsvm(const std::filesystem::path& path,
                        std::optional<int> num_classes = std::nullopt);
LabeledPool load_libsvm(const std::filesystem::path& path, std::span<const double> label_values);

/// Writes samples using `label_values[label]` as the label token (or the class index when
/// the table is empty). Unlabeled samples are written with label 0.
void write_libsvm(std::ostream& out, std::span<const Sample> samples,
                  std::span<const double> label_values = {});
void write_libsvm(const std::filesystem::path& path, std::span<const Sample> samples,
                  std::span<const double> label_values = {});

// --- splitting and preprocessing ----------------------------------------------------

struct SplitSpec {
    double labeled_fraction = 0.1;
    int per_class_minimum = 1;
    std::uint64_t seed = 0;
};

struct SplitResult {
    std::vector<Sample> labeled;
    std::vector<Sample> unlabeled;  // labels stripped
    std::vector<std::size_t> labeled_indices;
    std::vector<std::size_t> unlabeled_indices;
};

/// Stratified split: ceil(fraction * |pool|) samples stay labeled, with at least
/// `per_class_minimum` per class; the remainder is allocated across classes in proportion to
/// their spare counts (largest remainder, ties to the lower class). Outputs keep pool order.
SplitResult split(const LabeledPool& pool, const SplitSpec& spec);

/// Indices (into the pool) of the labeled part of `split`; the rest are unlabeled.
SplitResult split_from_indices(const LabeledPool& pool, std::span<const std::size_t> labeled);

Dataset make_dataset(const LabeledPool& pool, SplitResult parts, std::vector<Sample> test);

/// Scales every sample to unit norm; throws DataError naming the first zero-norm sample.
std::vector<Sample> l2_normalize(std::span<const Sample> samples, std::string_view set_name = "sample");
Dataset l2_normalize(const Dataset& ds);

/// K isotropic Gaussian blobs in R^2. Centers sit on a circle around the origin whose
/// adjacent chord equals `separation`, so every center pair is at least that far apart.
LabeledPool make_synthetic_blobs(int num_classes, int per_class, double separation, double noise,
                                 std::uint64_t seed);

/// Centers used by make_synthetic_blobs, exposed for tests and diagnostics.
std::vector<std::vector<double>> blob_centers(int num_classes, double separation);

}  // namespace pms2l
