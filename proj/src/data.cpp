#include "pms2l/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pms2l/error.hpp"
#include "pms2l/rng.hpp"

namespace pms2l {

double Sample::squared_norm() const noexcept {
    double s = 0.0;
    for (const auto& f : features) s += f.value * f.value;
    return s;
}

double Sample::norm() const noexcept { return std::sqrt(squared_norm()); }

double Sample::dot(std::span<const double> dense) const noexcept {
    double s = 0.0;
    for (const auto& f : features) {
        if (f.index < dense.size()) s += f.value * dense[f.index];
    }
    return s;
}

std::size_t Sample::extent() const noexcept {
    return features.empty() ? 0 : static_cast<std::size_t>(features.back().index) + 1;
}

void validate_features(const Sample& s, std::string_view context) {
    for (std::size_t i = 0; i < s.features.size(); ++i) {
        if (!std::isfinite(s.features[i].value)) {
            throw DataError(std::string(context) + ": non-finite feature value");
        }
        if (i > 0 && s.features[i].index <= s.features[i - 1].index) {
            throw DataError(std::string(context) + ": feature indices not strictly increasing");
        }
    }
}

void Dataset::validate() const {
    if (num_classes < 2) throw DataError("dataset needs at least 2 classes");
    if (labeled.empty()) throw DataError("dataset has no labeled samples");
    if (unlabeled.empty()) throw DataError("dataset has no unlabeled samples");
    auto check_labeled = [&](const std::vector<Sample>& set, const char* name) {
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (!set[i].label || *set[i].label < 0 || *set[i].label >= num_classes) {
                throw DataError(std::string(name) + " sample " + std::to_string(i) +
                                " lacks a valid label");
            }
        }
    };
    check_labeled(labeled, "labeled");
    check_labeled(test, "test");
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        if (unlabeled[i].label) {
            throw DataError("unlabeled sample " + std::to_string(i) + " carries a label");
        }
    }
    if (feature_radius + 1e-12 < pms2l::feature_radius(labeled, unlabeled)) {
        throw DataError("feature_radius below the largest training norm");
    }
}

double feature_radius(std::span<const Sample> labeled, std::span<const Sample> unlabeled) {
    double r2 = 0.0;
    for (const auto& s : labeled) r2 = std::max(r2, s.squared_norm());
    for (const auto& s : unlabeled) r2 = std::max(r2, s.squared_norm());
    return std::sqrt(r2);
}

namespace {

struct RawRow {
    double label;
    Sample sample;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view tok, std::string_view source, std::size_t line) {
    double v = 0.0;
    // from_chars rejects a leading '+', which some writers emit.
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(std::string(source), line, "bad number '" + std::string(tok) + "'");
    }
    return v;
}

std::vector<RawRow> parse_rows(std::istream& in, std::string_view source) {
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = line;
        if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
            rest = rest.substr(0, hash);
        }
        rest = trim(rest);
        if (rest.empty()) continue;

        std::vector<std::string_view> tokens;
        while (!rest.empty()) {
            const auto end = rest.find_first_of(" \t");
            tokens.push_back(rest.substr(0, end));
            if (end == std::string_view::npos) break;
            rest = trim(rest.substr(end));
        }

        RawRow row;
        row.label = parse_double(tokens[0], source, line_no);
        if (!std::isfinite(row.label)) {
            throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                            ": non-finite label");
        }
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto tok = tokens[t];
            const auto colon = tok.find(':');
            if (colon == std::string_view::npos) {
                throw ParseError(std::string(source), line_no,
                                 "expected idx:val, got '" + std::string(tok) + "'");
            }
            const auto idx_tok = tok.substr(0, colon);
            unsigned long long idx = 0;
            const auto [ptr, ec] =
                std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
            if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0 ||
                idx > 0xffffffffULL) {
                throw ParseError(std::string(source), line_no,
                                 "bad feature index '" + std::string(idx_tok) + "'");
            }
            const double value = parse_double(tok.substr(colon + 1), source, line_no);
            if (!std::isfinite(value)) {
                throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                                ": non-finite feature value");
            }
            const auto index = static_cast<std::uint32_t>(idx - 1);
            if (!row.sample.features.empty() && index <= row.sample.features.back().index) {
                throw ParseError(std::string(source), line_no,
                                 "feature indices must be strictly increasing");
            }
            row.sample.features.push_back({index, value});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

LabeledPool assemble(std::vector<RawRow> rows, std::vector<double> label_values, int num_classes,
                     std::string_view source) {
    LabeledPool pool;
    pool.label_values = std::move(label_values);
    pool.num_classes = num_classes;
    pool.samples.reserve(rows.size());
    for (auto& row : rows) {
        const auto it =
            std::lower_bound(pool.label_values.begin(), pool.label_values.end(), row.label);
        if (it == pool.label_values.end() || *it != row.label) {
            std::ostringstream msg;
            msg << source << ": label " << row.label << " not in the label table";
            throw DataError(msg.str());
        }
        row.sample.label = static_cast<int>(it - pool.label_values.begin());
        pool.dimension = std::max(pool.dimension, row.sample.extent());
        pool.samples.push_back(std::move(row.sample));
    }
    return pool;
}

}  // namespace

LabeledPool parse_libsvm(std::istream& in, std::string_view source,
                         std::optional<int> num_classes) {
    auto rows = parse_rows(in, source);
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& r : rows) values.push_back(r.label);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const int distinct = static_cast<int>(values.size());
    if (num_classes && *num_classes < distinct) {
        throw DataError(std::string(source) + ": " + std::to_string(distinct) +
                        " distinct labels exceed num_classes=" + std::to_string(*num_classes));
    }
    return assemble(std::move(rows), std::move(values), num_classes.value_or(distinct), source);
}

LabeledPool parse_libsvm(std::istream& in, std::string_view source,
                         std::span<const double> label_values) {
    std::vector<double> values(label_values.begin(), label_values.end());
    if (!std::is_sorted(values.begin(), values.end())) {
        throw ArgumentError("label table must be sorted ascending");
    }
    return assemble(parse_rows(in, source), std::move(values), static_cast<int>(values.size()),
                    source);
}

LabeledPool load_libsvm(const std::filesystem::path& path, std::optional<int> num_classes) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_libsvm(in, path.string(), num_classes);
}

LabeledPool load_libsvm(const std::filesystem::path& path, std::span<const double> label_values) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_libsvm(in, path.string(), label_values);
}

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

void write_libsvm(std::ostream& out, std::span<const Sample> samples,
                  std::span<const double> label_values) {
    std::string line;
    for (const auto& s : samples) {
        line.clear();
        const int label = s.label.value_or(0);
        if (!label_values.empty() && s.label) {
            append_number(line, label_values[static_cast<std::size_t>(label)]);
        } else {
            line += std::to_string(label);
        }
        for (const auto& f : s.features) {
            line += ' ';
            line += std::to_string(static_cast<unsigned long long>(f.index) + 1);
            line += ':';
            append_number(line, f.value);
        }
        line += '\n';
        out << line;
    }
}

void write_libsvm(const std::filesystem::path& path, std::span<const Sample> samples,
                  std::span<const double> label_values) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_libsvm(out, samples, label_values);
}

// --- splitting ------------------------------------------------------------------------

SplitResult split(const LabeledPool& pool, const SplitSpec& spec) {
    if (pool.samples.empty()) throw ArgumentError("cannot split an empty pool");
    if (!(spec.labeled_fraction > 0.0 && spec.labeled_fraction <= 1.0)) {
        throw ArgumentError("labeled_fraction must lie in (0, 1]");
    }
    if (spec.per_class_minimum < 1) throw ArgumentError("per_class_minimum must be >= 1");

    const auto K = static_cast<std::size_t>(pool.num_classes);
    std::vector<std::vector<std::size_t>> by_class(K);
    for (std::size_t i = 0; i < pool.samples.size(); ++i) {
        const auto& lab = pool.samples[i].label;
        if (!lab || *lab < 0 || static_cast<std::size_t>(*lab) >= K) {
            throw DataError("pool sample " + std::to_string(i) + " has no valid label");
        }
        by_class[static_cast<std::size_t>(*lab)].push_back(i);
    }
    const auto minimum = static_cast<std::size_t>(spec.per_class_minimum);
    for (std::size_t k = 0; k < K; ++k) {
        if (by_class[k].size() < minimum) {
            throw SplitError("class " + std::to_string(k) + " has " +
                             std::to_string(by_class[k].size()) + " samples, fewer than " +
                             "per_class_minimum=" + std::to_string(minimum));
        }
    }

    const auto total = pool.samples.size();
    // ceil with a small guard so that e.g. 0.1 * 100 does not round up to 11.
    const auto target = std::min<std::size_t>(
        total, static_cast<std::size_t>(std::ceil(spec.labeled_fraction * double(total) - 1e-9)));
    if (target < minimum * K) {
        throw SplitError("labeled budget " + std::to_string(target) +
                         " cannot hold per_class_minimum=" + std::to_string(minimum) + " for " +
                         std::to_string(K) + " classes");
    }

    // Quotas: the minimum for every class, then the rest proportional to spare capacity.
    std::vector<std::size_t> quota(K, minimum);
    std::size_t spare_total = 0;
    for (std::size_t k = 0; k < K; ++k) spare_total += by_class[k].size() - minimum;
    const std::size_t extra = target - minimum * K;
    if (extra > 0) {
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t k = 0; k < K; ++k) {
            const double share =
                double(extra) * double(by_class[k].size() - minimum) / double(spare_total);
            const auto whole = static_cast<std::size_t>(std::floor(share));
            quota[k] += whole;
            assigned += whole;
            remainders.emplace_back(share - double(whole), k);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < extra; r = (r + 1) % K) {
            const auto k = remainders[r].second;
            if (quota[k] < by_class[k].size()) {
                ++quota[k];
                ++assigned;
            }
        }
    }

    auto rng = make_rng(spec.seed, stream::split);
    std::vector<char> is_labeled(total, 0);
    for (std::size_t k = 0; k < K; ++k) {
        auto members = by_class[k];
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i = 0; i < quota[k]; ++i) is_labeled[members[i]] = 1;
    }
    std::vector<std::size_t> labeled;
    for (std::size_t i = 0; i < total; ++i) {
        if (is_labeled[i]) labeled.push_back(i);
    }
    return split_from_indices(pool, labeled);
}

SplitResult split_from_indices(const LabeledPool& pool, std::span<const std::size_t> labeled) {
    SplitResult out;
    std::vector<char> is_labeled(pool.samples.size(), 0);
    for (const auto i : labeled) {
        if (i >= pool.samples.size()) throw ArgumentError("split index out of range");
        if (is_labeled[i]) throw ArgumentError("duplicate split index");
        is_labeled[i] = 1;
    }
    for (std::size_t i = 0; i < pool.samples.size(); ++i) {
        if (is_labeled[i]) {
            out.labeled.push_back(pool.samples[i]);
            out.labeled_indices.push_back(i);
        } else {
            Sample s = pool.samples[i];
            s.label.reset();
            out.unlabeled.push_back(std::move(s));
            out.unlabeled_indices.push_back(i);
        }
    }
    return out;
}

Dataset make_dataset(const LabeledPool& pool, SplitResult parts, std::vector<Sample> test) {
    Dataset ds;
    ds.labeled = std::move(parts.labeled);
    ds.unlabeled = std::move(parts.unlabeled);
    ds.test = std::move(test);
    ds.num_classes = pool.num_classes;
    ds.dimension = pool.dimension;
    for (const auto& s : ds.test) ds.dimension = std::max(ds.dimension, s.extent());
    ds.feature_radius = feature_radius(ds.labeled, ds.unlabeled);
    return ds;
}

std::vector<Sample> l2_normalize(std::span<const Sample> samples, std::string_view set_name) {
    std::vector<Sample> out(samples.begin(), samples.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double norm = out[i].norm();
        if (norm == 0.0) {
            throw DataError(std::string(set_name) + " " + std::to_string(i) + " has zero norm");
        }
        for (auto& f : out[i].features) f.value /= norm;
    }
    return out;
}

Dataset l2_normalize(const Dataset& ds) {
    Dataset out;
    out.labeled = l2_normalize(ds.labeled, "labeled sample");
    out.unlabeled = l2_normalize(ds.unlabeled, "unlabeled sample");
    out.test = l2_normalize(ds.test, "test sample");
    out.num_classes = ds.num_classes;
    out.dimension = ds.dimension;
    out.feature_radius = 1.0;
    return out;
}

// --- synthetic data -------------------------------------------------------------------

std::vector<std::vector<double>> blob_centers(int num_classes, double separation) {
    std::vector<std::vector<double>> centers;
    if (num_classes <= 0) return centers;
    if (num_classes == 1) return {{0.0, 0.0}};
    const double radius = separation / (2.0 * std::sin(std::numbers::pi / num_classes));
    for (int k = 0; k < num_classes; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / num_classes;
        centers.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    return centers;
}

LabeledPool make_synthetic_blobs(int num_classes, int per_class, double separation, double noise,
                                 std::uint64_t seed) {
    if (num_classes < 1) throw ArgumentError("num_classes must be >= 1");
    if (per_class < 0) throw ArgumentError("per_class must be >= 0");
    if (!(separation > 0.0)) throw ArgumentError("separation must be > 0");
    if (!(noise > 0.0)) throw ArgumentError("noise must be > 0");

    LabeledPool pool;
    pool.num_classes = num_classes;
    pool.label_values.resize(static_cast<std::size_t>(num_classes));
    std::iota(pool.label_values.begin(), pool.label_values.end(), 0.0);
    if (per_class == 0) return pool;

    pool.dimension = 2;
    const auto centers = blob_centers(num_classes, separation);
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, noise);
    for (int k = 0; k < num_classes; ++k) {
        for (int i = 0; i < per_class; ++i) {
            Sample s;
            const double x = centers[k][0] + gauss(rng);
            const double y = centers[k][1] + gauss(rng);
            if (x != 0.0) s.features.push_back({0, x});
            if (y != 0.0) s.features.push_back({1, y});
            s.label = k;
            pool.samples.push_back(std::move(s));
        }
    }
    return pool;
}

}  // namespace pms2l
