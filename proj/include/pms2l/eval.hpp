#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pms2l/data.hpp"
#include "pms2l/model.hpp"
#include "pms2l/trainer.hpp"

namespace pms2l {

/// Fraction of samples whose predicted class equals the label.
double accuracy(const LinearModel& model, std::span<const Sample> test);

/// Two-sided Wilcoxon rank-sum p-value: normal approximation to the Mann-Whitney U statistic
/// with tie-corrected variance and a 0.5 continuity correction. Needs |a|, |b| >= 4.
double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

enum class Method { SUP, PMS2L };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct DataSource {
    enum class Kind { Synthetic, Libsvm };
    Kind kind = Kind::Synthetic;
    // synthetic blobs
    int num_classes = 4;
    int train_per_class = 105;
    int test_per_class = 250;
    double separation = 8.0;
    double noise = 1.0;
    std::uint64_t data_seed = 0;
    // LIBSVM files
    std::string train_path;
    std::string test_path;
    bool normalize = false;
};

struct ExperimentConfig {
    DataSource data;
    double labeled_fraction = 0.02;
    int labels_per_class = 0;  // > 0 overrides labeled_fraction with exactly this many per class
    int per_class_minimum = 1;
    int trials = 10;
    std::vector<Method> methods{Method::SUP, Method::PMS2L};
    std::uint64_t master_seed = 0;

    int num_clusters = 0;  // 0 means 4K
    int kmeans_max_iters = 100;
    double kmeans_tolerance = 1e-6;
    int kappa = 2;
    double eta = 1e-3;

    TrainConfig train;
    bool select_budget = true;

    bool compute_bound = true;
    double delta = 0.05;
    int mc_draws = 200;
    std::optional<double> L;  // fixed bounded-difference constant; estimated when absent
    int stability_trials = 20;

    unsigned jobs = 1;
};

struct TrialResult {
    int trial = 0;
    Method method = Method::SUP;
    std::uint64_t trial_seed = 0;
    double test_accuracy = 0.0;
    std::optional<double> bound_total;
    double empirical_risk = 0.0;
    double norm_budget = 0.0;
    std::size_t n_eta = 0;
    std::size_t u_eta = 0;
};

struct MethodStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    int trials = 0;
};

struct ExperimentSummary {
    std::map<Method, MethodStats> per_method;
    std::optional<double> p_value;  // SUP vs PMS2L; absent with fewer than 4 trials
    double bound_violation_rate = 0.0;
    int bound_trials = 0;
    std::optional<double> L_hat;
    std::vector<TrialResult> trials;  // sorted by (trial, method)
};

/// Training pool and test set for a data source. The test set stays fixed across trials; only
/// the labeled/unlabeled split of the pool is redrawn.
struct ExperimentData {
    LabeledPool pool;
    std::vector<Sample> test;
};
ExperimentData load_experiment_data(const DataSource& source);

/// One trial: split, cluster, identify confident clusters, train each method, evaluate.
std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, const ExperimentData& data,
                                   int trial, std::optional<double> L_hat);

/// Order-independent aggregation (results are sorted by trial index first).
ExperimentSummary summarize(std::vector<TrialResult> results);

/// Bounded-difference constant of the configured clusterer on the training pool.
double estimate_experiment_L(const ExperimentConfig& cfg, const ExperimentData& data);

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const ExperimentData& data);
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

struct CurvePoint {
    double fraction = 0.0;
    Method method = Method::SUP;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Accuracy vs labeled fraction, one experiment per grid point (bounds off).
std::vector<CurvePoint> run_learning_curve(const ExperimentConfig& cfg, const ExperimentData& data,
                                           std::span<const double> fractions);

void write_trials_csv(std::ostream& out, std::span<const TrialResult> trials);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace pms2l
