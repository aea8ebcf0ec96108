#include "commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "pms2l/bounds.hpp"
#include "pms2l/clustering.hpp"
#include "pms2l/confident.hpp"
#include "pms2l/data.hpp"
#include "pms2l/error.hpp"
#include "pms2l/eval.hpp"
#include "pms2l/objective.hpp"
#include "pms2l/rng.hpp"
#include "pms2l/serialize.hpp"
#include "pms2l/trainer.hpp"

namespace fs = std::filesystem;

namespace pms2l::cli {

namespace {

struct Common {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool describe = false;
    std::string config;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Master seed; fully determines all randomness");
    sub->add_option("--jobs", c.jobs, "Worker thread cap")->check(CLI::PositiveNumber);
    sub->add_option("--config", c.config,
                    "JSON object of flag values (keys are long flag names); flags given on the "
                    "command line override it");
    sub->add_flag("--describe", c.describe, "Print this command's parameter schema as JSON and exit");
}

void describe(const CLI::App* sub) {
    Json options = Json::array();
    for (const CLI::Option* opt : sub->get_options()) {
        const auto name = opt->get_name();
        if (name == "--help") continue;
        Json o;
        o["name"] = name;
        o["type"] = opt->get_type_name();
        o["flag"] = opt->get_items_expected_max() == 0;
        o["default"] = opt->get_default_str();
        o["description"] = opt->get_description();
        options.push_back(std::move(o));
    }
    Json j;
    j["command"] = sub->get_name();
    j["description"] = sub->get_description();
    j["options"] = std::move(options);
    std::cout << dump(j);
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw ArgumentError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

std::vector<Method> parse_methods(const std::string& text) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        out.push_back(parse_method(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

// An input artifact produced by an earlier stage; absence is a missing prerequisite.
Json require_artifact(const std::string& path, const char* stage, const char* what) {
    if (!fs::exists(path)) {
        throw MissingPrerequisite(stage, std::string(what) + " file '" + path + "' not found; run " + stage +
                                             " first");
    }
    return read_json_file(path);
}

std::string relative_to(const fs::path& target, const fs::path& base_dir) {
    return fs::relative(fs::absolute(target), fs::absolute(base_dir)).generic_string();
}

fs::path parent_dir(const std::string& file) {
    const auto p = fs::path(file).parent_path();
    return p.empty() ? fs::path(".") : p;
}

template <class T>
T get(const Json& j, const char* key, const std::string& file) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(file + " is missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(file + " has a malformed '" + key + "'");
    }
}

/// Rebuilds the dataset recorded by `split`: the same files, encoding, indices and scaling.
Dataset load_split(const std::string& path) {
    const Json j = require_artifact(path, "cmd_split", "split");
    const auto base = parent_dir(path);
    const auto label_values = get<std::vector<double>>(j, "label_values", path);
    auto pool = load_libsvm(base / get<std::string>(j, "train", path), label_values);
    auto test = load_libsvm(base / get<std::string>(j, "test", path), label_values).samples;
    const auto labeled = get<std::vector<std::size_t>>(j, "labeled_indices", path);
    auto parts = split_from_indices(pool, labeled);
    if (parts.unlabeled_indices != get<std::vector<std::size_t>>(j, "unlabeled_indices", path)) {
        throw DataError(path + ": unlabeled indices do not complement the labeled indices");
    }
    auto ds = make_dataset(pool, std::move(parts), std::move(test));
    if (get<bool>(j, "normalize", path)) ds = l2_normalize(ds);
    ds.validate();
    return ds;
}

Partition load_partition(const std::string& path, const Dataset& ds) {
    auto p = partition_from_json(require_artifact(path, "cmd_cluster", "partition"));
    if (p.assign.size() != ds.u()) {
        throw ConfigError("partition assigns " + std::to_string(p.assign.size()) +
                          " points but the split has u=" + std::to_string(ds.u()));
    }
    return p;
}

ConfidentClusterSet load_confident(const std::string& path, const Partition& partition) {
    auto c = confident_from_json(require_artifact(path, "cmd_confident", "confident-set"));
    if (c.num_clusters != partition.num_clusters) {
        throw ConfigError("confident set was built for G=" + std::to_string(c.num_clusters) +
                          ", partition has G=" + std::to_string(partition.num_clusters));
    }
    return c;
}

int default_clusters(int G, int K) { return G > 0 ? G : 4 * K; }

// --- synth ------------------------------------------------------------------------------

void add_synth(CLI::App& app) {
    struct Opts {
        Common common;
        int classes = 4;
        int per_class = 105;
        int test_per_class = 250;
        double separation = 8.0;
        double noise = 1.0;
        std::string train_out = "blobs_train.libsvm";
        std::string test_out = "blobs_test.libsvm";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("synth", "Write 2-D Gaussian blob train/test files in LIBSVM format");
    add_common(sub, o->common);
    sub->add_option("--classes", o->classes, "Number of classes K")->check(CLI::Range(2, 1000));
    sub->add_option("--per-class", o->per_class, "Training samples per class")->check(CLI::PositiveNumber);
    sub->add_option("--test-per-class", o->test_per_class, "Test samples per class")->check(CLI::PositiveNumber);
    sub->add_option("--separation", o->separation, "Distance between adjacent blob centers");
    sub->add_option("--noise", o->noise, "Per-coordinate standard deviation");
    sub->add_option("--train-out", o->train_out, "Training file to write");
    sub->add_option("--test-out", o->test_out, "Test file to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        const auto train = make_synthetic_blobs(o->classes, o->per_class, o->separation, o->noise, o->common.seed);
        const auto test = make_synthetic_blobs(o->classes, o->test_per_class, o->separation, o->noise,
                                               derive_seed(o->common.seed, 1));
        write_libsvm(o->train_out, train.samples, train.label_values);
        write_libsvm(o->test_out, test.samples, test.label_values);
    });
}

// --- split ------------------------------------------------------------------------------

void add_split(CLI::App& app) {
    struct Opts {
        Common common;
        std::string train;
        std::string test;
        double labeled_fraction = 0.1;
        int per_class_min = 1;
        int labels_per_class = 0;
        bool normalize = false;
        std::string out = "split.json";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("split", "Stratified labeled/unlabeled split of a LIBSVM training file");
    add_common(sub, o->common);
    sub->add_option("--train", o->train, "LIBSVM training pool");
    sub->add_option("--test", o->test, "LIBSVM test file (encoded with the training labels)");
    sub->add_option("--labeled-fraction", o->labeled_fraction, "Fraction of the pool kept labeled");
    sub->add_option("--per-class-min", o->per_class_min, "Minimum labeled samples per class");
    sub->add_option("--labels-per-class", o->labels_per_class,
                    "Exactly this many labeled samples per class (overrides --labeled-fraction)");
    sub->add_flag("--normalize,!--no-normalize", o->normalize, "Scale every sample to unit norm");
    sub->add_option("--out", o->out, "Split file to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        if (o->train.empty() || o->test.empty()) throw ArgumentError("split needs --train and --test");
        const auto pool = load_libsvm(o->train);
        auto test = load_libsvm(o->test, pool.label_values).samples;
        SplitSpec spec;
        spec.seed = derive_seed(o->common.seed, stream::split);
        if (o->labels_per_class > 0) {
            spec.per_class_minimum = o->labels_per_class;
            spec.labeled_fraction = static_cast<double>(o->labels_per_class) * pool.num_classes /
                                    static_cast<double>(pool.samples.size());
        } else {
            spec.per_class_minimum = o->per_class_min;
            spec.labeled_fraction = o->labeled_fraction;
        }
        auto parts = split(pool, spec);
        const auto labeled = parts.labeled_indices;
        const auto unlabeled = parts.unlabeled_indices;
        auto ds = make_dataset(pool, std::move(parts), std::move(test));
        if (o->normalize) ds = l2_normalize(ds);
        ds.validate();

        const auto base = parent_dir(o->out);
        Json j;
        j["train"] = relative_to(o->train, base);
        j["test"] = relative_to(o->test, base);
        j["normalize"] = o->normalize;
        j["labeled_fraction"] = spec.labeled_fraction;
        j["per_class_minimum"] = spec.per_class_minimum;
        j["seed"] = o->common.seed;
        j["label_values"] = pool.label_values;
        j["labeled_indices"] = labeled;
        j["unlabeled_indices"] = unlabeled;
        j["manifest"] = manifest_json(ds);
        write_json_file(o->out, j);
    });
}

// --- cluster ----------------------------------------------------------------------------

void add_cluster(CLI::App& app) {
    struct Opts {
        Common common;
        std::string split = "split.json";
        int G = 0;
        int max_iters = 100;
        double tolerance = 1e-6;
        std::string out = "partition.json";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("cluster", "Partition the unlabeled set with k-means");
    add_common(sub, o->common);
    sub->add_option("--split", o->split, "Split file from the split command");
    sub->add_option("--G", o->G, "Number of clusters (0 means 4K)");
    sub->add_option("--max-iters", o->max_iters, "Lloyd iteration cap");
    sub->add_option("--tolerance", o->tolerance, "Center movement below which Lloyd iterations stop");
    sub->add_option("--out", o->out, "Partition file to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        const auto ds = load_split(o->split);
        Clusterer cfg;
        cfg.num_clusters = default_clusters(o->G, ds.num_classes);
        cfg.max_iters = o->max_iters;
        cfg.tolerance = o->tolerance;
        cfg.seed = derive_seed(o->common.seed, stream::cluster);
        write_json_file(o->out, to_json(fit_clusterer(ds.unlabeled, cfg)));
    });
}

// --- confident --------------------------------------------------------------------------

void add_confident(CLI::App& app) {
    struct Opts {
        Common common;
        std::string split = "split.json";
        std::string partition = "partition.json";
        int kappa = 2;
        double eta = 1e-3;
        std::string out = "confident.json";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("confident", "Identify kappa-uniformly bounded clusters");
    add_common(sub, o->common);
    sub->add_option("--split", o->split, "Split file from the split command");
    sub->add_option("--partition", o->partition, "Partition file from the cluster command");
    sub->add_option("--kappa", o->kappa, "Predominant classes per cluster");
    sub->add_option("--eta", o->eta, "Violation level");
    sub->add_option("--out", o->out, "Confident-set file to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        const auto ds = load_split(o->split);
        const auto partition = load_partition(o->partition, ds);
        const auto set = identify(partition, ds.labeled, ds.unlabeled, ds.num_classes, o->kappa, o->eta);
        write_json_file(o->out, to_json(set));
    });
}

// --- train ------------------------------------------------------------------------------

void add_train(CLI::App& app) {
    struct Opts {
        Common common;
        std::string split = "split.json";
        std::string partition = "partition.json";
        std::string confident = "confident.json";
        TrainConfig train;
        bool select = false;
        bool supervised = false;
        std::string grid;
        std::string out = "model.json";
        std::string risk_out;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("train", "Fit the linear model by projected subgradient descent");
    add_common(sub, o->common);
    sub->add_option("--split", o->split, "Split file from the split command");
    sub->add_option("--partition", o->partition, "Partition file from the cluster command");
    sub->add_option("--confident", o->confident, "Confident-set file from the confident command");
    sub->add_option("--iterations", o->train.iterations, "Subgradient iterations T");
    sub->add_option("--step", o->train.step_scale, "Step scale c (step c/sqrt(t))");
    sub->add_option("--B", o->train.norm_budget, "Norm budget B");
    sub->add_option("--rho", o->train.rho, "Margin rho");
    sub->add_option("--folds", o->train.cv_folds, "Cross-validation folds for --select-budget");
    sub->add_option("--grid", o->grid, "Comma-separated budget grid (default: 9 points in [1e-2, 1e2])");
    sub->add_flag("--select-budget,!--no-select-budget", o->select, "Choose B by cross-validation");
    sub->add_flag("--supervised,!--no-supervised", o->supervised,
                  "Labeled term only (partition and confident set are not read)");
    sub->add_option("--out", o->out, "Model file to write");
    sub->add_option("--risk-out", o->risk_out, "Optional risk-breakdown file to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        const auto ds = load_split(o->split);
        TrainConfig cfg = o->train;
        cfg.seed = derive_seed(o->common.seed, stream::folds);
        if (!o->grid.empty()) cfg.budget_grid = parse_doubles(o->grid, "--grid");
        cfg.validate();

        LinearModel model;
        RiskBreakdown risk;
        if (o->supervised) {
            if (o->select) cfg.norm_budget = select_budget_supervised(ds, cfg, o->common.jobs);
            model = fit_supervised(ds, cfg);
            risk = PenalizedObjective::supervised(ds.labeled, ds.num_classes).risk(model, cfg.rho);
        } else {
            const auto partition = load_partition(o->partition, ds);
            const auto confident = load_confident(o->confident, partition);
            if (o->select) cfg.norm_budget = select_budget(ds, partition, confident, cfg, o->common.jobs);
            model = fit(ds, partition, confident, cfg);
            risk = penalized_risk(model, ds.labeled, ds.unlabeled, partition, confident, cfg.rho);
        }
        write_json_file(o->out, to_json(model));
        if (!o->risk_out.empty()) write_json_file(o->risk_out, to_json(risk));
    });
}

// --- stability --------------------------------------------------------------------------

void add_stability(CLI::App& app) {
    struct Opts {
        Common common;
        std::string split = "split.json";
        int G = 0;
        int max_iters = 100;
        double tolerance = 1e-6;
        std::size_t sample_size = 0;
        int trials = 20;
        std::string out = "stability.json";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("stability",
                                   "Estimate the clusterer's bounded-difference constant and stability");
    add_common(sub, o->common);
    sub->add_option("--split", o->split, "Split file from the split command");
    sub->add_option("--G", o->G, "Number of clusters (0 means 4K)");
    sub->add_option("--max-iters", o->max_iters, "Lloyd iteration cap");
    sub->add_option("--tolerance", o->tolerance, "Center movement below which Lloyd iterations stop");
    sub->add_option("--sample-size", o->sample_size, "Size of each refit sample (0 means half the pool)");
    sub->add_option("--trials", o->trials, "Perturbation trials");
    sub->add_option("--out", o->out, "Stability report to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        const auto ds = load_split(o->split);
        std::vector<Sample> pool = ds.labeled;
        pool.insert(pool.end(), ds.unlabeled.begin(), ds.unlabeled.end());
        Clusterer cfg;
        cfg.num_clusters = default_clusters(o->G, ds.num_classes);
        cfg.max_iters = o->max_iters;
        cfg.tolerance = o->tolerance;
        cfg.seed = derive_seed(o->common.seed, stream::cluster);
        const std::size_t m = o->sample_size > 0 ? o->sample_size : pool.size() / 2;
        if (m + 1 >= pool.size()) throw ArgumentError("--sample-size must leave room for an eval set");
        const auto seed = derive_seed(o->common.seed, stream::stability);
        const double L_hat =
            estimate_bounded_difference(cfg, pool, m, pool.size() - m - 1, o->trials, seed, o->common.jobs);
        const auto st = estimate_stability(cfg, pool, m, pool, o->trials, seed, o->common.jobs);
        auto j = stability_json(L_hat, st.delta_hat, o->trials);
        j["sample_size"] = m;
        j["G"] = cfg.num_clusters;
        write_json_file(o->out, j);
    });
}

// --- bound ------------------------------------------------------------------------------

void add_bound(CLI::App& app) {
    struct Opts {
        Common common;
        std::string split = "split.json";
        std::string partition = "partition.json";
        std::string confident = "confident.json";
        std::string model = "model.json";
        std::string stability = "stability.json";
        std::optional<double> L;
        double delta = 0.05;
        int mc_draws = 200;
        std::string variant = "theorem3";
        std::string out = "bound.json";
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("bound", "Evaluate the generalization bound of a trained model");
    add_common(sub, o->common);
    sub->add_option("--split", o->split, "Split file from the split command");
    sub->add_option("--partition", o->partition, "Partition file from the cluster command");
    sub->add_option("--confident", o->confident, "Confident-set file from the confident command");
    sub->add_option("--model", o->model, "Model file from the train command");
    sub->add_option("--stability", o->stability, "Stability report supplying L (ignored with --L)");
    sub->add_option("--L", o->L, "Bounded-difference constant L");
    sub->add_option("--delta", o->delta, "Confidence parameter delta");
    sub->add_option("--mc-draws", o->mc_draws, "Monte-Carlo sign draws per Rademacher estimate");
    sub->add_option("--variant", o->variant, "theorem3 or corollary4")
        ->check(CLI::IsMember({"theorem3", "corollary4"}));
    sub->add_option("--out", o->out, "Bound report to write");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        const auto ds = load_split(o->split);
        const auto partition = load_partition(o->partition, ds);
        const auto confident = load_confident(o->confident, partition);
        const auto model = model_from_json(require_artifact(o->model, "cmd_train", "model"));
        double L = 0.0;
        if (o->L) {
            L = *o->L;
        } else {
            L = get<double>(require_artifact(o->stability, "cmd_stability", "stability report"), "L_hat",
                            o->stability);
        }

        const auto members = membership(partition, ds.labeled, ds.unlabeled);
        const PenalizedObjective objective(ds.labeled, members.labeled, ds.unlabeled, members.unlabeled,
                                           confident, ds.num_classes);
        const auto risk = objective.risk(model, model.rho);
        BoundParams p;
        p.n = ds.n();
        p.u = ds.u();
        p.G = partition.num_clusters;
        p.K = ds.num_classes;
        p.kappa = confident.kappa;
        p.rho = model.rho;
        p.delta = o->delta;
        p.L = L;
        p.n_eta = confident.n_eta;
        p.u_eta = confident.u_eta;
        p.R = ds.feature_radius;
        p.B = model.norm_budget;

        BoundReport report;
        Json rad_json = nullptr;
        if (o->variant == "corollary4") {
            report = corollary4_bound(risk, p);
        } else {
            const auto rad = estimate_rademacher(members, ds.labeled, ds.unlabeled, confident, p.R, p.B,
                                                 o->mc_draws, derive_seed(o->common.seed, stream::rademacher));
            report = theorem3_bound(risk, rad, p);
            rad_json = to_json(rad);
        }
        add_cluster_diagnostics(report, risk, confident);
        auto j = to_json(report);
        j["rademacher"] = std::move(rad_json);
        j["risk"] = to_json(risk);
        j["eta_from_stability"] = eta_from_stability(L, p.n, p.u, p.delta);
        write_json_file(o->out, j);
    });
}

// --- experiment -------------------------------------------------------------------------

void add_experiment(CLI::App& app) {
    struct Opts {
        Common common;
        ExperimentConfig cfg;
        std::string train;
        std::string test;
        std::string methods = "SUP,PMS2L";
        std::string grid;
        bool no_select = false;
        bool no_bound = false;
        std::optional<double> L;
        std::string curve_fractions;
        std::string out = "summary.json";
        std::string trials_csv;
        std::string curve_csv;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("experiment", "Repeated SUP vs PMS2L trials with significance and bounds");
    add_common(sub, o->common);
    auto& c = o->cfg;
    sub->add_option("--train", o->train, "LIBSVM training pool (omit for synthetic blobs)");
    sub->add_option("--test", o->test, "LIBSVM test file");
    sub->add_option("--classes", c.data.num_classes, "Synthetic: number of classes");
    sub->add_option("--per-class", c.data.train_per_class, "Synthetic: training samples per class");
    sub->add_option("--test-per-class", c.data.test_per_class, "Synthetic: test samples per class");
    sub->add_option("--separation", c.data.separation, "Synthetic: adjacent center distance");
    sub->add_option("--noise", c.data.noise, "Synthetic: per-coordinate standard deviation");
    sub->add_option("--data-seed", c.data.data_seed, "Synthetic: generator seed");
    sub->add_flag("--normalize,!--no-normalize", c.data.normalize, "Scale every sample to unit norm");
    sub->add_option("--labeled-fraction", c.labeled_fraction, "Fraction of the pool kept labeled");
    sub->add_option("--labels-per-class", c.labels_per_class,
                    "Exactly this many labeled samples per class (overrides --labeled-fraction)");
    sub->add_option("--per-class-min", c.per_class_minimum, "Minimum labeled samples per class");
    sub->add_option("--trials", c.trials, "Number of trials");
    sub->add_option("--methods", o->methods, "Comma-separated methods (SUP, PMS2L)");
    sub->add_option("--G", c.num_clusters, "Number of clusters (0 means 4K)");
    sub->add_option("--max-iters", c.kmeans_max_iters, "Lloyd iteration cap");
    sub->add_option("--tolerance", c.kmeans_tolerance, "Center movement below which Lloyd iterations stop");
    sub->add_option("--kappa", c.kappa, "Predominant classes per cluster");
    sub->add_option("--eta", c.eta, "Violation level");
    sub->add_option("--iterations", c.train.iterations, "Subgradient iterations T");
    sub->add_option("--step", c.train.step_scale, "Step scale c (step c/sqrt(t))");
    sub->add_option("--B", c.train.norm_budget, "Norm budget when --no-select-budget is given");
    sub->add_option("--rho", c.train.rho, "Margin rho");
    sub->add_option("--folds", c.train.cv_folds, "Cross-validation folds");
    sub->add_option("--grid", o->grid, "Comma-separated budget grid (default: 9 points in [1e-2, 1e2])");
    sub->add_flag("--no-select-budget", o->no_select, "Use --B instead of cross-validation");
    sub->add_flag("--no-bound", o->no_bound, "Skip the bound and its stability estimate");
    sub->add_option("--L", o->L, "Fixed bounded-difference constant (estimated when omitted)");
    sub->add_option("--delta", c.delta, "Confidence parameter delta");
    sub->add_option("--mc-draws", c.mc_draws, "Monte-Carlo sign draws per Rademacher estimate");
    sub->add_option("--stability-trials", c.stability_trials, "Perturbation trials for L");
    sub->add_option("--curve-fractions", o->curve_fractions,
                    "Comma-separated labeled fractions for a learning curve");
    sub->add_option("--out", o->out, "Summary file to write");
    sub->add_option("--trials-csv", o->trials_csv, "Optional per-trial CSV");
    sub->add_option("--curve-csv", o->curve_csv, "Learning-curve CSV (needs --curve-fractions)");
    sub->callback([o, sub] {
        if (o->common.describe) return describe(sub);
        auto cfg = o->cfg;
        if (!o->train.empty() || !o->test.empty()) {
            cfg.data.kind = DataSource::Kind::Libsvm;
            cfg.data.train_path = o->train;
            cfg.data.test_path = o->test;
        }
        cfg.methods = parse_methods(o->methods);
        if (!o->grid.empty()) cfg.train.budget_grid = parse_doubles(o->grid, "--grid");
        cfg.select_budget = !o->no_select;
        cfg.compute_bound = !o->no_bound;
        cfg.L = o->L;
        cfg.master_seed = o->common.seed;
        cfg.jobs = o->common.jobs;
        if (!o->curve_csv.empty() && o->curve_fractions.empty()) {
            throw ArgumentError("--curve-csv needs --curve-fractions");
        }

        const auto data = load_experiment_data(cfg.data);
        const auto summary = run_experiment(cfg, data);
        Json j;
        j["config"] = to_json(cfg);
        const Json body = to_json(summary);
        for (const auto& [k, v] : body.items()) j[k] = v;
        write_json_file(o->out, j);
        if (!o->trials_csv.empty()) {
            std::ofstream out(o->trials_csv, std::ios::binary);
            if (!out) throw DataError("cannot write " + o->trials_csv);
            write_trials_csv(out, summary.trials);
        }
        if (!o->curve_fractions.empty()) {
            const auto fractions = parse_doubles(o->curve_fractions, "--curve-fractions");
            const auto curve = run_learning_curve(cfg, data, fractions);
            const auto path = o->curve_csv.empty() ? std::string("curve.csv") : o->curve_csv;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw DataError("cannot write " + path);
            write_curve_csv(out, curve);
        }
    });
}

}  // namespace

void register_commands(CLI::App& app) {
    add_synth(app);
    add_split(app);
    add_cluster(app);
    add_confident(app);
    add_train(app);
    add_stability(app);
    add_bound(app);
    add_experiment(app);
}

}  // namespace pms2l::cli
