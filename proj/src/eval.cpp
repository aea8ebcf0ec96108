#include "pms2l/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "pms2l/bounds.hpp"
#include "pms2l/clustering.hpp"
#include "pms2l/confident.hpp"
#include "pms2l/error.hpp"
#include "pms2l/objective.hpp"
#include "pms2l/parallel.hpp"
#include "pms2l/rng.hpp"

namespace pms2l {

double accuracy(const LinearModel& model, std::span<const Sample> test) {
    if (test.empty()) throw ArgumentError("accuracy needs a nonempty test set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (!test[i].label) throw DataError("test sample " + std::to_string(i) + " has no label");
        if (predict(model, test[i]) == *test[i].label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 4 || b.size() < 4) throw ArgumentError("rank-sum test needs at least 4 values per group");
    struct Item {
        double value;
        bool first;
    };
    std::vector<Item> all;
    all.reserve(a.size() + b.size());
    for (const double v : a) all.push_back({v, true});
    for (const double v : b) all.push_back({v, false});
    for (const auto& it : all) {
        if (!std::isfinite(it.value)) throw ArgumentError("rank-sum test needs finite values");
    }
    std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

    const double N = static_cast<double>(all.size());
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].first) rank_sum_a += mid_rank;
        }
        i = j;
    }
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double U = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const double variance = n1 * n2 / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (!(variance > 0.0)) return 1.0;
    const double z = std::max(0.0, std::abs(U - n1 * n2 / 2.0) - 0.5) / std::sqrt(variance);
    return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

const char* method_name(Method m) {
    switch (m) {
        case Method::SUP: return "SUP";
        case Method::PMS2L: return "PMS2L";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "SUP" || name == "sup") return Method::SUP;
    if (name == "PMS2L" || name == "pms2l") return Method::PMS2L;
    throw ConfigError("unknown method '" + name + "' (expected SUP or PMS2L)");
}

ExperimentData load_experiment_data(const DataSource& source) {
    ExperimentData out;
    if (source.kind == DataSource::Kind::Synthetic) {
        out.pool = make_synthetic_blobs(source.num_classes, source.train_per_class, source.separation,
                                        source.noise, source.data_seed);
        out.test = make_synthetic_blobs(source.num_classes, source.test_per_class, source.separation,
                                        source.noise, derive_seed(source.data_seed, 1))
                       .samples;
    } else {
        if (source.train_path.empty() || source.test_path.empty()) {
            throw ConfigError("a LIBSVM data source needs both train and test paths");
        }
        out.pool = load_libsvm(source.train_path);
        out.test = load_libsvm(source.test_path, out.pool.label_values).samples;
    }
    if (source.normalize) {
        out.pool.samples = l2_normalize(out.pool.samples, "train");
        out.test = l2_normalize(out.test, "test");
    }
    return out;
}

namespace {

int cluster_count(const ExperimentConfig& cfg, int K) {
    return cfg.num_clusters > 0 ? cfg.num_clusters : 4 * K;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial) {
    return derive_seed(derive_seed(cfg.master_seed, stream::trial), static_cast<std::uint64_t>(trial));
}

SplitSpec split_spec(const ExperimentConfig& cfg, const LabeledPool& pool, std::uint64_t seed) {
    SplitSpec spec;
    spec.seed = seed;
    if (cfg.labels_per_class > 0) {
        spec.per_class_minimum = cfg.labels_per_class;
        spec.labeled_fraction = static_cast<double>(cfg.labels_per_class) * pool.num_classes /
                                static_cast<double>(pool.samples.size());
    } else {
        spec.per_class_minimum = cfg.per_class_minimum;
        spec.labeled_fraction = cfg.labeled_fraction;
    }
    return spec;
}

bool wants(const ExperimentConfig& cfg, Method m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

}  // namespace

std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, const ExperimentData& data, int trial,
                                   std::optional<double> L_hat) {
    const std::uint64_t seed = trial_seed(cfg, trial);
    const int K = data.pool.num_classes;
    const Dataset ds = make_dataset(data.pool, split(data.pool, split_spec(cfg, data.pool, derive_seed(seed, stream::split))),
                                    data.test);
    ds.validate();

    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seed, stream::folds);

    std::vector<TrialResult> out;
    for (const Method method : cfg.methods) {
        TrialResult r;
        r.trial = trial;
        r.method = method;
        r.trial_seed = seed;
        if (method == Method::SUP) {
            TrainConfig c = tc;
            if (cfg.select_budget) c.norm_budget = select_budget_supervised(ds, c);
            const auto model = fit_supervised(ds, c);
            r.norm_budget = model.norm_budget;
            r.test_accuracy = accuracy(model, ds.test);
            r.empirical_risk = PenalizedObjective::supervised(ds.labeled, K).risk(model, c.rho).total;
        } else {
            Clusterer clusterer;
            clusterer.num_clusters = cluster_count(cfg, K);
            clusterer.max_iters = cfg.kmeans_max_iters;
            clusterer.tolerance = cfg.kmeans_tolerance;
            clusterer.seed = derive_seed(seed, stream::cluster);
            const auto partition = fit_clusterer(ds.unlabeled, clusterer);
            const auto members = membership(partition, ds.labeled, ds.unlabeled);
            const auto confident = identify(members, ds.labeled, K, cfg.kappa, cfg.eta);

            TrainConfig c = tc;
            if (cfg.select_budget) c.norm_budget = select_budget(ds, partition, confident, c);
            const auto model = fit(ds, partition, confident, c);
            const PenalizedObjective objective(ds.labeled, members.labeled, ds.unlabeled, members.unlabeled,
                                               confident, K);
            const auto risk = objective.risk(model, c.rho);
            r.norm_budget = model.norm_budget;
            r.test_accuracy = accuracy(model, ds.test);
            r.empirical_risk = risk.total;
            r.n_eta = confident.n_eta;
            r.u_eta = confident.u_eta;
            if (cfg.compute_bound && L_hat) {
                const auto rad = estimate_rademacher(members, ds.labeled, ds.unlabeled, confident,
                                                     ds.feature_radius, model.norm_budget, cfg.mc_draws,
                                                     derive_seed(seed, stream::rademacher));
                BoundParams p;
                p.n = ds.n();
                p.u = ds.u();
                p.G = clusterer.num_clusters;
                p.K = K;
                p.kappa = cfg.kappa;
                p.rho = c.rho;
                p.delta = cfg.delta;
                p.L = *L_hat;
                p.n_eta = confident.n_eta;
                p.u_eta = confident.u_eta;
                p.R = ds.feature_radius;
                p.B = model.norm_budget;
                r.bound_total = theorem3_bound(risk, rad, p).total;
            }
        }
        out.push_back(r);
    }
    return out;
}

ExperimentSummary summarize(std::vector<TrialResult> results) {
    std::sort(results.begin(), results.end(), [](const TrialResult& a, const TrialResult& b) {
        return a.trial != b.trial ? a.trial < b.trial : a.method < b.method;
    });
    ExperimentSummary s;
    std::map<Method, std::vector<double>> acc;
    int violations = 0;
    for (const auto& r : results) {
        acc[r.method].push_back(r.test_accuracy);
        if (r.bound_total) {
            ++s.bound_trials;
            if (1.0 - r.test_accuracy > *r.bound_total) ++violations;
        }
    }
    for (const auto& [m, values] : acc) {
        MethodStats st;
        st.trials = static_cast<int>(values.size());
        double sum = 0.0;
        for (const double v : values) sum += v;
        st.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
            double sq = 0.0;
            for (const double v : values) sq += (v - st.mean) * (v - st.mean);
            st.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
        }
        s.per_method[m] = st;
    }
    const auto sup = acc.find(Method::SUP);
    const auto semi = acc.find(Method::PMS2L);
    if (sup != acc.end() && semi != acc.end() && sup->second.size() >= 4 && semi->second.size() >= 4) {
        s.p_value = wilcoxon_rank_sum(semi->second, sup->second);
    }
    s.bound_violation_rate = s.bound_trials > 0 ? static_cast<double>(violations) / s.bound_trials : 0.0;
    s.trials = std::move(results);
    return s;
}

double estimate_experiment_L(const ExperimentConfig& cfg, const ExperimentData& data) {
    const auto& pool = data.pool.samples;
    if (pool.size() < 4) throw DataError("stability estimate needs at least 4 pool samples");
    Clusterer clusterer;
    clusterer.num_clusters = cluster_count(cfg, data.pool.num_classes);
    clusterer.max_iters = cfg.kmeans_max_iters;
    clusterer.tolerance = cfg.kmeans_tolerance;
    clusterer.seed = derive_seed(cfg.master_seed, stream::cluster);
    const std::size_t sample_size = pool.size() / 2;
    const std::size_t eval_size = pool.size() - sample_size - 1;
    return estimate_bounded_difference(clusterer, pool, sample_size, eval_size, cfg.stability_trials,
                                       derive_seed(cfg.master_seed, stream::stability), cfg.jobs);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const ExperimentData& data) {
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.methods.empty()) throw ConfigError("no methods selected");
    cfg.train.validate();
    std::optional<double> L_hat = cfg.L;
    if (!L_hat && cfg.compute_bound && wants(cfg, Method::PMS2L)) L_hat = estimate_experiment_L(cfg, data);

    std::vector<std::vector<TrialResult>> per_trial(static_cast<std::size_t>(cfg.trials));
    parallel_for(per_trial.size(), cfg.jobs, [&](std::size_t t) {
        per_trial[t] = run_trial(cfg, data, static_cast<int>(t), L_hat);
    });
    std::vector<TrialResult> all;
    for (auto& v : per_trial) all.insert(all.end(), v.begin(), v.end());
    auto summary = summarize(std::move(all));
    summary.L_hat = L_hat;
    return summary;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, load_experiment_data(cfg.data));
}

std::vector<CurvePoint> run_learning_curve(const ExperimentConfig& cfg, const ExperimentData& data,
                                           std::span<const double> fractions) {
    std::vector<CurvePoint> out;
    for (const double f : fractions) {
        if (!(f > 0.0 && f < 1.0)) throw ConfigError("learning-curve fractions must lie in (0, 1)");
        ExperimentConfig c = cfg;
        c.labeled_fraction = f;
        c.labels_per_class = 0;
        c.compute_bound = false;
        const auto s = run_experiment(c, data);
        for (const auto& [m, st] : s.per_method) out.push_back({f, m, st.mean, st.stddev});
    }
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialResult> trials) {
    out << "method,seed,accuracy,bound,risk\n";
    for (const auto& r : trials) {
        out << method_name(r.method) << ',' << r.trial_seed << ',' << fmt(r.test_accuracy) << ','
            << (r.bound_total ? fmt(*r.bound_total) : std::string()) << ',' << fmt(r.empirical_risk) << '\n';
    }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "fraction,method,mean,std\n";
    for (const auto& p : curve) {
        out << fmt(p.fraction) << ',' << method_name(p.method) << ',' << fmt(p.mean) << ','
            << fmt(p.stddev) << '\n';
    }
}

}  // namespace pms2l
