// Acceptance runner: one line per criterion, "[PASS] name: detail" or "[FAIL] name: detail".
// With a criterion name as argument only that one runs. Exit status is 0 when everything that
// ran passed, 1 on any failure, and 77 when nothing failed outright but a criterion could not
// run for lack of an external dataset.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "instances.hpp"
#include "oracles.hpp"
#include "pms2l/assignment.hpp"
#include "pms2l/bounds.hpp"
#include "pms2l/clustering.hpp"
#include "pms2l/eval.hpp"
#include "pms2l/objective.hpp"

namespace fs = std::filesystem;
using namespace pms2l;

namespace {

enum class Outcome { Pass, Fail, Blocked };

struct Result {
    Outcome outcome = Outcome::Fail;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

Result verdict(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int G) {
    std::uniform_int_distribution<int> pick(0, G - 1);
    std::vector<int> out(n);
    for (auto& x : out) x = pick(rng);
    return out;
}

// --- criteria -----------------------------------------------------------------------------

Result metric_suite() {
    Stopwatch clock;
    std::mt19937_64 rng(1);
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
        const int G = 1 + static_cast<int>(rng() % 6);
        const auto a = random_labels(rng, 50, G);
        const auto b = random_labels(rng, 50, G);
        const auto c = random_labels(rng, 50, G);
        const double ab = minimal_matching_distance(a, b);
        const double ba = minimal_matching_distance(b, a);
        const double ac = minimal_matching_distance(a, c);
        const double cb = minimal_matching_distance(c, b);
        if (minimal_matching_distance(a, a) != 0.0) ++violations;       // identity
        if (ab < 0.0) ++violations;                                       // nonnegativity
        if ((ab == 0.0) != oracle::same_partition(a, b)) ++violations;   // indiscernibles
        if (ab != ba) ++violations;                                       // symmetry
        // disagreement counts over 50 points are integers; compare them exactly
        if (std::llround(ab * 50) > std::llround(ac * 50) + std::llround(cb * 50)) ++violations;
    }
    const double s = clock.seconds();
    return verdict(violations == 0 && s < 5.0,
                   std::to_string(violations) + " axiom violations over 1000 triples, " + num(s, 3) + " s");
}

Result assignment_oracle() {
    Stopwatch clock;
    std::mt19937_64 rng(2);
    int mismatches = 0;
    for (int t = 0; t < 500; ++t) {
        const int G = 1 + static_cast<int>(rng() % 6);
        const std::size_t n = 10 + rng() % 91;
        const auto a = random_labels(rng, n, G);
        const auto b = random_labels(rng, n, G);
        if (minimal_matching_distance(a, b) != oracle::matching_distance(a, b)) ++mismatches;
    }
    const double s = clock.seconds();
    return verdict(mismatches == 0 && s < 10.0,
                   std::to_string(mismatches) + " mismatches over 500 pairs, " + num(s, 3) + " s");
}

Result loss_margin_values() {
    const std::vector<double> s{2.0, 0.5, -1.0};
    struct Case {
        const char* name;
        double got;
        double want;
    };
    const std::vector<Case> cases{
        {"margin y=0", margin(s, 0), 1.5},
        {"margin y=1", margin(s, 1), -1.5},
        {"margin equal scores", margin(std::vector<double>{3.0, 3.0, 3.0}, 1), 0.0},
        {"unlabeled {0,1}", unlabeled_margin(s, std::vector<int>{0, 1}), 3.0},
        {"unlabeled zeros", unlabeled_margin(std::vector<double>{0, 0, 0}, std::vector<int>{1}), 0.0},
        {"unlabeled {0}", unlabeled_margin(std::vector<double>{1, 5, 2}, std::vector<int>{0}), -4.0},
        {"ramp -0.5", phi_rho(-0.5, 1.0), 1.0},
        {"ramp 0.25", phi_rho(0.25, 1.0), 0.75},
        {"ramp 1.5", phi_rho(1.5, 1.0), 0.0},
    };
    std::string bad;
    for (const auto& c : cases) {
        if (c.got != c.want) bad += std::string(bad.empty() ? "" : "; ") + c.name + " = " + num(c.got, 17);
    }
    return verdict(bad.empty(), bad.empty() ? std::to_string(cases.size()) + " hand values exact" : bad);
}

Result subgradient_check() {
    std::mt19937_64 rng(3);
    int checked = 0;
    double worst = 0.0;
    while (checked < 100) {
        const auto in = instances::random_instance(rng);
        const auto m = instances::random_model(rng, in.K, in.d, 0.4);
        if (!instances::away_from_kinks(in, m, 1.0, 1e-3)) continue;
        worst = std::max(worst, instances::subgradient_error(in, m, 1.0));
        ++checked;
    }
    return verdict(worst < 1e-4, "worst relative error " + num(worst, 3) + " over 100 instances");
}

Result rademacher_exactness() {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    int above_closed_form = 0;
    int outside_3se = 0;
    double worst_rerun_z = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = 1 + rng() % 12;
        const std::size_t d = 1 + rng() % 5;
        std::vector<std::vector<double>> xs(m, std::vector<double>(d));
        std::vector<Sample> samples;
        double R = 0.0;
        for (auto& x : xs) {
            double sq = 0.0;
            for (auto& v : x) {
                v = g(rng);
                sq += v * v;
            }
            R = std::max(R, std::sqrt(sq));
            samples.push_back(oracle::sample(x));
        }
        const std::size_t normalizer = m + rng() % 20;
        const double B = 0.25 + static_cast<double>(rng() % 8) * 0.5;
        const double exact = oracle::exact_rademacher(xs, normalizer, B);
        if (exact > closed_form_rademacher(1, m, normalizer, R, B)) ++above_closed_form;
        const auto mc = mc_rademacher_linear(samples, normalizer, B, 200, static_cast<std::uint64_t>(t));
        // a single sample makes every draw identical, so only rounding separates the two values
        const double rounding = 1e-12 * std::abs(exact);
        if (std::abs(mc.value - exact) > 3.0 * mc.standard_error + rounding) {
            ++outside_3se;
            // rerun the miss with many more draws to tell chance from bias
            const auto big = mc_rademacher_linear(samples, normalizer, B, 100000, static_cast<std::uint64_t>(t) + 1000);
            worst_rerun_z = std::max(worst_rerun_z, std::abs(big.value - exact) / big.standard_error);
        }
    }
    std::string detail = std::to_string(above_closed_form) + " exact values above the closed form, " +
                         std::to_string(outside_3se) + "/100 estimates outside 3 standard errors";
    if (outside_3se > 0) detail += ", largest |z| after 100000-draw rerun " + num(worst_rerun_z, 3);
    return verdict(above_closed_form == 0 && outside_3se == 0, detail);
}

Result bound_arithmetic() {
    BoundParams p;
    p.n = 100;
    p.u = 1000;
    p.G = 10;
    p.K = 5;
    p.kappa = 2;
    p.delta = 0.05;
    p.L = 1.0;
    p.n_eta = 90;
    p.u_eta = 900;
    const auto t3 = theorem3_bound(RiskBreakdown{}, RademacherEstimates{}, p);
    const auto c4 = corollary4_bound(RiskBreakdown{}, p);
    struct Case {
        const char* name;
        double got;
        double want;
    };
    const std::vector<Case> cases{
        {"1/s*", t3.inv_s_star, 2.0 * 10.0 / 99.0 + 10.0 / 999.0},
        {"1/t*", t3.inv_t_star, 1.0 / 1000.0 + 1.0 / 100.0},
        {"1/v*", t3.inv_v_star, 0.009 + 0.0925},
        {"Q", c4.k_star_sq_over_v_star, 0.225 + 0.36 + 0.025},
        {"kernel Rademacher term", c4.rademacher_term, 2.0 * std::sqrt(3.0 * 0.61)},
    };
    double worst = 0.0;
    std::string bad;
    for (const auto& c : cases) {
        const double rel = std::abs(c.got - c.want) / std::abs(c.want);
        worst = std::max(worst, rel);
        if (!(rel <= 1e-9)) bad += std::string(" ") + c.name;
    }
    return verdict(bad.empty(), "worst relative error " + num(worst, 3) + (bad.empty() ? "" : ", off:" + bad));
}

ExperimentConfig synthetic_config() {
    ExperimentConfig cfg;  // K=4 blobs, separation 8, noise 1, 105 per class
    cfg.labels_per_class = 5;  // 20 labeled, 400 unlabeled
    cfg.trials = 10;
    cfg.compute_bound = false;
    return cfg;
}

Result synthetic_experiment() {
    Stopwatch clock;
    const auto cfg = synthetic_config();
    const auto s = run_experiment(cfg);
    const double sup = s.per_method.at(Method::SUP).mean;
    const double semi = s.per_method.at(Method::PMS2L).mean;
    const double p = s.p_value.value_or(1.0);
    const double secs = clock.seconds();
    return verdict(semi - sup >= 0.03 && p < 0.05 && secs < 120.0,
                   "SUP " + num(sup) + ", PMS2L " + num(semi) + ", gain " + num(semi - sup) + ", p " + num(p) +
                       ", " + num(secs, 3) + " s");
}

std::string usps_path(const char* env, const char* fallback) {
    if (const char* v = std::getenv(env); v && *v) return v;
    const auto p = fs::path(PMS2L_DATA_DIR) / fallback;
    return fs::exists(p) ? p.string() : std::string();
}

Result usps_regression() {
    const auto train = usps_path("PMS2L_USPS_TRAIN", "usps");
    const auto test = usps_path("PMS2L_USPS_TEST", "usps.t");
    if (train.empty() || test.empty()) {
        return {Outcome::Blocked,
                "USPS LIBSVM files not found (set PMS2L_USPS_TRAIN and PMS2L_USPS_TEST or place "
                "data/usps and data/usps.t)"};
    }
    Stopwatch clock;
    ExperimentConfig cfg;
    cfg.data.kind = DataSource::Kind::Libsvm;
    cfg.data.train_path = train;
    cfg.data.test_path = test;
    cfg.labeled_fraction = 0.02;
    cfg.trials = 10;
    cfg.compute_bound = false;
    const auto s = run_experiment(cfg);
    const double sup = s.per_method.at(Method::SUP).mean;
    const double semi = s.per_method.at(Method::PMS2L).mean;
    const double secs = clock.seconds();
    const bool ok = semi >= sup + 0.01 && std::abs(sup - 0.790) <= 0.08 && std::abs(semi - 0.821) <= 0.08 &&
                    secs < 900.0;
    return verdict(ok, "SUP " + num(sup) + ", PMS2L " + num(semi) + ", " + num(secs, 3) + " s");
}

Result bound_sanity() {
    auto cfg = synthetic_config();
    cfg.trials = 50;
    cfg.methods = {Method::PMS2L};
    cfg.compute_bound = true;
    cfg.delta = 0.05;
    const auto s = run_experiment(cfg);
    double min_bound = INFINITY;
    for (const auto& t : s.trials) {
        if (t.bound_total) min_bound = std::min(min_bound, *t.bound_total);
    }
    return verdict(s.bound_trials == 50 && s.bound_violation_rate <= 0.15,
                   "violation rate " + num(s.bound_violation_rate) + " over " + std::to_string(s.bound_trials) +
                       " trials, L_hat " + num(s.L_hat.value_or(-1.0)) + ", smallest bound " + num(min_bound));
}

// --- determinism through the command-line tool --------------------------------------------

int shell(const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" PMS2L_BIN "' " + args + " >/dev/null 2>.stderr";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result determinism() {
    const auto base = fs::temp_directory_path() / ("pms2l_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    const std::vector<std::string> commands{
        "synth --seed 5 --per-class 60 --test-per-class 40",
        "split --seed 5 --train blobs_train.libsvm --test blobs_test.libsvm --labels-per-class 5",
        "cluster --seed 5",
        "confident --seed 5",
        "train --seed 5 --select-budget --iterations 200",
        "stability --seed 5 --trials 10",
        "bound --seed 5",
        "bound --seed 5 --variant corollary4 --out bound_c4.json",
        "experiment --seed 5 --per-class 40 --labels-per-class 5 --trials 3 --iterations 100 --stability-trials 4 "
        "--mc-draws 40 --trials-csv trials.csv --curve-fractions 0.3 --curve-csv curve.csv",
    };
    std::string problem;
    std::vector<fs::path> dirs{base / "a", base / "b"};
    for (const auto& d : dirs) {
        fs::create_directories(d);
        for (const auto& c : commands) {
            if (const int code = shell(d, c); code != 0) {
                problem = "'" + c + "' exited " + std::to_string(code) + ": " + slurp(d / ".stderr");
                break;
            }
        }
        if (!problem.empty()) break;
    }
    std::size_t compared = 0;
    if (problem.empty()) {
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            const auto name = entry.path().filename();
            if (name == ".stderr") continue;
            ++compared;
            if (slurp(entry.path()) != slurp(dirs[1] / name)) problem += " " + name.string();
        }
        if (!problem.empty()) problem = "artifacts differ:" + problem;
    }
    fs::remove_all(base);
    return verdict(problem.empty() && compared >= 12,
                   problem.empty() ? std::to_string(compared) + " artifacts byte-identical across two runs of " +
                                         std::to_string(commands.size()) + " commands"
                                   : problem);
}

struct Criterion {
    const char* name;
    std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"metric_suite", metric_suite},
        {"assignment_oracle", assignment_oracle},
        {"loss_margin_values", loss_margin_values},
        {"subgradient_check", subgradient_check},
        {"rademacher_exactness", rademacher_exactness},
        {"bound_arithmetic", bound_arithmetic},
        {"synthetic_experiment", synthetic_experiment},
        {"usps_regression", usps_regression},
        {"bound_sanity", bound_sanity},
        {"determinism", determinism},
    };
    const std::string only = argc > 1 ? argv[1] : "";
    bool any_run = false, any_fail = false, any_blocked = false;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.name) continue;
        any_run = true;
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {Outcome::Fail, std::string("threw: ") + e.what()};
        }
        // a blocked criterion has not passed; it reports FAIL and exits 77 so ctest lists it as skipped
        std::cout << (r.outcome == Outcome::Pass ? "[PASS] " : "[FAIL] ") << c.name << ": "
                  << (r.outcome == Outcome::Blocked ? "blocked, " : "") << r.detail << std::endl;
        any_fail |= r.outcome == Outcome::Fail;
        any_blocked |= r.outcome == Outcome::Blocked;
    }
    if (!any_run) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    if (any_fail) return 1;
    return any_blocked ? 77 : 0;
}
