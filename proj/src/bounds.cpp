#include "pms2l/bounds.hpp"

#include <cmath>
#include <string>

#include "pms2l/error.hpp"
#include "pms2l/rng.hpp"

namespace pms2l {

MonteCarloEstimate mc_rademacher_linear(std::span<const Sample* const> samples,
                                        std::size_t normalizer, double norm_budget, int draws,
                                        std::uint64_t seed) {
    if (draws < 1) throw ArgumentError("Rademacher estimate needs draws >= 1");
    if (!(norm_budget > 0.0)) throw ArgumentError("norm budget must be > 0");
    MonteCarloEstimate est;
    est.draws = draws;
    if (samples.empty()) return est;
    if (normalizer == 0) throw ArgumentError("normalizer must be >= 1");

    std::size_t dim = 0;
    for (const auto* s : samples) dim = std::max(dim, s->extent());
    std::vector<double> acc(dim);
    auto rng = make_rng(seed, stream::rademacher);
    const double scale = 2.0 * norm_budget / static_cast<double>(normalizer);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < draws; ++r) {
        std::fill(acc.begin(), acc.end(), 0.0);
        std::uint64_t bits = 0;
        int left = 0;
        for (const auto* s : samples) {
            if (left == 0) {
                bits = rng();
                left = 64;
            }
            const double sigma = (bits & 1U) ? 1.0 : -1.0;
            bits >>= 1U;
            --left;
            for (const auto& f : s->features) acc[f.index] += sigma * f.value;
        }
        double sq = 0.0;
        for (const double a : acc) sq += a * a;
        const double value = scale * std::sqrt(sq);
        sum += value;
        sum_sq += value * value;
    }
    est.value = sum / draws;
    if (draws > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / draws) / (draws - 1));
        est.standard_error = std::sqrt(var / draws);
    }
    return est;
}

MonteCarloEstimate mc_rademacher_linear(std::span<const Sample> samples, std::size_t normalizer,
                                        double norm_budget, int draws, std::uint64_t seed) {
    std::vector<const Sample*> ptrs;
    ptrs.reserve(samples.size());
    for (const auto& s : samples) ptrs.push_back(&s);
    return mc_rademacher_linear(std::span<const Sample* const>(ptrs), normalizer, norm_budget,
                                draws, seed);
}

double closed_form_rademacher(int num_clusters, std::size_t count, std::size_t normalizer,
                              double radius, double norm_budget) {
    if (count == 0) return 0.0;
    if (normalizer == 0) throw ArgumentError("normalizer must be >= 1");
    const double nz = static_cast<double>(normalizer);
    return 2.0 * radius * norm_budget *
           std::sqrt(static_cast<double>(num_clusters) * static_cast<double>(count) / (nz * nz));
}

double closed_form_rademacher_per_cluster(std::span<const std::size_t> counts,
                                          std::size_t normalizer, double radius,
                                          double norm_budget) {
    if (normalizer == 0) throw ArgumentError("normalizer must be >= 1");
    double s = 0.0;
    for (const auto c : counts) s += std::sqrt(static_cast<double>(c));
    return 2.0 / static_cast<double>(normalizer) * radius * norm_budget * s;
}

RademacherEstimates estimate_rademacher(const ClusterMembership& members,
                                        std::span<const Sample> labeled,
                                        std::span<const Sample> unlabeled,
                                        const ConfidentClusterSet& confident, double radius,
                                        double norm_budget, int draws, std::uint64_t seed) {
    const std::size_t n = labeled.size();
    const std::size_t u = unlabeled.size();
    std::vector<int> slot_of(static_cast<std::size_t>(members.num_clusters), -1);
    for (std::size_t s = 0; s < confident.clusters.size(); ++s) {
        slot_of[static_cast<std::size_t>(confident.clusters[s].cluster_id)] = static_cast<int>(s);
    }
    const auto slots = confident.clusters.size();
    std::vector<std::vector<const Sample*>> lab_in(slots), unl_in(slots);
    std::vector<const Sample*> lab_out;
    for (std::size_t i = 0; i < n; ++i) {
        const int s = slot_of[static_cast<std::size_t>(members.labeled[i])];
        (s >= 0 ? lab_in[static_cast<std::size_t>(s)] : lab_out).push_back(&labeled[i]);
    }
    for (std::size_t i = 0; i < u; ++i) {
        const int s = slot_of[static_cast<std::size_t>(members.unlabeled[i])];
        if (s >= 0) unl_in[static_cast<std::size_t>(s)].push_back(&unlabeled[i]);
    }

    RademacherEstimates out;
    out.mc_draws = draws;
    double var_n = 0.0, var_u = 0.0;
    for (std::size_t s = 0; s < slots; ++s) {
        const auto en = mc_rademacher_linear(std::span<const Sample* const>(lab_in[s]), n, norm_budget,
                                             draws, derive_seed(seed, 2 * s));
        const auto eu = mc_rademacher_linear(std::span<const Sample* const>(unl_in[s]), u, norm_budget,
                                             draws, derive_seed(seed, 2 * s + 1));
        out.r_star_n += en.value;
        out.r_star_u += eu.value;
        var_n += en.standard_error * en.standard_error;
        var_u += eu.standard_error * eu.standard_error;
    }
    const auto eo = mc_rademacher_linear(std::span<const Sample* const>(lab_out), n, norm_budget,
                                         draws, derive_seed(seed, 2 * slots));
    out.r_n = eo.value;
    out.se_r_star_n = std::sqrt(var_n);
    out.se_r_star_u = std::sqrt(var_u);
    out.se_r_n = eo.standard_error;

    const int G = confident.num_clusters;
    out.closed_form_r_star_n = closed_form_rademacher(G, confident.n_eta, n, radius, norm_budget);
    out.closed_form_r_star_u = closed_form_rademacher(G, confident.u_eta, u, radius, norm_budget);
    out.closed_form_r_n = closed_form_rademacher(1, n - confident.n_eta, n, radius, norm_budget);
    return out;
}

namespace {

void check_params(const BoundParams& p) {
    if (!(p.delta > 0.0 && p.delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
    if (p.n < 2 || p.u < 2) throw ArgumentError("n and u must be >= 2");
    if (p.G < 1 || p.K < 2 || p.kappa < 1) throw ArgumentError("need G >= 1, K >= 2, kappa >= 1");
    if (!(p.rho > 0.0)) throw ArgumentError("rho must be > 0");
    if (!(p.L >= 0.0)) throw ArgumentError("L must be >= 0");
    if (p.n_eta > p.n || p.u_eta > p.u) throw ArgumentError("n_eta/u_eta exceed n/u");
}

// Terms shared by both variants: stability, s*, t*, v* and their concentration terms.
BoundReport common_terms(const RiskBreakdown& risk, const BoundParams& p) {
    check_params(p);
    BoundReport r;
    r.inputs = p;
    const double n = static_cast<double>(p.n);
    const double u = static_cast<double>(p.u);
    const double G = p.G;
    const double K = p.K;
    const double kappa = p.kappa;
    const double n_eta = static_cast<double>(p.n_eta);
    const double u_eta = static_cast<double>(p.u_eta);

    r.empirical_risk = risk.total;
    r.stability_term = p.L / u;
    r.inv_s_star = 2.0 * G / (n - 1.0) + G / (u - 1.0);
    r.inv_s_star_no_g = 2.0 / (n - 1.0) + 1.0 / (u - 1.0);
    r.inv_t_star = p.L * p.L / u + 1.0 / n;
    r.inv_v_star = G * kappa * u_eta / (2.0 * u * u) + (G * kappa * n_eta + K * (n - n_eta)) / (2.0 * n * n);
    r.k_star_sq_over_v_star =
        K * K * G * u_eta / (u * u) + kappa * kappa * G * n_eta / (n * n) + K * K * (n - n_eta) / (n * n);
    r.s_term = 7.0 * G * std::log(14.0 * G / p.delta) * r.inv_s_star / 3.0;
    r.t_term = std::sqrt(std::log(14.0 / p.delta) * r.inv_t_star);
    r.rate_diagnostic = rate_diagnostic(p.n, p.u, p.K);
    return r;
}

double rademacher_combination(double r_star_u, double r_n, double r_star_n, const BoundParams& p) {
    return 2.0 * p.K / p.rho * (r_star_u + r_n) + 2.0 * p.kappa / p.rho * r_star_n;
}

double closed_form_combination(const BoundParams& p) {
    const double r_star_n = closed_form_rademacher(p.G, p.n_eta, p.n, p.R, p.B);
    const double r_star_u = closed_form_rademacher(p.G, p.u_eta, p.u, p.R, p.B);
    const double r_n = closed_form_rademacher(1, p.n - p.n_eta, p.n, p.R, p.B);
    return rademacher_combination(r_star_u, r_n, r_star_n, p);
}

}  // namespace

BoundReport theorem3_bound(const RiskBreakdown& risk, const RademacherEstimates& rad,
                           const BoundParams& params) {
    auto r = common_terms(risk, params);
    r.variant = BoundVariant::Theorem3;
    r.rademacher_term = rademacher_combination(rad.r_star_u, rad.r_n, rad.r_star_n, params);
    r.closed_form_rademacher_term = rademacher_combination(
        rad.closed_form_r_star_u, rad.closed_form_r_n, rad.closed_form_r_star_n, params);
    const double log_v = std::log(14.0 * params.K * params.G / params.delta);
    r.v_term = 9.0 * std::sqrt(log_v * r.inv_v_star);
    r.total = r.empirical_risk + r.stability_term + r.rademacher_term + r.s_term + r.t_term + r.v_term;
    return r;
}

BoundReport corollary4_bound(const RiskBreakdown& risk, const BoundParams& params) {
    if (!(params.R > 0.0) || !(params.B > 0.0)) throw ArgumentError("R and B must be > 0");
    auto r = common_terms(risk, params);
    r.variant = BoundVariant::Corollary4;
    r.rademacher_term = 2.0 / params.rho * params.R * params.B * std::sqrt(3.0 * r.k_star_sq_over_v_star);
    r.closed_form_rademacher_term = closed_form_combination(params);
    const double log_v = std::log(14.0 * params.K * params.G / params.delta);
    r.v_term = 5.0 * std::sqrt(3.0 * log_v * r.inv_v_star);
    r.total = r.empirical_risk + r.stability_term + r.rademacher_term + r.s_term + r.t_term + r.v_term;
    return r;
}

double rate_diagnostic(std::size_t n, std::size_t u, int K) {
    if (n < 1 || u < 1) throw ArgumentError("n and u must be >= 1");
    const double k = K;
    return std::sqrt(k / static_cast<double>(n)) + k * std::sqrt(k / static_cast<double>(u));
}

void add_cluster_diagnostics(BoundReport& report, const RiskBreakdown& risk,
                             const ConfidentClusterSet& confident) {
    const auto& p = report.inputs;
    const double n = static_cast<double>(p.n);
    const double u = static_cast<double>(p.u);
    const double kappa = p.kappa;
    const double tail = 7.0 * std::log(8.0 / p.delta) / (3.0 * (n - 1.0)) +
                        7.0 * std::log(8.0 / p.delta) / (3.0 * (u - 1.0));
    report.clusters.clear();
    for (const auto& c : confident.clusters) {
        ClusterDiagnostic d;
        d.cluster_id = c.cluster_id;
        d.n_eta_j = c.labeled_count;
        d.u_eta_j = c.unlabeled_count;
        if (const auto it = risk.per_cluster.find(c.cluster_id); it != risk.per_cluster.end()) {
            d.empirical_risk = it->second.total;
        }
        d.rademacher_n_j = closed_form_rademacher(1, c.labeled_count, p.n, p.R, p.B);
        d.rademacher_u_j = closed_form_rademacher(1, c.unlabeled_count, p.u, p.R, p.B);
        const double base = d.empirical_risk + confident.eta / confident.num_clusters +
                            2.0 * kappa / p.rho * d.rademacher_n_j + 2.0 * p.K / p.rho * d.rademacher_u_j + tail;
        auto dev = [&](double log_const) {
            const double lg = std::log(log_const * p.K / p.delta);
            return 5.0 * std::sqrt(kappa * static_cast<double>(c.labeled_count) * lg / (2.0 * n * n)) +
                   5.0 * std::sqrt(kappa * static_cast<double>(c.unlabeled_count) * lg / (2.0 * u * u));
        };
        d.bound_log16k = base + dev(16.0);
        d.bound_log8k = base + dev(8.0);
        report.clusters.push_back(d);
    }
}

}  // namespace pms2l
