#include "pms2l/serialize.hpp"

#include <fstream>
#include <sstream>

#include "pms2l/error.hpp"

namespace pms2l {

namespace {

// Wraps lookups so a missing or mistyped key surfaces as a ConfigError naming the key.
template <class T>
T field(const Json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(std::string(what) + " JSON is missing '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string(what) + " JSON has a malformed '" + key + "'");
    }
}

const char* variant_name(BoundVariant v) {
    return v == BoundVariant::Theorem3 ? "Theorem3" : "Corollary4";
}

}  // namespace

Json to_json(const Partition& p) {
    Json j;
    j["G"] = p.num_clusters;
    j["assign"] = p.assign;
    j["centers"] = p.centers;
    return j;
}

Partition partition_from_json(const Json& j) {
    Partition p;
    p.num_clusters = field<int>(j, "G", "partition");
    p.assign = field<std::vector<int>>(j, "assign", "partition");
    if (j.contains("centers")) p.centers = field<std::vector<std::vector<double>>>(j, "centers", "partition");
    p.validate();
    return p;
}

Json to_json(const ConfidentClusterSet& c) {
    Json j;
    j["kappa"] = c.kappa;
    j["eta"] = c.eta;
    j["G"] = c.num_clusters;
    j["n_eta"] = c.n_eta;
    j["u_eta"] = c.u_eta;
    Json clusters = Json::array();
    for (const auto& k : c.clusters) {
        Json e;
        e["id"] = k.cluster_id;
        e["predominant"] = k.predominant;
        e["n_eta_j"] = k.labeled_count;
        e["u_eta_j"] = k.unlabeled_count;
        e["violation_mass"] = k.violation_mass;
        clusters.push_back(std::move(e));
    }
    j["clusters"] = std::move(clusters);
    return j;
}

ConfidentClusterSet confident_from_json(const Json& j) {
    ConfidentClusterSet c;
    c.kappa = field<int>(j, "kappa", "confident set");
    c.eta = field<double>(j, "eta", "confident set");
    c.num_clusters = field<int>(j, "G", "confident set");
    const auto clusters = field<Json>(j, "clusters", "confident set");
    if (!clusters.is_array()) throw ConfigError("confident set 'clusters' must be an array");
    int previous = -1;
    for (const auto& e : clusters) {
        ConfidentCluster k;
        k.cluster_id = field<int>(e, "id", "confident cluster");
        k.predominant = field<std::vector<int>>(e, "predominant", "confident cluster");
        k.labeled_count = field<std::size_t>(e, "n_eta_j", "confident cluster");
        k.unlabeled_count = field<std::size_t>(e, "u_eta_j", "confident cluster");
        k.violation_mass = field<double>(e, "violation_mass", "confident cluster");
        if (k.cluster_id <= previous || k.cluster_id >= c.num_clusters) {
            throw ConfigError("confident cluster ids must be ascending and below G");
        }
        previous = k.cluster_id;
        c.n_eta += k.labeled_count;
        c.u_eta += k.unlabeled_count;
        c.clusters.push_back(std::move(k));
    }
    return c;
}

Json to_json(const LinearModel& m) {
    Json j;
    j["K"] = m.num_classes;
    j["d"] = m.dimension;
    j["B"] = m.norm_budget;
    j["rho"] = m.rho;
    j["weights"] = m.weights;
    return j;
}

LinearModel model_from_json(const Json& j) {
    LinearModel m;
    m.num_classes = field<int>(j, "K", "model");
    m.dimension = field<std::size_t>(j, "d", "model");
    m.norm_budget = field<double>(j, "B", "model");
    m.rho = field<double>(j, "rho", "model");
    m.weights = field<std::vector<double>>(j, "weights", "model");
    m.validate();
    return m;
}

Json to_json(const RiskBreakdown& r) {
    Json j;
    j["labeled_term"] = r.labeled_term;
    j["penalty_term"] = r.penalty_term;
    j["total"] = r.total;
    j["labeled_outside"] = r.labeled_outside;
    Json clusters = Json::array();
    for (const auto& [id, c] : r.per_cluster) {
        clusters.push_back({{"id", id}, {"labeled_part", c.labeled_part},
                            {"unlabeled_part", c.unlabeled_part}, {"total", c.total}});
    }
    j["per_cluster"] = std::move(clusters);
    return j;
}

Json to_json(const RademacherEstimates& r) {
    Json j;
    j["r_star_n"] = r.r_star_n;
    j["r_star_u"] = r.r_star_u;
    j["r_n"] = r.r_n;
    j["se_r_star_n"] = r.se_r_star_n;
    j["se_r_star_u"] = r.se_r_star_u;
    j["se_r_n"] = r.se_r_n;
    j["mc_draws"] = r.mc_draws;
    j["closed_form_r_star_n"] = r.closed_form_r_star_n;
    j["closed_form_r_star_u"] = r.closed_form_r_star_u;
    j["closed_form_r_n"] = r.closed_form_r_n;
    return j;
}

Json to_json(const BoundReport& r) {
    const auto& p = r.inputs;
    Json j;
    j["variant"] = variant_name(r.variant);
    j["inputs"] = {{"n", p.n},         {"u", p.u},       {"G", p.G},         {"K", p.K},
                   {"kappa", p.kappa}, {"rho", p.rho},   {"delta", p.delta}, {"L", p.L},
                   {"n_eta", p.n_eta}, {"u_eta", p.u_eta}, {"R", p.R},       {"B", p.B}};
    j["empirical_risk"] = r.empirical_risk;
    j["stability_term"] = r.stability_term;
    j["rademacher_term"] = r.rademacher_term;
    j["s_term"] = r.s_term;
    j["t_term"] = r.t_term;
    j["v_term"] = r.v_term;
    j["total"] = r.total;
    j["rate_diagnostic"] = r.rate_diagnostic;
    j["inv_s_star"] = r.inv_s_star;
    j["inv_s_star_no_g"] = r.inv_s_star_no_g;
    j["inv_t_star"] = r.inv_t_star;
    j["inv_v_star"] = r.inv_v_star;
    j["k_star_sq_over_v_star"] = r.k_star_sq_over_v_star;
    j["closed_form_rademacher_term"] = r.closed_form_rademacher_term;
    j["flags"] = {{"uses_main_text_s_star", r.uses_main_text_s_star},
                  {"corollary_uses_q_over_v_star", r.corollary_uses_q_over_v_star}};
    Json clusters = Json::array();
    for (const auto& c : r.clusters) {
        clusters.push_back({{"id", c.cluster_id},
                            {"n_eta_j", c.n_eta_j},
                            {"u_eta_j", c.u_eta_j},
                            {"empirical_risk", c.empirical_risk},
                            {"rademacher_n_j", c.rademacher_n_j},
                            {"rademacher_u_j", c.rademacher_u_j},
                            {"bound_log16k", c.bound_log16k},
                            {"bound_log8k", c.bound_log8k}});
    }
    j["cluster_diagnostics"] = std::move(clusters);
    return j;
}

Json stability_json(double L_hat, double delta_hat, int trials) {
    Json j;
    j["L_hat"] = L_hat;
    j["delta_hat"] = delta_hat;
    j["trials"] = trials;
    return j;
}

Json manifest_json(const Dataset& ds) {
    Json j;
    j["n"] = ds.n();
    j["u"] = ds.u();
    j["test"] = ds.test.size();
    j["K"] = ds.num_classes;
    j["d"] = ds.dimension;
    j["feature_radius"] = ds.feature_radius;
    return j;
}

Json to_json(const ExperimentConfig& c) {
    Json j;
    Json data;
    if (c.data.kind == DataSource::Kind::Synthetic) {
        data = {{"kind", "synthetic"},
                {"K", c.data.num_classes},
                {"train_per_class", c.data.train_per_class},
                {"test_per_class", c.data.test_per_class},
                {"separation", c.data.separation},
                {"noise", c.data.noise},
                {"data_seed", c.data.data_seed}};
    } else {
        data = {{"kind", "libsvm"}, {"train", c.data.train_path}, {"test", c.data.test_path}};
    }
    data["normalize"] = c.data.normalize;
    data["test_fixed_across_trials"] = true;
    j["data"] = std::move(data);
    j["labeled_fraction"] = c.labeled_fraction;
    j["labels_per_class"] = c.labels_per_class;
    j["per_class_minimum"] = c.per_class_minimum;
    j["trials"] = c.trials;
    Json methods = Json::array();
    for (const auto m : c.methods) methods.push_back(method_name(m));
    j["methods"] = std::move(methods);
    j["seed"] = c.master_seed;
    j["G"] = c.num_clusters;
    j["kmeans_max_iters"] = c.kmeans_max_iters;
    j["kmeans_tolerance"] = c.kmeans_tolerance;
    j["kappa"] = c.kappa;
    j["eta"] = c.eta;
    j["train"] = {{"iterations", c.train.iterations},
                  {"step_scale", c.train.step_scale},
                  {"B", c.train.norm_budget},
                  {"rho", c.train.rho},
                  {"cv_folds", c.train.cv_folds},
                  {"budget_grid", c.train.budget_grid},
                  {"select_budget", c.select_budget}};
    j["bound"] = {{"enabled", c.compute_bound},
                  {"delta", c.delta},
                  {"mc_draws", c.mc_draws},
                  {"L", c.L ? Json(*c.L) : Json(nullptr)},
                  {"stability_trials", c.stability_trials}};
    return j;
}

Json to_json(const ExperimentSummary& s) {
    Json j;
    Json per = Json::object();
    for (const auto& [m, st] : s.per_method) {
        per[method_name(m)] = {{"mean", st.mean}, {"std", st.stddev}, {"trials", st.trials}};
    }
    j["per_method"] = std::move(per);
    j["p_value"] = s.p_value ? Json(*s.p_value) : Json(nullptr);
    j["bound_violation_rate"] = s.bound_violation_rate;
    j["bound_trials"] = s.bound_trials;
    j["L_hat"] = s.L_hat ? Json(*s.L_hat) : Json(nullptr);
    Json trials = Json::array();
    for (const auto& r : s.trials) {
        trials.push_back({{"trial", r.trial},
                          {"method", method_name(r.method)},
                          {"seed", r.trial_seed},
                          {"accuracy", r.test_accuracy},
                          {"bound", r.bound_total ? Json(*r.bound_total) : Json(nullptr)},
                          {"risk", r.empirical_risk},
                          {"B", r.norm_budget},
                          {"n_eta", r.n_eta},
                          {"u_eta", r.u_eta}});
    }
    j["trials"] = std::move(trials);
    return j;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), 0, std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << dump(j);
    if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace pms2l
