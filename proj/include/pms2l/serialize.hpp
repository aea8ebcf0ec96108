#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pms2l/bounds.hpp"
#include "pms2l/clustering.hpp"
#include "pms2l/confident.hpp"
#include "pms2l/data.hpp"
#include "pms2l/eval.hpp"
#include "pms2l/model.hpp"
#include "pms2l/objective.hpp"

namespace pms2l {

// Keys keep insertion order so artifacts read in schema order.
using Json = nlohmann::ordered_json;

Json to_json(const Partition& p);
Partition partition_from_json(const Json& j);

Json to_json(const ConfidentClusterSet& c);
ConfidentClusterSet confident_from_json(const Json& j);

Json to_json(const LinearModel& m);
LinearModel model_from_json(const Json& j);

Json to_json(const RiskBreakdown& r);
Json to_json(const RademacherEstimates& r);
Json to_json(const BoundReport& r);

Json stability_json(double L_hat, double delta_hat, int trials);

/// {n, u, test, K, d, feature_radius}
Json manifest_json(const Dataset& ds);

Json to_json(const ExperimentConfig& c);
Json to_json(const ExperimentSummary& s);

/// Parses a JSON file; malformed text is a ParseError naming the file.
Json read_json_file(const std::filesystem::path& path);
/// Two-space indented, newline terminated.
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

}  // namespace pms2l
