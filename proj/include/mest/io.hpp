#pragma once

#include <mest/concentration.hpp>
#include <mest/harness.hpp>
#include <mest/types.hpp>

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace mest::io {

using json = nlohmann::json;

/// Loads a rectangular numeric CSV (comma separated, '.' decimal).  A single
/// header row is auto-detected by a non-numeric first line.  Parse failures
/// raise IoError with the offending line number.
Matrix load_csv_matrix(const std::string& path);

/// Writes content to path via a sibling ".tmp" staging file and rename, so a
/// partial file is never left behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string records_to_csv(const std::vector<ConvergenceRecord>& records);

ConvexLoss parse_loss(const json& spec);
ErrorDistribution parse_distribution(const json& spec);
DesignGenSpec parse_design(const json& spec);
SolverOpts parse_solver_opts(const json& spec);
ExperimentConfig parse_experiment(const json& spec);
WeightSpec parse_weights(const json& spec);

json loss_to_json(const ConvexLoss& loss);
json summary_to_json(const SummaryTable& table);
json condition_report_to_json(const ConditionReport& report);
json decay_report_to_json(const DecayReport& report);
json tail_report_to_json(const TailReport& report);
json slln_report_to_json(const SllnReport& report);
json bound_report_to_json(const BoundReport& report);
json contrast_report_to_json(const ContrastReport& report);
json fit_result_to_json(const FitResult& fit, const DesignSummary& summary);

json load_json_file(const std::string& path);

}  // namespace mest::io
