#pragma once

#include "qwalk/basin_hopping.hpp"
#include "qwalk/entanglement.hpp"
#include "qwalk/experiment.hpp"
#include "qwalk/tomography.hpp"
#include "qwalk/walk.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace qwalk {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class TableFormat { Csv, Json };

void write_csv(std::ostream& os, const Table& t);
json table_to_json(const Table& t);  // array of row objects
/// Writes dir/stem.csv or dir/stem.json and returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& t,
                                  TableFormat format);
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

// Plot and data tables.
Table state_table(const WalkState& s);                               // site, spin, re, im, density
Table trajectory_table(const std::vector<WalkState>& trajectory);    // step, lambda, site, spin, density
Table schmidt_table(const std::vector<double>& schmidt_per_step);    // step, schmidt_norm
Table site_population_table(const WalkState& s);                     // site, density, density_l, density_r
Table hop_trace_table(const OptResult& r);                           // hop, proposed_cost, accepted, best_so_far
Table measurement_table(const MeasurementRecord& mr);                // site, I_L, I_R, I_D, I_C
Table mean_schmidt_table(const BatchStats& st);                      // step, mean_schmidt
Table mean_density_table(const BatchStats& st);                      // site, spin, density

void write_state_csv(std::ostream& os, const WalkState& s);
/// Reads the state CSV; half_width is the largest |site| present, missing rows are zero.
WalkState read_state_csv(std::istream& is);

void write_measurement_csv(std::ostream& os, const MeasurementRecord& mr);
/// n_shots is not part of the CSV; pass it separately (nullopt = noiseless).
MeasurementRecord read_measurement_csv(std::istream& is, std::optional<std::int64_t> n_shots);

const char* spin_name(Spin s);
Spin parse_spin(const std::string& text);

json to_json(const NVector& n);
json to_json(const SchmidtReport& r);
json to_json(const BlochAngles& b);
json to_json(const CoinSchedule& sched);
json to_json(const OptimizerConfig& cfg);
json to_json(const OptResult& r);
json to_json(const ExperimentConfig& cfg);
json to_json(const RunRecord& r);
json to_json(const BatchStats& st);
json to_json(const MeasurementRecord& mr);

CoinSchedule schedule_from_json(const json& j);
BlochAngles bloch_from_json(const json& j);
OptResult opt_result_from_json(const json& j);
RunRecord run_record_from_json(const json& j);
MeasurementRecord measurement_from_json(const json& j);

void write_runs_jsonl(std::ostream& os, const std::vector<RunRecord>& runs);
std::vector<RunRecord> read_runs_jsonl(std::istream& is);

/// {program, version, command, config}
json make_manifest(const std::string& command, const json& config);

/// manifest.json, runs.jsonl, batch_stats.json, mean_schmidt.csv, mean_density.csv.
void write_batch_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                         const OptimizerConfig& opt_cfg, const BatchResult& result);

}  // namespace qwalk
