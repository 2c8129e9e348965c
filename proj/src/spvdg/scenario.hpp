#pragma once

#include <string>
#include <vector>

#include "sim.hpp"

namespace spvdg {

// A named, fully-resolved scenario. `estimate_table` marks the one preset
// (ch2-estimate) that runs the estimator accuracy table instead of a
// time-domain simulation.
struct Preset {
  std::string name;
  std::string description;
  ScenarioSetup setup;
  bool estimate_table = false;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name); // nullptr if unknown

// Applies one "key=value" override onto a preset (same key space as the
// config file). Throws BadConfig on unknown keys or malformed values.
void apply_override(Preset& preset, const std::string& key,
                    const std::string& value);

// Flat key=value config file. Grammar: one `key = value` pair per line,
// '#' starts a comment, blank lines ignored. The `scenario` key picks the
// base preset; every other key overrides a field of it.
Preset load_config(const std::string& path);

// Canonical ordered key=value serialization of a resolved preset (drives the
// manifest body and the config hash).
std::string serialize_preset(const Preset& preset);

// FNV-1a 64-bit hash of the serialized preset, as fixed-width hex.
std::string config_hash(const Preset& preset);

// ---- Outputs ----

// Columns: t, x1..x6, u1, u2, d1, d2, d3, d1hat, d2hat, d3hat (blank when the
// scenario has no observer), P_pv, P_batt, P_load. Full-precision scientific.
void write_trace_csv(const std::string& path, const Trace& trace);

// Estimator accuracy table for the four Ch. 2 desired-value cases.
std::string estimate_table_report(const PvArrayParams& panel,
                                  const EstimatorConfig& cfg);

// Settling times, steady-state errors and (where applicable) observer /
// estimator accuracy for a completed run.
std::string metrics_report(const Preset& preset, const Trace& trace);

std::string manifest_text(const Preset& preset,
                          const std::vector<std::string>& output_paths,
                          const std::vector<std::string>& overrides);

} // namespace spvdg
