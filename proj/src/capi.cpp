#include "../include/spvdg.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "spvdg/errors.hpp"
#include "spvdg/scenario.hpp"

using namespace spvdg;

namespace {

thread_local std::string g_last_error;

int map_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoBracket: return SPVDG_ERR_NO_BRACKET;
    case ErrorKind::OffCurve: return SPVDG_ERR_OFF_CURVE;
    case ErrorKind::SingularJacobian: return SPVDG_ERR_SINGULAR_JACOBIAN;
    case ErrorKind::NoConvergence: return SPVDG_ERR_NO_CONVERGENCE;
    case ErrorKind::InfeasibleOperatingPoint:
      return SPVDG_ERR_INFEASIBLE_OPERATING_POINT;
    case ErrorKind::InfeasibleReferences:
      return SPVDG_ERR_INFEASIBLE_REFERENCES;
    case ErrorKind::DegenerateDenominator:
      return SPVDG_ERR_DEGENERATE_DENOMINATOR;
    case ErrorKind::NonFinite: return SPVDG_ERR_NON_FINITE;
    case ErrorKind::NeverSettles: return SPVDG_ERR_NEVER_SETTLES;
    case ErrorKind::BadConfig: return SPVDG_ERR_BAD_CONFIG;
    case ErrorKind::Io: return SPVDG_ERR_IO;
  }
  return SPVDG_ERR_BAD_CONFIG;
}

template <class F>
int guarded(F&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_kind(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPVDG_ERR_BAD_CONFIG;
  }
}

int copy_out(const std::string& body, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = body.size();
  if (buf && cap > 0) {
    const size_t n = body.size() < cap - 1 ? body.size() : cap - 1;
    std::memcpy(buf, body.data(), n);
    buf[n] = '\0';
  }
  return SPVDG_OK;
}

Preset resolve(const std::string& name_or_path) {
  if (const Preset* p = find_preset(name_or_path)) return *p;
  return load_config(name_or_path);
}

} // namespace

struct spvdg_scenario {
  Preset preset;
};

struct spvdg_trace {
  Trace trace;
};

extern "C" {

const char* spvdg_last_error(void) { return g_last_error.c_str(); }

int spvdg_list_scenarios(char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    std::string body;
    for (const Preset& p : presets())
      body += p.name + "\t" + p.description + "\n";
    return copy_out(body, buf, cap, needed);
  });
}

int spvdg_scenario_open(const char* name_or_path, spvdg_scenario** out) {
  if (!name_or_path || !out) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = new spvdg_scenario{resolve(name_or_path)};
    return SPVDG_OK;
  });
}

void spvdg_scenario_free(spvdg_scenario* scenario) { delete scenario; }

int spvdg_scenario_set(spvdg_scenario* scenario, const char* key,
                       const char* value) {
  if (!scenario || !key || !value) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    apply_override(scenario->preset, key, value);
    return SPVDG_OK;
  });
}

int spvdg_scenario_serialize(const spvdg_scenario* scenario, char* buf,
                             size_t cap, size_t* needed) {
  if (!scenario) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { return copy_out(serialize_preset(scenario->preset), buf, cap, needed); });
}

int spvdg_scenario_hash(const spvdg_scenario* scenario, char buf[17]) {
  if (!scenario || !buf) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::string h = config_hash(scenario->preset);
    std::memcpy(buf, h.c_str(), 17);
    return SPVDG_OK;
  });
}

int spvdg_scenario_run(const spvdg_scenario* scenario, spvdg_trace** out) {
  if (!scenario || !out) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto trace = std::make_unique<spvdg_trace>();
    if (!scenario->preset.estimate_table)
      trace->trace = run_scenario(scenario->preset.setup);
    *out = trace.release();
    return SPVDG_OK;
  });
}

int spvdg_run_files(const char* name_or_path, const char* const* overrides,
                    size_t n_overrides, const char* out_dir) {
  if (!name_or_path || !out_dir || (n_overrides > 0 && !overrides)) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    Preset preset = resolve(name_or_path);
    std::vector<std::string> applied;
    for (size_t i = 0; i < n_overrides; ++i) {
      const std::string kv = overrides[i];
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::BadConfig, "override must be key=value: " + kv);
      apply_override(preset, kv.substr(0, eq), kv.substr(eq + 1));
      applied.push_back(kv);
    }

    const std::filesystem::path dir(out_dir);
    const std::string trace_path = (dir / "trace.csv").string();
    const std::string metrics_path = (dir / "metrics.txt").string();
    const std::string manifest_path = (dir / "manifest.txt").string();

    Trace trace;
    std::string metrics;
    if (preset.estimate_table) {
      metrics = estimate_table_report(preset.setup.panel, preset.setup.est);
    } else {
      trace = run_scenario(preset.setup);
      metrics = metrics_report(preset, trace);
    }
    write_trace_csv(trace_path, trace);

    std::ofstream mf(metrics_path);
    if (!mf) throw Error(ErrorKind::Io, "cannot write " + metrics_path);
    mf << metrics;

    std::ofstream man(manifest_path);
    if (!man) throw Error(ErrorKind::Io, "cannot write " + manifest_path);
    man << manifest_text(preset, {trace_path, metrics_path, manifest_path},
                         applied);
    return SPVDG_OK;
  });
}

int spvdg_trace_size(const spvdg_trace* trace, size_t* rows, int* has_observer) {
  if (!trace) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  if (rows) *rows = trace->trace.rows.size();
  if (has_observer) *has_observer = trace->trace.has_observer ? 1 : 0;
  return SPVDG_OK;
}

int spvdg_trace_row(const spvdg_trace* trace, size_t index, double cols[18]) {
  if (!trace || !cols) {
    g_last_error = "null argument";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  if (index >= trace->trace.rows.size()) {
    g_last_error = "row index out of range";
    return SPVDG_ERR_INVALID_ARGUMENT;
  }
  const TraceRow& r = trace->trace.rows[index];
  cols[0] = r.t;
  for (int i = 0; i < 6; ++i) cols[1 + i] = r.x[i];
  cols[7] = r.u1;
  cols[8] = r.u2;
  cols[9] = r.d.d1;
  cols[10] = r.d.d2;
  cols[11] = r.d.d3;
  const bool obs = trace->trace.has_observer;
  cols[12] = obs ? r.obs.d1hat : 0.0;
  cols[13] = obs ? r.obs.d2hat : 0.0;
  cols[14] = obs ? r.obs.d3hat : 0.0;
  cols[15] = r.P_pv;
  cols[16] = r.P_batt;
  cols[17] = r.P_load;
  return SPVDG_OK;
}

void spvdg_trace_free(spvdg_trace* trace) { delete trace; }

} // extern "C"
