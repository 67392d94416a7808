#pragma once

// CSV and JSON serialization of ensemble results and field grids.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qctrans/ensemble.hpp"
#include "qctrans/error.hpp"
#include "qctrans/field_grid.hpp"

namespace qct {

inline constexpr int kResultSchemaVersion = 1;
inline constexpr int kFieldSchemaVersion = 1;

namespace detail {

inline std::string fmt15(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline const char* axis_name(int i) {
  static const char* names[] = {"x", "y", "z"};
  return names[i];
}

inline nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline double read_number(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline std::vector<double> read_numbers(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(read_number(v));
  return out;
}

inline nlohmann::ordered_json numbers_json(const std::vector<double>& v) {
  auto out = nlohmann::ordered_json::array();
  for (double d : v) out.push_back(number_or_null(d));
  return out;
}

inline TrajectoryStatus status_from_string(const std::string& s) {
  if (s == "completed") return TrajectoryStatus::completed;
  if (s == "singular_stop") return TrajectoryStatus::singular_stop;
  if (s == "step_limit") return TrajectoryStatus::step_limit;
  throw IoError("unknown trajectory status " + s);
}

}  // namespace detail

// One row per (trajectory, output time): positions, velocities and the
// conservation monitors that apply to the system's dimension.
inline void write_csv(const EnsembleResult& res, std::ostream& out) {
  using detail::fmt15;
  const int d = res.dim;
  out << "trajectory_id,status,t";
  if (d == 1) {
    out << ",x,v";
  } else {
    for (int i = 0; i < d; ++i) out << ',' << detail::axis_name(i);
    for (int i = 0; i < d; ++i) out << ",v" << detail::axis_name(i);
  }
  out << ",energy";
  if (d == 2) out << ",L,radius";
  if (d == 3) out << ",Lx,Ly,Lz,cyl_radius";
  out << '\n';
  for (std::size_t k = 0; k < res.trajectories.size(); ++k) {
    const auto& tr = res.trajectories[k];
    const DiagnosticsRecord* diag = k < res.diagnostics.size() ? &res.diagnostics[k] : nullptr;
    for (std::size_t s = 0; s < tr.samples.size(); ++s) {
      const auto& st = tr.samples[s];
      out << tr.id << ',' << to_string(tr.status) << ',' << fmt15(st.t);
      for (double x : st.x) out << ',' << fmt15(x);
      for (double v : st.v) out << ',' << fmt15(v);
      auto diag_at = [&](const std::vector<double>& series) {
        return diag && s < series.size() ? series[s] : std::numeric_limits<double>::quiet_NaN();
      };
      out << ',' << fmt15(diag_at(diag ? diag->energy : std::vector<double>{}));
      if (d >= 2) {
        const std::size_t nc = d == 2 ? 1 : 3;
        for (std::size_t c = 0; c < nc; ++c) {
          double v = std::numeric_limits<double>::quiet_NaN();
          if (diag && s < diag->angular_momentum.size()) v = diag->angular_momentum[s][c];
          out << ',' << fmt15(v);
        }
        out << ',' << fmt15(diag_at(diag ? diag->radius : std::vector<double>{}));
      }
      out << '\n';
    }
  }
}

inline std::string to_csv(const EnsembleResult& res) {
  std::ostringstream ss;
  write_csv(res, ss);
  return ss.str();
}

inline nlohmann::ordered_json state_json(const StateRecord& s) {
  return {{"t", s.t}, {"x", detail::numbers_json(s.x)}, {"v", detail::numbers_json(s.v)}};
}

inline StateRecord state_from_json(const nlohmann::json& j) {
  return {detail::read_number(j.at("t")), detail::read_numbers(j.at("x")), detail::read_numbers(j.at("v"))};
}

// Schema-versioned document holding the full result.
inline nlohmann::ordered_json to_json(const EnsembleResult& res) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = "qctrans.ensemble_result";
  j["schema_version"] = kResultSchemaVersion;
  j["system"] = res.system;
  j["dim"] = res.dim;
  j["mode"] = res.mode;
  j["trajectories"] = ordered_json::array();
  for (const auto& tr : res.trajectories) {
    ordered_json t;
    t["id"] = tr.id;
    t["status"] = to_string(tr.status);
    t["samples"] = ordered_json::array();
    for (const auto& s : tr.samples) t["samples"].push_back(state_json(s));
    t["stop"] = tr.stop ? state_json(*tr.stop) : ordered_json(nullptr);
    j["trajectories"].push_back(std::move(t));
  }
  j["diagnostics"] = ordered_json::array();
  for (const auto& d : res.diagnostics) {
    ordered_json o;
    o["energy"] = detail::numbers_json(d.energy);
    o["angular_momentum"] = ordered_json::array();
    for (const auto& l : d.angular_momentum) o["angular_momentum"].push_back(detail::numbers_json(l));
    o["radius"] = detail::numbers_json(d.radius);
    o["z"] = detail::numbers_json(d.z);
    o["max_energy_drift"] = detail::number_or_null(d.max_energy_drift);
    o["max_angular_momentum_drift"] = detail::number_or_null(d.max_angular_momentum_drift);
    o["max_radius_drift"] = detail::number_or_null(d.max_radius_drift);
    o["max_z_drift"] = detail::number_or_null(d.max_z_drift);
    j["diagnostics"].push_back(std::move(o));
  }
  j["distribution_metrics"] = ordered_json::array();
  for (const auto& m : res.distribution_metrics)
    j["distribution_metrics"].push_back({{"t", m.t},
                                         {"marginal", m.marginal},
                                         {"n", m.n},
                                         {"statistic", m.statistic},
                                         {"critical_value", m.critical_value}});
  j["truncation_report"] = {{"completed", res.truncation_report.completed},
                            {"singular_stop", res.truncation_report.singular_stop},
                            {"step_limit", res.truncation_report.step_limit}};
  return j;
}

inline std::string to_json_text(const EnsembleResult& res) { return to_json(res).dump(2) + "\n"; }

inline EnsembleResult ensemble_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != "qctrans.ensemble_result") throw IoError("not an ensemble result document");
    const int version = j.at("schema_version").get<int>();
    if (version != kResultSchemaVersion) throw IoError("unsupported schema_version " + std::to_string(version));
    EnsembleResult res;
    res.system = j.at("system").get<std::string>();
    res.dim = j.at("dim").get<int>();
    res.mode = j.at("mode").get<std::string>();
    for (const auto& t : j.at("trajectories")) {
      TrajectoryRecord tr;
      tr.id = t.at("id").get<std::size_t>();
      tr.status = detail::status_from_string(t.at("status").get<std::string>());
      for (const auto& s : t.at("samples")) tr.samples.push_back(state_from_json(s));
      if (!t.at("stop").is_null()) tr.stop = state_from_json(t.at("stop"));
      res.trajectories.push_back(std::move(tr));
    }
    for (const auto& o : j.at("diagnostics")) {
      DiagnosticsRecord d;
      d.energy = detail::read_numbers(o.at("energy"));
      for (const auto& l : o.at("angular_momentum")) d.angular_momentum.push_back(detail::read_numbers(l));
      d.radius = detail::read_numbers(o.at("radius"));
      d.z = detail::read_numbers(o.at("z"));
      d.max_energy_drift = detail::read_number(o.at("max_energy_drift"));
      d.max_angular_momentum_drift = detail::read_number(o.at("max_angular_momentum_drift"));
      d.max_radius_drift = detail::read_number(o.at("max_radius_drift"));
      d.max_z_drift = detail::read_number(o.at("max_z_drift"));
      res.diagnostics.push_back(std::move(d));
    }
    for (const auto& m : j.at("distribution_metrics"))
      res.distribution_metrics.push_back({m.at("t").get<double>(), m.at("marginal").get<std::string>(),
                                          m.at("n").get<std::size_t>(), m.at("statistic").get<double>(),
                                          m.at("critical_value").get<double>()});
    const auto& tr = j.at("truncation_report");
    res.truncation_report = {tr.at("completed").get<std::size_t>(), tr.at("singular_stop").get<std::size_t>(),
                             tr.at("step_limit").get<std::size_t>()};
    return res;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed ensemble result: ") + e.what());
  }
}

inline EnsembleResult ensemble_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("malformed ensemble result: ") + e.what());
  }
  return ensemble_from_json(j);
}

// ---------------------------------------------------------------------------

inline void write_csv(const FieldGrid& g, std::ostream& out) {
  out << g.a_label << ',' << g.b_label << ',' << g.quantity << '\n';
  for (std::size_t j = 0; j < g.b.size(); ++j)
    for (std::size_t i = 0; i < g.a.size(); ++i)
      out << detail::fmt15(g.a[i]) << ',' << detail::fmt15(g.b[j]) << ',' << detail::fmt15(g.at(i, j)) << '\n';
}

inline std::string to_csv(const FieldGrid& g) {
  std::ostringstream ss;
  write_csv(g, ss);
  return ss.str();
}

inline nlohmann::ordered_json to_json(const FieldGrid& g) {
  return {{"schema", "qctrans.field_grid"},
          {"schema_version", kFieldSchemaVersion},
          {"system", g.system},
          {"quantity", g.quantity},
          {"t", g.t},
          {"a_label", g.a_label},
          {"b_label", g.b_label},
          {"a", g.a},
          {"b", g.b},
          {"values", detail::numbers_json(g.values)}};
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace qct
