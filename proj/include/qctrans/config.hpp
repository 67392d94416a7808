#pragma once

// Scenario documents (JSON), their serialization, and the figure presets.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qctrans/error.hpp"
#include "qctrans/scenario.hpp"

namespace qct {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline const char* type_name(const Json& j) { return j.type_name(); }

// Typed, path-aware view of one JSON object. Every key read is recorded so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, std::string("expected an object, got ") + type_name(j));
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_->contains(key); }

  const Json* raw(const std::string& key) {
    used_.insert(key);
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(at(key), std::string("expected a number, got ") + type_name(*v));
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }
  double required_number(const std::string& key) {
    if (!has(key)) throw ConfigError(at(key), "missing required key");
    return *number(key);
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (v->is_number_unsigned()) {
      const auto u = v->get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) throw ConfigError(at(key), "integer out of range");
      return static_cast<std::int64_t>(u);
    }
    if (v->is_number_integer()) return v->get<std::int64_t>();
    throw ConfigError(at(key), std::string("expected an integer, got ") + type_name(*v));
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) throw ConfigError(at(key), "must be non-negative");
    throw ConfigError(at(key), std::string("expected an integer, got ") + type_name(*v));
  }

  std::optional<std::string> string(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(at(key), std::string("expected a string, got ") + type_name(*v));
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(at(key), std::string("expected true or false, got ") + type_name(*v));
    return v->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    return number_array(*v, at(key));
  }

  std::optional<std::vector<std::vector<double>>> points(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of points");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v->size(); ++i)
      out.push_back(number_array((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::optional<Section> child(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    return Section(*v, at(key));
  }

  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
  }

  static std::vector<double> number_array(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, std::string("expected an array of numbers, got ") + type_name(v));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(path + "[" + std::to_string(i) + "]", "must be finite");
    }
    return out;
  }

 private:
  const Json* j_;
  std::string path_;
  std::set<std::string> used_;
};

inline void line_column(std::string_view text, std::size_t byte, int& line, int& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

template <class T>
T parse_enum(Section& s, const std::string& key, const std::map<std::string, T>& table, T fallback) {
  const auto v = s.string(key);
  if (!v) return fallback;
  auto it = table.find(*v);
  if (it == table.end()) {
    std::string allowed;
    for (const auto& [name, _] : table) allowed += (allowed.empty() ? "" : ", ") + name;
    throw ConfigError(s.at(key), "unknown value \"" + *v + "\" (expected one of " + allowed + ")");
  }
  return it->second;
}

inline int system_dim(const SystemVariant& s) {
  return std::visit([](const auto& sys) { return std::decay_t<decltype(sys)>::dim; }, s);
}

inline std::string system_name(const SystemVariant& s) {
  return std::visit([](const auto& sys) { return sys.name(); }, s);
}

inline SystemVariant parse_system(Section s) {
  const auto type = s.string("type");
  if (!type) throw ConfigError(s.at("type"), "missing required key");
  SystemVariant out;
  if (*type == "double_slit") {
    DoubleSlitParams p;
    p.width = s.number("rho0", p.width);
    p.wavenumber = s.number("u", p.wavenumber);
    p.half_separation = s.number("X", p.half_separation);
    if (!(p.width > 0.0)) throw ConfigError(s.at("rho0"), "must be > 0");
    if (!(p.half_separation > 0.0)) throw ConfigError(s.at("X"), "must be > 0");
    out = DoubleSlit(p);
  } else if (*type == "oscillator_2d") {
    Oscillator2DParams p;
    p.spring = s.number("k0", p.spring);
    p.phase = s.number("alpha", p.phase);
    if (!(p.spring > 0.0)) throw ConfigError(s.at("k0"), "must be > 0");
    out = Oscillator2D(p);
  } else if (*type == "hydrogen") {
    HydrogenParams p;
    p.n = static_cast<int>(s.integer("n").value_or(p.n));
    p.l = static_cast<int>(s.integer("l").value_or(p.l));
    p.m = static_cast<int>(s.integer("m").value_or(p.m));
    if (p.n < 1 || p.n > 40) throw ConfigError(s.at("n"), "must satisfy 1 <= n <= 40");
    if (p.l < 0 || p.l >= p.n) throw ConfigError(s.at("l"), "must satisfy 0 <= l < n");
    if (p.m < -p.l || p.m > p.l) throw ConfigError(s.at("m"), "must satisfy |m| <= l");
    out = Hydrogen(p);
  } else {
    throw ConfigError(s.at("type"), "unknown system \"" + *type + "\" (expected double_slit, oscillator_2d or hydrogen)");
  }
  s.finish();
  return out;
}

inline CouplingSchedule parse_coupling(Section s) {
  const auto type = s.string("type");
  if (!type) throw ConfigError(s.at("type"), "missing required key");
  CouplingSchedule out;
  if (*type == "logistic") {
    out = Logistic{s.required_number("b"), s.required_number("t0")};
  } else if (*type == "gaussian_cdf") {
    const double mu = s.required_number("mu");
    const double sigma = s.required_number("sigma");
    if (!(sigma > 0.0)) throw ConfigError(s.at("sigma"), "must be > 0");
    out = GaussianCdf{mu, sigma};
  } else if (*type == "constant") {
    const double p = s.required_number("p");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(s.at("p"), "must satisfy 0 <= p <= 1");
    out = Constant{p};
  } else {
    throw ConfigError(s.at("type"), "unknown coupling \"" + *type + "\" (expected logistic, gaussian_cdf or constant)");
  }
  s.finish();
  return out;
}

inline void check_plane(const std::string& plane, const std::string& path) {
  if (plane != "xy" && plane != "xz" && plane != "yz") throw ConfigError(path, "plane must be xy, xz or yz");
}

inline FieldSpec parse_field(Section s, int dim) {
  FieldSpec f;
  f.quantity = s.string("quantity").value_or(f.quantity);
  if (f.quantity != "rho" && f.quantity != "S" && f.quantity != "Q" && f.quantity != "V")
    throw ConfigError(s.at("quantity"), "must be rho, S, Q or V");
  auto range = [&](const char* key, double& lo, double& hi) {
    if (auto r = s.numbers(key)) {
      if (r->size() != 2 || !((*r)[0] < (*r)[1])) throw ConfigError(s.at(key), "expected [lo, hi] with lo < hi");
      lo = (*r)[0];
      hi = (*r)[1];
    }
  };
  range("a_range", f.a_lo, f.a_hi);
  range("b_range", f.b_lo, f.b_hi);
  if (auto g = s.integer("grid")) {
    if (*g < 2 || *g > 2001) throw ConfigError(s.at("grid"), "must satisfy 2 <= grid <= 2001");
    f.grid = static_cast<int>(*g);
  }
  f.t = s.number("t", f.t);
  f.plane = s.string("plane").value_or(dim == 3 ? f.plane : "xy");
  check_plane(f.plane, s.at("plane"));
  if (dim < 3 && f.plane != "xy") throw ConfigError(s.at("plane"), "only xy is available below 3D");
  f.offset = s.number("offset", f.offset);
  if (dim == 1 && f.b_lo < 0.0) throw ConfigError(s.at("b_range"), "time axis of a 1D field must start at t >= 0");
  if (dim != 1 && f.t < 0.0) throw ConfigError(s.at("t"), "must be >= 0");
  s.finish();
  return f;
}

struct SystemDefaults {
  double end;
  int n_outputs;
  SamplerMode mode;
  std::size_t n;
};

inline SystemDefaults defaults_for(const SystemVariant& s) {
  switch (system_dim(s)) {
    case 1: return {2.0, 201, SamplerMode::quantile_1d, 50};
    case 2: return {35.0, 701, SamplerMode::rejection, 4};
    default: return {2500.0, 2501, SamplerMode::rejection, 3};
  }
}

}  // namespace detail

// Cross-field checks shared by parsed documents and presets.
inline void validate_scenario(const ScenarioConfig& sc) {
  const int dim = detail::system_dim(sc.system);
  try {
    validate(sc.coupling);
  } catch (const InvalidParameter& e) {
    throw ConfigError("coupling", e.what());
  }
  if (sc.mode == RunMode::classical) {
    const auto* c = std::get_if<Constant>(&sc.coupling);
    if (!c || c->p != 0.0) throw ConfigError("coupling", "classical mode requires a constant coupling with p = 0");
  }
  if (!std::isfinite(sc.time.start) || !std::isfinite(sc.time.end) || !(sc.time.end > sc.time.start))
    throw ConfigError("time.end", "must be greater than time.start");
  if (sc.time.start < 0.0) throw ConfigError("time.start", "must be >= 0");
  if (sc.time.n_outputs < 2) throw ConfigError("time.n_outputs", "must be >= 2");
  if (sc.ensemble.n < 1) throw ConfigError("ensemble.n", "must be >= 1");
  if (!(sc.ensemble.envelope_margin >= 1.0)) throw ConfigError("ensemble.envelope_margin", "must be >= 1");
  if (sc.ensemble.mode == SamplerMode::quantile_1d && dim != 1)
    throw ConfigError("ensemble.mode", "quantile_1d needs a 1D system, " + detail::system_name(sc.system) + " is " +
                                           std::to_string(dim) + "D");
  if (sc.ensemble.domain) {
    const Box& b = *sc.ensemble.domain;
    if (b.lo.size() != b.hi.size()) throw ConfigError("ensemble.domain", "lo and hi differ in dimension");
    if (b.dim() != dim)
      throw ConfigError("ensemble.domain", "dimension mismatch: domain is " + std::to_string(b.dim()) + "D, " +
                                               detail::system_name(sc.system) + " is " + std::to_string(dim) + "D");
    for (int i = 0; i < dim; ++i)
      if (!(b.lo[static_cast<std::size_t>(i)] < b.hi[static_cast<std::size_t>(i)]))
        throw ConfigError("ensemble.domain", "needs lo < hi on every axis");
  }
  for (std::size_t i = 0; i < sc.initial_positions.size(); ++i)
    if (static_cast<int>(sc.initial_positions[i].size()) != dim)
      throw ConfigError("ensemble.initial_positions[" + std::to_string(i) + "]",
                        "dimension mismatch: expected " + std::to_string(dim) + " components");
  if (!sc.initial_velocities.empty()) {
    if (sc.initial_velocities.size() != sc.initial_positions.size())
      throw ConfigError("ensemble.initial_velocities", "count must match ensemble.initial_positions");
    for (std::size_t i = 0; i < sc.initial_velocities.size(); ++i)
      if (static_cast<int>(sc.initial_velocities[i].size()) != dim)
        throw ConfigError("ensemble.initial_velocities[" + std::to_string(i) + "]",
                          "dimension mismatch: expected " + std::to_string(dim) + " components");
    if (sc.mode == RunMode::guidance)
      throw ConfigError("ensemble.initial_velocities", "guidance runs take velocities from the phase gradient");
  }
  if (!sc.initial_positions.empty() && sc.initial_positions.size() != sc.ensemble.n)
    throw ConfigError("ensemble.n", "must equal the number of initial_positions");
  try {
    sc.integrator.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("integrator", e.what());
  }
  try {
    sc.numerics.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("numerics", e.what());
  }
  for (const auto& f : sc.output.formats)
    if (f != "csv" && f != "json" && f != "svg") throw ConfigError("output.formats", "unsupported format \"" + f + "\"");
  for (double t : sc.output.ks_times)
    if (t < sc.time.start || t > sc.time.end) throw ConfigError("output.ks_times", "times must lie within [start, end]");
  if (dim == 3 && !sc.output.plane) {
    for (const auto& f : sc.output.formats)
      if (f == "svg") throw ConfigError("output.plane", "required for svg output of a 3D system (xy, xz or yz)");
  }
  if (sc.output.plane) detail::check_plane(*sc.output.plane, "output.plane");
}

inline ScenarioConfig parse_scenario_json(const Json& doc) {
  detail::Section root(doc, "");
  ScenarioConfig sc;
  sc.name = root.string("name").value_or(sc.name);

  auto sys = root.child("system");
  if (!sys) throw ConfigError("system", "missing required key");
  sc.system = detail::parse_system(std::move(*sys));
  const int dim = detail::system_dim(sc.system);
  const auto defaults = detail::defaults_for(sc.system);
  sc.time.end = defaults.end;
  sc.time.n_outputs = defaults.n_outputs;
  sc.ensemble.mode = defaults.mode;
  sc.ensemble.n = defaults.n;

  sc.mode = detail::parse_enum<RunMode>(
      root, "mode",
      {{"guidance", RunMode::guidance}, {"transition", RunMode::transition}, {"classical", RunMode::classical}},
      RunMode::transition);

  if (auto c = root.child("coupling"))
    sc.coupling = detail::parse_coupling(std::move(*c));
  else
    sc.coupling = sc.mode == RunMode::classical ? Constant{0.0} : Constant{1.0};

  if (auto e = root.child("ensemble")) {
    bool n_given = false;
    if (auto n = e->integer("n")) {
      if (*n < 1) throw ConfigError(e->at("n"), "must be >= 1");
      sc.ensemble.n = static_cast<std::size_t>(*n);
      n_given = true;
    }
    sc.ensemble.mode = detail::parse_enum<SamplerMode>(
        *e, "mode", {{"quantile_1d", SamplerMode::quantile_1d}, {"rejection", SamplerMode::rejection}},
        sc.ensemble.mode);
    sc.ensemble.seed = e->unsigned_integer("seed").value_or(sc.ensemble.seed);
    if (auto d = e->child("domain")) {
      Box b;
      b.lo = d->numbers("lo").value_or(std::vector<double>{});
      b.hi = d->numbers("hi").value_or(std::vector<double>{});
      if (b.lo.empty() || b.hi.empty()) throw ConfigError(d->path(), "needs both lo and hi");
      d->finish();
      sc.ensemble.domain = b;
    }
    sc.ensemble.envelope_margin = e->number("envelope_margin", sc.ensemble.envelope_margin);
    sc.initial_positions = e->points("initial_positions").value_or(std::vector<std::vector<double>>{});
    sc.initial_velocities = e->points("initial_velocities").value_or(std::vector<std::vector<double>>{});
    if (!sc.initial_velocities.empty() && sc.initial_positions.empty())
      throw ConfigError(e->at("initial_velocities"), "requires initial_positions");
    if (!sc.initial_positions.empty() && !n_given) sc.ensemble.n = sc.initial_positions.size();
    e->finish();
  }

  if (auto s = root.child("integrator")) {
    sc.integrator.method = detail::parse_enum<IntegratorMethod>(
        *s, "method", {{"rk4_fixed", IntegratorMethod::rk4_fixed}, {"rk45_adaptive", IntegratorMethod::rk45_adaptive}},
        sc.integrator.method);
    sc.integrator.dt = s->number("dt", sc.integrator.dt);
    sc.integrator.rtol = s->number("rtol", sc.integrator.rtol);
    sc.integrator.atol = s->number("atol", sc.integrator.atol);
    sc.integrator.max_steps = s->integer("max_steps").value_or(sc.integrator.max_steps);
    if (!(sc.integrator.dt > 0.0)) throw ConfigError(s->at("dt"), "must be > 0");
    if (!(sc.integrator.rtol > 0.0)) throw ConfigError(s->at("rtol"), "must be > 0");
    if (!(sc.integrator.atol > 0.0)) throw ConfigError(s->at("atol"), "must be > 0");
    if (sc.integrator.max_steps < 1) throw ConfigError(s->at("max_steps"), "must be >= 1");
    s->finish();
  }

  if (auto s = root.child("time")) {
    sc.time.start = s->number("start", sc.time.start);
    sc.time.end = s->number("end", sc.time.end);
    if (auto n = s->integer("n_outputs")) {
      if (*n < 2 || *n > 1000000) throw ConfigError(s->at("n_outputs"), "must satisfy 2 <= n_outputs <= 1000000");
      sc.time.n_outputs = static_cast<int>(*n);
    }
    if (sc.time.start < 0.0) throw ConfigError(s->at("start"), "must be >= 0");
    if (!(sc.time.end > sc.time.start)) throw ConfigError(s->at("end"), "must be greater than time.start");
    s->finish();
  }

  if (auto s = root.child("numerics")) {
    sc.numerics.h = s->number("h", sc.numerics.h);
    sc.numerics.richardson = s->boolean("richardson").value_or(sc.numerics.richardson);
    sc.numerics.min_rho = s->number("min_rho", sc.numerics.min_rho);
    if (!(sc.numerics.h > 0.0)) throw ConfigError(s->at("h"), "must be > 0");
    if (!(sc.numerics.min_rho > 0.0)) throw ConfigError(s->at("min_rho"), "must be > 0");
    s->finish();
  }

  if (auto s = root.child("output")) {
    sc.output.directory = s->string("directory").value_or(sc.output.directory);
    if (const Json* f = s->raw("formats")) {
      if (!f->is_array()) throw ConfigError(s->at("formats"), "expected an array of strings");
      sc.output.formats.clear();
      for (const auto& item : *f) {
        if (!item.is_string()) throw ConfigError(s->at("formats"), "expected an array of strings");
        sc.output.formats.push_back(item.get<std::string>());
      }
    }
    sc.output.plane = s->string("plane");
    if (sc.output.plane) detail::check_plane(*sc.output.plane, s->at("plane"));
    sc.output.ks_times = s->numbers("ks_times").value_or(std::vector<double>{});
    if (const Json* f = s->raw("fields")) {
      if (!f->is_array()) throw ConfigError(s->at("fields"), "expected an array of field objects");
      for (std::size_t i = 0; i < f->size(); ++i)
        sc.output.fields.push_back(
            detail::parse_field(detail::Section((*f)[i], s->at("fields") + "[" + std::to_string(i) + "]"), dim));
    }
    s->finish();
  }

  root.finish();
  validate_scenario(sc);
  return sc;
}

// Parses a scenario document. Syntax errors carry line and column; every
// other problem is reported with its dotted field path.
inline ScenarioConfig parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    int line = 0, column = 0;
    detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError("", what, line, column);
  }
  try {
    return parse_scenario_json(doc);
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError("", e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigError("", e.what());
  }
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization back to the document format

inline OrderedJson to_json(const SystemVariant& s) {
  return std::visit(
      [](const auto& sys) -> OrderedJson {
        using T = std::decay_t<decltype(sys)>;
        OrderedJson j;
        j["type"] = sys.name();
        if constexpr (std::is_same_v<T, DoubleSlit>) {
          j["rho0"] = sys.params().width;
          j["u"] = sys.params().wavenumber;
          j["X"] = sys.params().half_separation;
        } else if constexpr (std::is_same_v<T, Oscillator2D>) {
          j["k0"] = sys.params().spring;
          j["alpha"] = sys.params().phase;
        } else {
          j["n"] = sys.params().n;
          j["l"] = sys.params().l;
          j["m"] = sys.params().m;
        }
        return j;
      },
      s);
}

inline OrderedJson to_json(const CouplingSchedule& c) {
  return std::visit(
      [](const auto& s) -> OrderedJson {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Logistic>)
          return {{"type", "logistic"}, {"b", s.rate}, {"t0", s.midpoint}};
        else if constexpr (std::is_same_v<T, GaussianCdf>)
          return {{"type", "gaussian_cdf"}, {"mu", s.mean}, {"sigma", s.std_dev}};
        else
          return {{"type", "constant"}, {"p", s.p}};
      },
      c);
}

inline OrderedJson to_json(const ScenarioConfig& sc) {
  OrderedJson j;
  j["name"] = sc.name;
  j["system"] = to_json(sc.system);
  j["coupling"] = to_json(sc.coupling);
  j["mode"] = to_string(sc.mode);
  OrderedJson e;
  e["n"] = sc.ensemble.n;
  e["mode"] = to_string(sc.ensemble.mode);
  e["seed"] = sc.ensemble.seed;
  if (sc.ensemble.domain) e["domain"] = {{"lo", sc.ensemble.domain->lo}, {"hi", sc.ensemble.domain->hi}};
  e["envelope_margin"] = sc.ensemble.envelope_margin;
  if (!sc.initial_positions.empty()) e["initial_positions"] = sc.initial_positions;
  if (!sc.initial_velocities.empty()) e["initial_velocities"] = sc.initial_velocities;
  j["ensemble"] = e;
  j["integrator"] = {{"method", to_string(sc.integrator.method)},
                     {"dt", sc.integrator.dt},
                     {"rtol", sc.integrator.rtol},
                     {"atol", sc.integrator.atol},
                     {"max_steps", sc.integrator.max_steps}};
  j["time"] = {{"start", sc.time.start}, {"end", sc.time.end}, {"n_outputs", sc.time.n_outputs}};
  j["numerics"] = {{"h", sc.numerics.h}, {"richardson", sc.numerics.richardson}, {"min_rho", sc.numerics.min_rho}};
  OrderedJson o;
  o["directory"] = sc.output.directory;
  o["formats"] = sc.output.formats;
  if (sc.output.plane) o["plane"] = *sc.output.plane;
  if (!sc.output.ks_times.empty()) o["ks_times"] = sc.output.ks_times;
  if (!sc.output.fields.empty()) {
    o["fields"] = OrderedJson::array();
    for (const auto& f : sc.output.fields)
      o["fields"].push_back({{"quantity", f.quantity},
                             {"a_range", {f.a_lo, f.a_hi}},
                             {"b_range", {f.b_lo, f.b_hi}},
                             {"grid", f.grid},
                             {"t", f.t},
                             {"plane", f.plane},
                             {"offset", f.offset}});
  }
  j["output"] = o;
  return j;
}

// ---------------------------------------------------------------------------
// Figure presets

namespace detail {

inline ScenarioConfig double_slit_panel(const std::string& name, double b, double t0) {
  ScenarioConfig sc;
  sc.name = name;
  sc.system = DoubleSlit{};
  sc.coupling = Logistic{b, t0};
  sc.mode = RunMode::transition;
  sc.ensemble.mode = SamplerMode::quantile_1d;
  sc.ensemble.n = 50;
  sc.time = {0.0, 2.0, 201};
  return sc;
}

inline const std::vector<std::vector<double>>& oscillator_starts() {
  static const std::vector<std::vector<double>> pts{{1.0, 0.0}, {0.0, 1.5}, {-2.0, 0.0}, {0.0, -0.7}};
  return pts;
}

inline ScenarioConfig oscillator_panel(const std::string& name, RunMode mode, CouplingSchedule c) {
  ScenarioConfig sc;
  sc.name = name;
  sc.system = Oscillator2D{};
  sc.coupling = c;
  sc.mode = mode;
  sc.initial_positions = oscillator_starts();
  sc.ensemble.n = sc.initial_positions.size();
  sc.time = {0.0, 35.0, 701};
  return sc;
}

inline const std::vector<std::vector<double>>& hydrogen_starts() {
  static const std::vector<std::vector<double>> pts{{4.0, 0.0, 0.0}, {0.0, 2.0, 1.0}, {-3.0, 0.0, 2.0}};
  return pts;
}

inline ScenarioConfig hydrogen_panel(const std::string& name, RunMode mode, CouplingSchedule c) {
  ScenarioConfig sc;
  sc.name = name;
  sc.system = Hydrogen{};
  sc.coupling = c;
  sc.mode = mode;
  sc.initial_positions = hydrogen_starts();
  sc.ensemble.n = sc.initial_positions.size();
  sc.time = {0.0, 2500.0, 2501};
  sc.output.plane = "xy";
  return sc;
}

inline FieldSpec field(std::string q, double a_lo, double a_hi, double b_lo, double b_hi, int grid,
                       std::string plane = "xy") {
  FieldSpec f;
  f.quantity = std::move(q);
  f.a_lo = a_lo;
  f.a_hi = a_hi;
  f.b_lo = b_lo;
  f.b_hi = b_hi;
  f.grid = grid;
  f.plane = std::move(plane);
  return f;
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "fig1_quantum", "fig1_meso_a", "fig1_meso_b", "fig1_meso_c", "fig1_meso_d", "fig1_classical",
      "fig3_quantum", "fig3_meso_a", "fig3_meso_b", "fig3_classical", "fig4",      "fig5",
      "fig6",         "fig7",        "fig8"};
  return names;
}

// Multi-panel figures expand to their panels; single-panel names map to themselves.
inline std::vector<std::string> preset_group(const std::string& name) {
  if (name == "fig1")
    return {"fig1_quantum", "fig1_meso_a", "fig1_meso_b", "fig1_meso_c", "fig1_meso_d", "fig1_classical"};
  if (name == "fig3") return {"fig3_quantum", "fig3_meso_a", "fig3_meso_b", "fig3_classical"};
  return {name};
}

inline ScenarioConfig preset(const std::string& name) {
  using namespace detail;
  ScenarioConfig sc;
  if (name == "fig1_quantum") sc = double_slit_panel(name, 15.0, 2.0);
  else if (name == "fig1_meso_a") sc = double_slit_panel(name, 0.5, 2.0);
  else if (name == "fig1_meso_b") sc = double_slit_panel(name, 15.0, 1.0);
  else if (name == "fig1_meso_c") sc = double_slit_panel(name, 20.0, 0.5);
  else if (name == "fig1_meso_d") sc = double_slit_panel(name, 30.0, 0.2);
  else if (name == "fig1_classical") sc = double_slit_panel(name, 40.0, 0.0);
  else if (name == "fig3_quantum") sc = oscillator_panel(name, RunMode::transition, Logistic{1.0, 200.0});
  else if (name == "fig3_meso_a") sc = oscillator_panel(name, RunMode::transition, Logistic{16.0, 10.0});
  else if (name == "fig3_meso_b") sc = oscillator_panel(name, RunMode::transition, Logistic{0.5, 4.0});
  else if (name == "fig3_classical") sc = oscillator_panel(name, RunMode::transition, Logistic{37.0, 0.0});
  else if (name == "fig4") {
    sc = double_slit_panel(name, 15.0, 2.0);
    sc.mode = RunMode::guidance;
    sc.coupling = Constant{1.0};
    sc.time = {0.0, 2.5, 251};
    sc.output.fields.push_back(field("Q", -12.0, 12.0, 0.0, 2.5, 161));
  } else if (name == "fig5") {
    sc = oscillator_panel(name, RunMode::guidance, Constant{1.0});
    sc.output.fields.push_back(field("Q", -3.0, 3.0, -3.0, 3.0, 101));
  } else if (name == "fig6") {
    sc = hydrogen_panel(name, RunMode::classical, Constant{0.0});
    sc.output.fields.push_back(field("V", -12.0, 12.0, -12.0, 12.0, 121));
  } else if (name == "fig7") {
    sc = hydrogen_panel(name, RunMode::guidance, Constant{1.0});
    sc.output.fields.push_back(field("rho", -15.0, 15.0, -15.0, 15.0, 121, "xz"));
    sc.output.fields.push_back(field("Q", -15.0, 15.0, -15.0, 15.0, 121, "xz"));
  } else if (name == "fig8") {
    sc = hydrogen_panel(name, RunMode::transition, Logistic{0.014, 1250.0});
  } else {
    throw ConfigError("preset", "unknown preset \"" + name + "\"");
  }
  sc.output.directory = "out";
  validate_scenario(sc);
  return sc;
}

// Plot annotation listing the run parameters, e.g.
// "b=15 t0=2 | 0<=t<=2 | rho0=0.625 u=-2 X=2.5 | n=50".
inline std::string annotation(const ScenarioConfig& sc) {
  using detail::fmt_g;
  std::string out;
  switch (sc.mode) {
    case RunMode::guidance: out = "guidance P=1"; break;
    case RunMode::classical: out = "classical P=0"; break;
    case RunMode::transition: out = describe(sc.coupling); break;
  }
  out += " | " + fmt_g(sc.time.start) + "<=t<=" + fmt_g(sc.time.end) + " | ";
  out += std::visit(
      [](const auto& sys) -> std::string {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, DoubleSlit>) {
          return "rho0=" + fmt_g(sys.params().width) + " u=" + fmt_g(sys.params().wavenumber) +
                 " X=" + fmt_g(sys.params().half_separation);
        } else if constexpr (std::is_same_v<T, Oscillator2D>) {
          const double a = sys.params().phase;
          const std::string alpha = std::abs(a - std::numbers::pi / 2.0) < 1e-12 ? "pi/2" : fmt_g(a);
          return "k0=" + fmt_g(sys.params().spring) + " alpha=" + alpha;
        } else {
          return "(n,l,m)=(" + std::to_string(sys.params().n) + "," + std::to_string(sys.params().l) + "," +
                 std::to_string(sys.params().m) + ")";
        }
      },
      sc.system);
  out += " | n=" + std::to_string(sc.ensemble.n);
  return out;
}

}  // namespace qct
