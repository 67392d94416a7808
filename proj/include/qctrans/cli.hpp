#pragma once

// Command-line front end: simulate, preset-list, field, sample, validate.
// Exit status 0 on success, 1 for invalid configuration or usage, 2 for
// runtime failures. Diagnostics go to `err`; data goes to files or `out`.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qctrans/config.hpp"
#include "qctrans/ensemble.hpp"
#include "qctrans/export.hpp"
#include "qctrans/field_grid.hpp"
#include "qctrans/svg.hpp"

namespace qct::cli {

namespace fs = std::filesystem;

struct Source {
  std::string config_path;
  std::string preset_name;
};

namespace detail {

inline std::vector<ScenarioConfig> load_sources(const Source& src) {
  if (!src.config_path.empty() && !src.preset_name.empty())
    throw ConfigError("", "give either --config or --preset, not both");
  if (!src.config_path.empty()) return {load_scenario(src.config_path)};
  if (src.preset_name.empty()) throw ConfigError("", "one of --config or --preset is required");
  std::vector<ScenarioConfig> out;
  for (const auto& name : preset_group(src.preset_name)) out.push_back(preset(name));
  return out;
}

// Field used by `field` when the scenario does not list any.
inline FieldSpec default_field(const ScenarioConfig& sc) {
  FieldSpec f;
  f.quantity = "Q";
  switch (qct::detail::system_dim(sc.system)) {
    case 1:
      f.a_lo = -12.0, f.a_hi = 12.0, f.b_lo = sc.time.start, f.b_hi = sc.time.end;
      break;
    case 2:
      break;
    default:
      f.a_lo = -15.0, f.a_hi = 15.0, f.b_lo = -15.0, f.b_hi = 15.0, f.plane = "xz";
      break;
  }
  f.t = sc.time.start;
  return f;
}

inline std::string field_stem(const ScenarioConfig& sc, const FieldSpec& f, std::size_t k, std::size_t count) {
  std::string stem = sc.name + "_" + f.quantity;
  if (count > 1) {
    bool unique = true;
    for (std::size_t i = 0; i < sc.output.fields.size(); ++i)
      if (i != k && sc.output.fields[i].quantity == f.quantity) unique = false;
    if (!unique) stem += "_" + std::to_string(k);
  }
  return stem;
}

inline bool wants(const ScenarioConfig& sc, const std::string& format) {
  return std::find(sc.output.formats.begin(), sc.output.formats.end(), format) != sc.output.formats.end();
}

inline std::string field_title(const ScenarioConfig& sc, const FieldGrid& g) {
  std::string title = sc.name + ": " + g.quantity;
  if (g.a_label != "x" || g.b_label != "t") {
    std::ostringstream ss;
    ss << " at t=" << g.t;
    title += ss.str();
  }
  return title;
}

inline std::vector<fs::path> write_fields(const ScenarioConfig& sc, const std::vector<FieldSpec>& fields,
                                          const fs::path& dir) {
  std::vector<fs::path> written;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const FieldGrid g = compute_field(sc.system, fields[k], sc.numerics);
    const std::string stem = field_stem(sc, fields[k], k, fields.size());
    if (wants(sc, "csv")) {
      write_file(dir / (stem + ".csv"), to_csv(g));
      written.push_back(dir / (stem + ".csv"));
    }
    if (wants(sc, "json")) {
      write_file(dir / (stem + ".json"), to_json(g).dump(2) + "\n");
      written.push_back(dir / (stem + ".json"));
    }
    if (wants(sc, "svg")) {
      write_file(dir / (stem + ".svg"), svg::render(svg::field_plot(g, field_title(sc, g), annotation(sc))));
      written.push_back(dir / (stem + ".svg"));
    }
  }
  return written;
}

inline void simulate_one(const ScenarioConfig& sc, const fs::path& dir, std::ostream& err) {
  const EnsembleResult res = run_ensemble(sc);
  std::vector<fs::path> written;
  write_file(dir / (sc.name + "_scenario.json"), to_json(sc).dump(2) + "\n");
  written.push_back(dir / (sc.name + "_scenario.json"));
  if (wants(sc, "csv")) {
    write_file(dir / (sc.name + ".csv"), to_csv(res));
    written.push_back(dir / (sc.name + ".csv"));
  }
  if (wants(sc, "json")) {
    write_file(dir / (sc.name + ".json"), to_json_text(res));
    written.push_back(dir / (sc.name + ".json"));
  }
  if (wants(sc, "svg")) {
    write_file(dir / (sc.name + ".svg"),
               svg::render(svg::trajectory_plot(res, sc.output.plane, sc.name, annotation(sc))));
    written.push_back(dir / (sc.name + ".svg"));
  }
  const auto fw = write_fields(sc, sc.output.fields, dir);
  written.insert(written.end(), fw.begin(), fw.end());

  const auto& tr = res.truncation_report;
  err << sc.name << ": " << res.trajectories.size() << " trajectories (" << tr.completed << " completed, "
      << tr.singular_stop << " singular_stop, " << tr.step_limit << " step_limit)\n";
  for (const auto& m : res.distribution_metrics)
    err << "  KS " << m.marginal << " at t=" << m.t << ": " << m.statistic << " (n=" << m.n << ")\n";
  for (const auto& p : written) err << "  wrote " << p.string() << '\n';
}

inline void write_samples(const ScenarioConfig& sc, std::ostream& out) {
  std::visit(
      [&](const auto& sys) {
        using S = std::decay_t<decltype(sys)>;
        constexpr int D = S::dim;
        const auto states = initial_states(sys, sc);
        out << "trajectory_id";
        for (int i = 0; i < D; ++i) out << ',' << qct::detail::axis_name(i);
        for (int i = 0; i < D; ++i) out << ",v" << qct::detail::axis_name(i);
        out << '\n';
        for (std::size_t k = 0; k < states.size(); ++k) {
          out << k;
          for (double x : states[k].x) out << ',' << qct::detail::fmt15(x);
          for (double v : states[k].v) out << ',' << qct::detail::fmt15(v);
          out << '\n';
        }
      },
      sc.system);
}

}  // namespace detail

// Runs one command line (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Quantum-to-classical trajectory transitions", "qctrans"};
  app.require_subcommand(1);

  Source src;
  std::string out_dir;
  std::vector<std::string> formats;
  std::optional<std::size_t> n_override;
  std::optional<std::uint64_t> seed_override;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--config", src.config_path, "Scenario document (JSON)");
    sub->add_option("--preset", src.preset_name, "Figure preset name (see preset-list)");
  };

  auto* simulate = app.add_subcommand("simulate", "Run an ensemble and export trajectories");
  add_source(simulate);
  simulate->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  simulate->add_option("--format", formats, "Output formats: csv, json, svg")->delimiter(',');
  simulate->add_option("--n", n_override, "Ensemble size override");
  simulate->add_option("--seed", seed_override, "Sampler seed override");

  auto* list = app.add_subcommand("preset-list", "List figure presets");

  std::string quantity;
  std::optional<int> grid;
  std::optional<double> field_t;
  auto* field = app.add_subcommand("field", "Dump rho, S, Q or V on a grid");
  add_source(field);
  field->add_option("--quantity", quantity, "rho, S, Q or V")->check(CLI::IsMember({"rho", "S", "Q", "V"}));
  field->add_option("--grid", grid, "Points per axis")->check(CLI::Range(2, 2001));
  field->add_option("--t", field_t, "Time slice for 2D and 3D systems");
  field->add_option("--out", out_dir, "Output directory; CSV goes to standard output when omitted");
  field->add_option("--format", formats, "Output formats: csv, json, svg")->delimiter(',');

  std::string sample_file;
  auto* sample = app.add_subcommand("sample", "Emit initial conditions only");
  add_source(sample);
  sample->add_option("--out", sample_file, "CSV file; standard output when omitted");
  sample->add_option("--n", n_override, "Ensemble size override");
  sample->add_option("--seed", seed_override, "Sampler seed override");

  auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
  add_source(validate);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (list->parsed()) {
      for (const auto& name : preset_names()) out << name << '\t' << annotation(preset(name)) << '\n';
      return 0;
    }

    std::vector<ScenarioConfig> scenarios = detail::load_sources(src);
    for (auto& sc : scenarios) {
      if (n_override) {
        if (!sc.initial_positions.empty())
          throw ConfigError("ensemble.n", "cannot override the size of an explicit initial_positions list");
        sc.ensemble.n = *n_override;
      }
      if (seed_override) sc.ensemble.seed = *seed_override;
      if (!formats.empty()) sc.output.formats = formats;
      if (!out_dir.empty()) sc.output.directory = out_dir;
      validate_scenario(sc);
    }

    if (validate->parsed()) {
      for (const auto& sc : scenarios) err << sc.name << ": ok (" << annotation(sc) << ")\n";
      return 0;
    }

    if (simulate->parsed()) {
      for (const auto& sc : scenarios) detail::simulate_one(sc, sc.output.directory, err);
      return 0;
    }

    if (field->parsed()) {
      for (auto& sc : scenarios) {
        std::vector<FieldSpec> fields = sc.output.fields;
        if (fields.empty()) fields.push_back(detail::default_field(sc));
        if (!quantity.empty()) {
          fields.resize(1);
          fields[0].quantity = quantity;
        }
        for (auto& f : fields) {
          if (grid) f.grid = *grid;
          if (field_t) f.t = *field_t;
        }
        if (out_dir.empty()) {
          for (const auto& f : fields) write_csv(compute_field(sc.system, f, sc.numerics), out);
        } else {
          for (const auto& p : detail::write_fields(sc, fields, out_dir)) err << "wrote " << p.string() << '\n';
        }
      }
      return 0;
    }

    if (sample->parsed()) {
      for (const auto& sc : scenarios) {
        if (sample_file.empty()) {
          detail::write_samples(sc, out);
        } else {
          std::ostringstream ss;
          detail::write_samples(sc, ss);
          write_file(sample_file, ss.str());
          err << "wrote " << sample_file << '\n';
        }
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  return run(std::move(args), out, err);
}

}  // namespace qct::cli
