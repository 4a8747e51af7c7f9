#ifndef FMN_CLI_HPP
#define FMN_CLI_HPP

#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmn/workflows.hpp"

namespace fmn {

/// 0 success, 1 domain or input-content error, 2 usage/file/preset lookup.
inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::usage:
    case Errc::io:
    case Errc::not_found:
      return 2;
    default:
      return 1;
  }
}

namespace cli_detail {

struct Output {
  std::string format = "json";
  std::string out_path;
};

inline void add_output(CLI::App* cmd, Output& o) {
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out_path, "write to PATH (plus PATH.meta.json) instead of stdout");
}

inline void emit(const Output& o, const json& payload, const std::function<std::string()>& csv, std::ostream& out) {
  const ExportFormat fmt = parse_format(o.format);
  const std::string text = fmt == ExportFormat::Json ? dump(payload) : csv();
  if (o.out_path.empty())
    out << text;
  else
    export_report(text, fmt, o.out_path);
}

inline std::optional<GwpHorizon> horizon_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_horizon(s);
}

inline HardwareSpec load_spec(const std::string& ref) {
  try {
    return spec_from_json(load_json(ref));
  } catch (const Error& e) {
    if (e.code() == Errc::io || e.code() == Errc::not_found) throw;
    throw Error(e.code(), std::string(e.what()) + " (in " + ref + ")", e.field());
  }
}

inline FabProfile load_profile(const std::string& ref) { return profile_from_json(load_json(ref)); }

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (auto part : detail::split(s, ',')) out.push_back(detail::parse_double(part, what));
  return out;
}

}  // namespace cli_detail

using ServeFn = std::function<int(const std::string& bind, int port, bool cors_dev, std::ostream& err)>;

/// Runs one command line. `serve` is injected so the CLI does not depend
/// on the HTTP layer.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const ServeFn& serve = {}) {
  using namespace cli_detail;
  CLI::App app{"Fluorinated-compound emission modelling for semiconductor hardware", "forgetmenot"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string spec_ref, profile_ref, horizon, levers_ref;
  Output o;
  std::function<void()> action;

  auto* est = app.add_subcommand("estimate", "per-source emissions for one part");
  est->add_option("--spec", spec_ref, "spec JSON or preset:NAME")->required();
  est->add_option("--profile", profile_ref, "fab profile JSON or preset:NAME")->required();
  est->add_option("--horizon", horizon)->check(CLI::IsMember({"y20", "y100", "y500"}));
  add_output(est, o);
  est->callback([&] {
    action = [&] {
      const auto profile = load_profile(profile_ref);
      auto b = total_emission(load_spec(spec_ref), profile, horizon_opt(horizon).value_or(profile.default_horizon));
      emit(o, to_json(b), [&] { return breakdown_csv(b); }, out);
    };
  });

  std::string axis_ref, nodes, capacities, normalization = "none";
  auto* sw = app.add_subcommand("sweep", "emissions along a node, capacity or generation axis");
  sw->add_option("--spec", spec_ref, "base spec")->required();
  sw->add_option("--profile", profile_ref)->required();
  auto* axis_opt = sw->add_option("--axis", axis_ref, "axis JSON {kind, values|specs}");
  auto* nodes_opt = sw->add_option("--nodes", nodes, "comma-separated node sizes in nm");
  auto* cap_opt = sw->add_option("--capacities", capacities, "comma-separated capacities (GB for dram, TB otherwise)");
  axis_opt->excludes(nodes_opt)->excludes(cap_opt);
  nodes_opt->excludes(cap_opt);
  sw->add_option("--normalize", normalization)->check(CLI::IsMember({"none", "per_gb", "per_tb"}));
  sw->add_option("--horizon", horizon)->check(CLI::IsMember({"y20", "y100", "y500"}));
  add_output(sw, o);
  sw->callback([&] {
    if (axis_ref.empty() && nodes.empty() && capacities.empty())
      throw CLI::RequiredError("one of --axis, --nodes, --capacities");
    action = [&] {
      SweepAxis axis;
      if (!axis_ref.empty())
        axis = sweep_axis_from_json(load_json(axis_ref));
      else if (!nodes.empty())
        axis = {SweepAxisKind::NodeNm, parse_list(nodes, "--nodes"), {}};
      else
        axis = {SweepAxisKind::Capacity, parse_list(capacities, "--capacities"), {}};
      const auto profile = load_profile(profile_ref);
      auto s = sweep(axis, load_spec(spec_ref), profile, horizon_opt(horizon).value_or(profile.default_horizon),
                     parse_normalization(normalization));
      emit(o, to_json(s), [&] { return sweep_csv(s); }, out);
    };
  });

  auto* sc = app.add_subcommand("scenario", "apply design/material levers and compare");
  sc->add_option("--spec", spec_ref)->required();
  sc->add_option("--profile", profile_ref)->required();
  sc->add_option("--levers", levers_ref, "levers JSON array or preset:NAME")->required();
  sc->add_option("--horizon", horizon)->check(CLI::IsMember({"y20", "y100", "y500"}));
  add_output(sc, o);
  sc->callback([&] {
    action = [&] {
      const auto profile = load_profile(profile_ref);
      auto r = run_scenario(load_spec(spec_ref), profile, levers_from_json(load_json(levers_ref)),
                            horizon_opt(horizon).value_or(profile.default_horizon));
      emit(o, to_json(r), [&] { return scenario_csv(r); }, out);
    };
  });

  std::string records_ref, site_ref, template_ref, pooling = "pooled", baseline_mode = "mean", profile_out;
  CalibrateRequest creq;
  auto* cal = app.add_subcommand("calibrate", "fit base coefficients from facility emission records");
  cal->add_option("--records", records_ref, "CSV lat,lon,year,compound,mass_g or preset:NAME")->required();
  cal->add_option("--site", site_ref, "facility site JSON")->required();
  cal->add_option("--template", template_ref, "profile whose null coefficients are fitted")->required();
  cal->add_option("--radius", creq.baseline.radius_miles, "baseline radius in miles")->check(CLI::PositiveNumber);
  cal->add_option("--tolerance", creq.baseline.facility_tolerance_miles, "co-location tolerance in miles")
      ->check(CLI::PositiveNumber);
  cal->add_option("--baseline", baseline_mode)->check(CLI::IsMember({"mean", "per_area"}));
  cal->add_option("--pooling", pooling)->check(CLI::IsMember({"pooled", "per_year_mean"}));
  cal->add_option("--profile-out", profile_out, "also write the calibrated profile here");
  add_output(cal, o);
  cal->callback([&] {
    action = [&] {
      if (o.format == "csv") throw Error(Errc::usage, "calibrate writes JSON only", "format");
      creq.baseline.mode = baseline_mode == "mean" ? BaselineMode::MeanPerRecord : BaselineMode::TotalPerArea;
      creq.calibration.pooling = pooling == "pooled" ? YearPooling::Pooled : YearPooling::PerYearMean;
      auto records = records_from_csv(load_source(records_ref));
      auto outcome = calibrate(records, site_from_json(load_json(site_ref)), load_profile(template_ref), creq);
      for (const auto& w : outcome.result.warnings) err << "warning: " << w << "\n";
      if (!profile_out.empty()) write_file(profile_out, dump(to_json(outcome.profile)));
      emit(o, to_json(outcome), {}, out);
    };
  });

  std::string catalog_ref, horizons = "y500";
  AssembleRequest areq;
  areq.threads = detail::default_threads();
  auto* as = app.add_subcommand("assemble", "rank cpu/dram/storage assemblies by total emissions");
  as->add_option("--catalog", catalog_ref, "catalog JSON or preset:NAME")->required();
  as->add_option("--class", areq.server_class, "GeneralPurpose, ComputeOptimized, MemoryOptimized, "
                                               "StorageOptimized or a class defined in the catalog");
  as->add_option("--horizons", horizons, "comma-separated, e.g. y20,y100,y500");
  as->add_flag("--pareto", areq.pareto, "include the emissions/performance Pareto front");
  as->add_option("--threads", areq.threads)->check(CLI::PositiveNumber);
  add_output(as, o);
  as->callback([&] {
    action = [&] {
      try {
        areq.horizons = parse_horizon_list(horizons);
      } catch (const Error& e) {
        throw Error(Errc::usage, e.what(), "horizons");
      }
      if (o.format == "csv" && areq.horizons.size() != 1)
        throw Error(Errc::usage, "csv output takes a single horizon", "horizons");
      auto r = assemble(catalog_from_json(load_json(catalog_ref)), areq);
      emit(o, to_json(r), [&] {
        const GwpHorizon h = r.horizons.front();
        return ranking_csv(areq.pareto ? r.pareto.at(h) : r.rankings.at(h).ranking);
      }, out);
    };
  });

  std::string breakdown_ref, measured_ref;
  auto* va = app.add_subcommand("validate", "compare a breakdown against measured per-source values");
  auto* bd_opt = va->add_option("--breakdown", breakdown_ref, "breakdown JSON (as written by estimate)");
  va->add_option("--spec", spec_ref, "evaluate this spec instead of reading --breakdown")->excludes(bd_opt);
  va->add_option("--profile", profile_ref);
  va->add_option("--measured", measured_ref, "measured JSON (breakdown or {source: gco2eq})")->required();
  add_output(va, o);
  va->callback([&] {
    if (breakdown_ref.empty() && (spec_ref.empty() || profile_ref.empty()))
      throw CLI::RequiredError("--breakdown (or --spec with --profile)");
    action = [&] {
      EmissionBreakdown b = breakdown_ref.empty()
                                ? total_emission(load_spec(spec_ref), load_profile(profile_ref))
                                : breakdown_from_json(load_json(breakdown_ref));
      auto v = compare_to_measured(b, measured_from_json(load_json(measured_ref)));
      emit(o, to_json(v), [&] { return validation_csv(v); }, out);
    };
  });

  std::string bind = "127.0.0.1";
  int port = 8086;
  bool cors_dev = false;
  auto* sv = app.add_subcommand("serve", "run the HTTP/JSON API");
  sv->add_option("--bind", bind);
  sv->add_option("--port", port)->check(CLI::Range(0, 65535));
  sv->add_flag("--cors-dev", cors_dev, "permissive CORS headers for local UI development");
  int serve_status = 0;
  sv->callback([&] {
    action = [&] {
      if (!serve) throw Error(Errc::usage, "serve is not available in this build");
      serve_status = serve(bind, port, cors_dev, err);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return serve_status;
}

}  // namespace fmn

#endif  // FMN_CLI_HPP
