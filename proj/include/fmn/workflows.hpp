#ifndef FMN_WORKFLOWS_HPP
#define FMN_WORKFLOWS_HPP

// Request-level operations shared by the CLI and the HTTP service. Both
// front ends parse their inputs into these types and print the returned
// JSON, so their payloads agree.

#include <optional>
#include <string>
#include <vector>

#include "fmn/calibration.hpp"
#include "fmn/catalog.hpp"
#include "fmn/presets.hpp"
#include "fmn/reporting.hpp"
#include "fmn/scenario.hpp"

namespace fmn {

/// JSON document behind a file path or "preset:NAME".
inline json load_json(std::string_view ref) { return parse_json_text(load_source(ref), std::string(ref)); }

/// A preset name with or without the "preset:" prefix.
inline json preset_json(std::string_view name) {
  if (name.starts_with(kPresetPrefix)) name.remove_prefix(kPresetPrefix.size());
  return parse_json_text(preset_text(name), "preset:" + std::string(name));
}

inline const ProfileResolver& preset_resolver() {
  static const ProfileResolver r = [](std::string_view name) { return preset_profile(name); };
  return r;
}

inline json estimate_payload(const HardwareSpec& spec, const FabProfile& profile, std::optional<GwpHorizon> h) {
  return to_json(total_emission(spec, profile, h.value_or(profile.default_horizon)));
}

inline json scenario_payload(const HardwareSpec& spec, const FabProfile& profile, const std::vector<Lever>& levers,
                             std::optional<GwpHorizon> h) {
  return to_json(run_scenario(spec, profile, levers, h.value_or(profile.default_horizon)));
}

inline json sweep_payload(const SweepAxis& axis, const HardwareSpec& base, const FabProfile& profile,
                          std::optional<GwpHorizon> h, Normalization norm) {
  return to_json(sweep(axis, base, profile, h.value_or(profile.default_horizon), norm));
}

inline json validate_payload(const EmissionBreakdown& b, const std::map<SourceId, double>& measured) {
  return to_json(compare_to_measured(b, measured));
}

struct AssembleRequest {
  std::string server_class = "GeneralPurpose";
  std::vector<GwpHorizon> horizons{GwpHorizon::Y500};
  bool pareto = false;
  unsigned threads = 1;
};

struct AssembleResult {
  std::string server_class;
  std::vector<GwpHorizon> horizons;
  std::map<GwpHorizon, RankingReport> rankings;
  std::map<GwpHorizon, std::vector<Assembly>> pareto;
  std::optional<RankStabilityReport> stability;
};

inline AssembleResult assemble(const Catalog& catalog, const AssembleRequest& req) {
  if (req.horizons.empty()) throw Error(Errc::empty_input, "no horizons requested", "horizons");
  const ServerClass cls = catalog.server_class(req.server_class);
  AssembleResult out{req.server_class, req.horizons, {}, {}, std::nullopt};
  for (GwpHorizon h : req.horizons) {
    auto feasible = enumerate_assemblies(catalog, cls, h, preset_resolver(), {req.threads});
    if (feasible.empty())
      throw Error(Errc::no_feasible_assembly, "no feasible assembly for class '" + req.server_class + "'", "class");
    if (req.pareto) out.pareto[h] = pareto_front(feasible);
    out.rankings.emplace(h, rank_assemblies(std::move(feasible)));
  }
  if (req.horizons.size() > 1) {
    RankStabilityReport r;
    r.horizons = req.horizons;
    for (GwpHorizon h : req.horizons) {
      auto& o = r.order[h];
      const auto& ranking = out.rankings.at(h).ranking;
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        o.push_back(ranking[i].key);
        r.ranks[ranking[i].key][h] = i + 1;
      }
    }
    for (GwpHorizon h : req.horizons) {
      HorizonWinner w{h, r.order[h].front(), {}};
      for (GwpHorizon other : req.horizons) w.rank_under[other] = r.ranks[w.winner][other];
      r.winners.push_back(std::move(w));
    }
    out.stability = std::move(r);
  }
  return out;
}

inline json to_json(const AssembleResult& r) {
  json horizons = json::array();
  json results = json::object();
  for (GwpHorizon h : r.horizons) {
    horizons.push_back(horizon_name(h));
    json entry = to_json(r.rankings.at(h));
    if (auto it = r.pareto.find(h); it != r.pareto.end()) entry["pareto"] = assemblies_to_json(it->second);
    results[std::string(horizon_name(h))] = entry;
  }
  json j{{"class", r.server_class}, {"horizons", horizons}, {"results", results}};
  if (r.stability) j["stability"] = to_json(*r.stability);
  return j;
}

inline std::vector<GwpHorizon> parse_horizon_list(std::string_view text) {
  std::vector<GwpHorizon> out;
  for (const auto& part : detail::split(text, ',')) {
    const GwpHorizon h = parse_horizon(part);
    if (std::find(out.begin(), out.end(), h) != out.end())
      throw Error(Errc::schema, "horizon listed twice: " + std::string(part), "horizons");
    out.push_back(h);
  }
  return out;
}

struct CalibrateRequest {
  BaselineOptions baseline;
  CalibrationOptions calibration;
};

struct CalibrateOutcome {
  AttributableMasses masses;
  CalibrationResult result;
  FabProfile profile;
};

inline CalibrateOutcome calibrate(const std::vector<EmissionRecord>& records, const FacilitySite& site,
                                  const FabProfile& tmpl, const CalibrateRequest& req = {}) {
  CalibrateOutcome out{attributable_masses(records, site, req.baseline), {}, tmpl};
  out.result = fit_base_coefficients(out.masses.mass_g, site, tmpl, req.calibration);
  out.result.records_used = out.masses.records_used;
  out.result.warnings.insert(out.result.warnings.begin(), out.masses.warnings.begin(), out.masses.warnings.end());
  out.profile = apply_calibration(tmpl, out.result);
  return out;
}

inline json to_json(const CalibrateOutcome& o) {
  return json{{"calibration", to_json(o.result, &o.masses)}, {"profile", to_json(o.profile)}};
}

}  // namespace fmn

#endif  // FMN_WORKFLOWS_HPP
