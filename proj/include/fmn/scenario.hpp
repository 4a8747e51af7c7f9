#ifndef FMN_SCENARIO_HPP
#define FMN_SCENARIO_HPP

#include <array>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fmn/engine.hpp"
#include "fmn/json.hpp"

namespace fmn {

// Levers are pure transformations of a (spec, profile) pair.

/// Trade cores for cache on a CPU.
struct CoreCacheInterchange {
  double delta_cores = 0.0;
  double delta_cache_mb = 0.0;
};

/// Scale chamber-cleaning and etching reference step counts.
struct CleanEtchRebalance {
  double clean_step_multiplier = 1.0;
  double etch_step_multiplier = 1.0;
};

/// Replace a source's chemistry with a lower-GWP one that needs more steps.
struct LowGwpSubstitution {
  SourceId target = SourceId::ChamberCleaning;
  SourceGwp replacement;
  double step_multiplier = 1.25;
};

/// Set a new release fraction, either directly or from a recovery factor.
struct RecoveryChange {
  std::optional<double> release_fraction;
  std::optional<double> recovery;

  double new_release_fraction() const {
    return release_fraction ? *release_fraction : ReleaseConvention::from_recovery(*recovery).release_fraction;
  }
};

/// Capture-and-reuse loop: net emission of each affected source is scaled.
/// An empty source set means "sources releasing NF3 or C2F6".
struct ReclaimLoop {
  std::vector<SourceId> affected_sources;
  double net_multiplier = 0.5;
};

struct LithographySwitch {
  Lithography to = Lithography::EUV;
};

using Lever = std::variant<CoreCacheInterchange, CleanEtchRebalance, LowGwpSubstitution, RecoveryChange,
                           ReclaimLoop, LithographySwitch>;

struct ScenarioState {
  HardwareSpec spec;
  FabProfile profile;
};

inline std::vector<SourceId> default_reclaim_sources(const FabProfile& profile) {
  std::vector<SourceId> out;
  for (SourceId s : kAllSources)
    for (const auto& e : source_compounds(profile, s))
      if (e.ratio > 0.0 && (e.compound == "NF3" || e.compound == "C2F6")) {
        out.push_back(s);
        break;
      }
  return out;
}

namespace detail {
inline void require_multiplier(double m, const char* field) {
  if (!(m > 0.0)) throw Error(Errc::invalid_lever, "multiplier must be > 0", field);
}
}  // namespace detail

inline ScenarioState apply_lever(const HardwareSpec& spec, const FabProfile& profile, const Lever& lever) {
  ScenarioState out{spec, profile};
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, CoreCacheInterchange>) {
          if (spec.kind != HardwareKind::CPU)
            throw Error(Errc::kind_mismatch, "core/cache interchange requires a CPU spec", "spec.kind");
          const double cores = spec.feature("cores") + l.delta_cores;
          const double cache = spec.feature("cache_mb") + l.delta_cache_mb;
          if (cores < 0.0) throw Error(Errc::invalid_lever, "resulting core count is negative", "delta_cores");
          if (cache < 0.0) throw Error(Errc::invalid_lever, "resulting cache size is negative", "delta_cache_mb");
          out.spec.features["cores"] = cores;
          out.spec.features["cache_mb"] = cache;
        } else if constexpr (std::is_same_v<T, CleanEtchRebalance>) {
          detail::require_multiplier(l.clean_step_multiplier, "clean_step_multiplier");
          detail::require_multiplier(l.etch_step_multiplier, "etch_step_multiplier");
          out.profile.reference.steps_for(SourceId::ChamberCleaning) *= l.clean_step_multiplier;
          out.profile.reference.steps_for(SourceId::Etching) *= l.etch_step_multiplier;
        } else if constexpr (std::is_same_v<T, LowGwpSubstitution>) {
          detail::require_multiplier(l.step_multiplier, "step_multiplier");
          if (!source_info(l.target).has_steps && l.step_multiplier != 1.0)
            throw Error(Errc::invalid_lever, "target source has no step count to scale", "step_multiplier");
          out.profile.source(l.target).gwp = l.replacement;
          out.profile.reference.steps_for(l.target) *= l.step_multiplier;
          try {
            resolve_gwp(out.profile, l.target, out.profile.default_horizon);
          } catch (const Error& e) {
            throw Error(Errc::invalid_lever, e.what(), "replacement");
          }
        } else if constexpr (std::is_same_v<T, RecoveryChange>) {
          if (l.release_fraction.has_value() == l.recovery.has_value())
            throw Error(Errc::invalid_lever, "exactly one of release_fraction or recovery is required");
          const double rho = l.new_release_fraction();
          if (!(rho >= 0.0 && rho <= 1.0))
            throw Error(Errc::invalid_lever, "release fraction must be in [0, 1]", "release_fraction");
          out.profile.release.release_fraction = rho;
        } else if constexpr (std::is_same_v<T, ReclaimLoop>) {
          if (!(l.net_multiplier >= 0.0))
            throw Error(Errc::invalid_lever, "multiplier must be >= 0", "net_multiplier");
          auto sources = l.affected_sources.empty() ? default_reclaim_sources(profile) : l.affected_sources;
          for (SourceId s : sources) out.profile.source(s).release_multiplier *= l.net_multiplier;
        } else if constexpr (std::is_same_v<T, LithographySwitch>) {
          out.spec.lithography = l.to;
        }
      },
      lever);
  return out;
}

/// Sources whose breakdown entries a lever can change when applied to
/// (spec, profile). Levers that alter die area or release touch everything.
inline std::set<SourceId> affected_sources(const HardwareSpec& spec, const FabProfile& profile, const Lever& lever) {
  std::set<SourceId> out;
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, CoreCacheInterchange>) {
          out.insert(kAllSources.begin(), kAllSources.end());
        } else if constexpr (std::is_same_v<T, CleanEtchRebalance>) {
          if (l.clean_step_multiplier != 1.0) out.insert(SourceId::ChamberCleaning);
          if (l.etch_step_multiplier != 1.0) out.insert(SourceId::Etching);
        } else if constexpr (std::is_same_v<T, LowGwpSubstitution>) {
          out.insert(l.target);
        } else if constexpr (std::is_same_v<T, RecoveryChange>) {
          if (l.new_release_fraction() != profile.release.release_fraction)
            out.insert(kAllSources.begin(), kAllSources.end());
        } else if constexpr (std::is_same_v<T, ReclaimLoop>) {
          if (l.net_multiplier != 1.0) {
            auto sources = l.affected_sources.empty() ? default_reclaim_sources(profile) : l.affected_sources;
            out.insert(sources.begin(), sources.end());
          }
        } else if constexpr (std::is_same_v<T, LithographySwitch>) {
          const auto& f = profile.lithography_factors;
          if (f.at(l.to) != f.at(spec.lithography))
            for (SourceId s : kAllSources)
              if (source_info(s).uses_lith_factor) out.insert(s);
        }
      },
      lever);
  return out;
}

struct ScenarioReport {
  EmissionBreakdown baseline;
  EmissionBreakdown modified;
  std::array<double, kSourceCount> delta_gco2eq{};
  double total_delta_gco2eq = 0.0;
  double total_delta_percent = 0.0;
  std::vector<Lever> levers;
};

/// Applies levers left to right and compares against the untouched pair.
inline ScenarioReport run_scenario(const HardwareSpec& spec, const FabProfile& profile,
                                   const std::vector<Lever>& levers, GwpHorizon h) {
  ScenarioReport report;
  report.baseline = total_emission(spec, profile, h);
  ScenarioState state{spec, profile};
  for (std::size_t i = 0; i < levers.size(); ++i) {
    try {
      state = apply_lever(state.spec, state.profile, levers[i]);
    } catch (const Error& e) {
      throw e.within("levers[" + std::to_string(i) + "]");
    }
  }
  report.modified = total_emission(state.spec, state.profile, h);
  for (SourceId s : kAllSources)
    report.delta_gco2eq[source_index(s)] = report.modified.at(s).gco2eq - report.baseline.at(s).gco2eq;
  report.total_delta_gco2eq = report.modified.total_gco2eq - report.baseline.total_gco2eq;
  report.total_delta_percent =
      report.baseline.total_gco2eq != 0.0 ? 100.0 * report.total_delta_gco2eq / report.baseline.total_gco2eq : 0.0;
  report.levers = levers;
  return report;
}

// ---- JSON -------------------------------------------------------------------

inline Lever lever_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string type = r.string("type");
  Lever out;
  if (type == "core_cache_interchange") {
    out = CoreCacheInterchange{r.number_opt("delta_cores").value_or(0.0), r.number_opt("delta_cache_mb").value_or(0.0)};
  } else if (type == "clean_etch_rebalance") {
    out = CleanEtchRebalance{r.number_opt("clean_step_multiplier").value_or(1.0),
                             r.number_opt("etch_step_multiplier").value_or(1.0)};
  } else if (type == "low_gwp_substitution") {
    LowGwpSubstitution l;
    l.target = parse_source(r.string("target"));
    const json* gwp = r.raw_opt("gwp");
    const json* mix = r.raw_opt("mix");
    if ((gwp != nullptr) == (mix != nullptr))
      throw Error(Errc::schema, "exactly one of gwp or mix is required", r.sub("gwp"));
    if (gwp)
      l.replacement = gwp_values_from_json(*gwp, r.sub("gwp"));
    else
      l.replacement = mix_from_json(*mix, r.sub("mix"));
    l.step_multiplier = r.number_opt("step_multiplier").value_or(1.25);
    out = std::move(l);
  } else if (type == "recovery_change") {
    RecoveryChange l{r.number_opt("release_fraction"), r.number_opt("recovery")};
    if (l.release_fraction.has_value() == l.recovery.has_value())
      throw Error(Errc::schema, "exactly one of release_fraction or recovery is required", r.sub("release_fraction"));
    out = l;
  } else if (type == "reclaim_loop") {
    ReclaimLoop l;
    if (const json* s = r.raw_opt("sources")) {
      if (!s->is_array()) throw Error(Errc::schema, "expected an array", r.sub("sources"));
      for (const auto& name : *s) l.affected_sources.push_back(parse_source(ObjectReader::as_string(name, r.sub("sources"))));
    }
    l.net_multiplier = r.number_opt("net_multiplier").value_or(0.5);
    out = std::move(l);
  } else if (type == "lithography_switch") {
    out = LithographySwitch{parse_lithography(r.string("to"))};
  } else {
    throw Error(Errc::schema, "unknown lever type '" + type + "'", r.sub("type"));
  }
  r.finish();
  return out;
}

/// Scenario file: a JSON array of lever objects (or {"levers": [...]}).
inline std::vector<Lever> levers_from_json(const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    ObjectReader r(j, "");
    arr = &r.raw("levers");
    r.finish();
  }
  if (!arr->is_array()) throw Error(Errc::schema, "expected an array of levers", "levers");
  std::vector<Lever> out;
  for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(lever_from_json((*arr)[i], "levers[" + std::to_string(i) + "]"));
  return out;
}

inline json to_json(const Lever& lever) {
  return std::visit(
      [](const auto& l) -> json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, CoreCacheInterchange>) {
          return {{"type", "core_cache_interchange"}, {"delta_cores", l.delta_cores}, {"delta_cache_mb", l.delta_cache_mb}};
        } else if constexpr (std::is_same_v<T, CleanEtchRebalance>) {
          return {{"type", "clean_etch_rebalance"},
                  {"clean_step_multiplier", l.clean_step_multiplier},
                  {"etch_step_multiplier", l.etch_step_multiplier}};
        } else if constexpr (std::is_same_v<T, LowGwpSubstitution>) {
          json j{{"type", "low_gwp_substitution"}, {"target", source_name(l.target)}, {"step_multiplier", l.step_multiplier}};
          if (const auto* g = std::get_if<GwpValues>(&l.replacement))
            j["gwp"] = to_json(*g);
          else
            j["mix"] = to_json(std::get<CompoundMix>(l.replacement));
          return j;
        } else if constexpr (std::is_same_v<T, RecoveryChange>) {
          json j{{"type", "recovery_change"}};
          if (l.release_fraction) j["release_fraction"] = *l.release_fraction;
          if (l.recovery) j["recovery"] = *l.recovery;
          return j;
        } else if constexpr (std::is_same_v<T, ReclaimLoop>) {
          json j{{"type", "reclaim_loop"}, {"net_multiplier", l.net_multiplier}};
          if (!l.affected_sources.empty()) {
            json s = json::array();
            for (SourceId id : l.affected_sources) s.push_back(source_name(id));
            j["sources"] = s;
          }
          return j;
        } else {
          return {{"type", "lithography_switch"}, {"to", lithography_name(l.to)}};
        }
      },
      lever);
}

inline json to_json(const ScenarioReport& r) {
  json delta = json::object();
  for (SourceId s : kAllSources) delta[std::string(source_name(s))] = r.delta_gco2eq[source_index(s)];
  json levers = json::array();
  for (const auto& l : r.levers) levers.push_back(to_json(l));
  return json{{"baseline", to_json(r.baseline)},
              {"modified", to_json(r.modified)},
              {"delta_gco2eq", delta},
              {"total_delta_gco2eq", r.total_delta_gco2eq},
              {"total_delta_percent", r.total_delta_percent},
              {"levers", levers}};
}

}  // namespace fmn

#endif  // FMN_SCENARIO_HPP
