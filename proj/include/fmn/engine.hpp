#ifndef FMN_ENGINE_HPP
#define FMN_ENGINE_HPP

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fmn/error.hpp"
#include "fmn/geometry.hpp"
#include "fmn/units.hpp"
#include "fmn/usage.hpp"

namespace fmn {

/// Fraction of used compound that escapes to the atmosphere.
struct ReleaseConvention {
  double release_fraction = 0.1;

  /// rho = 1 - recovery, the literal reading of the recovery factor.
  static ReleaseConvention from_recovery(double recovery) {
    if (!(recovery >= 0.0 && recovery <= 1.0))
      throw Error(Errc::invalid_argument, "recovery must be in [0, 1]", "recovery");
    return ReleaseConvention{1.0 - recovery};
  }

  friend bool operator==(const ReleaseConvention&, const ReleaseConvention&) = default;
};

inline void validate(const ReleaseConvention& r) {
  if (!(r.release_fraction >= 0.0 && r.release_fraction <= 1.0))
    throw Error(Errc::invalid_argument, "must be in [0, 1]", "release_fraction");
}

/// Older-generation device the step counts and process time are anchored to.
struct ReferenceHardware {
  double node_nm = 14.0;
  std::array<double, kSourceCount> steps{};  // zero for sources without a step count
  double t_process_h = 20.0;
  double package_size_mm2 = 4000.0;

  double& steps_for(SourceId s) { return steps[source_index(s)]; }
  double steps_for(SourceId s) const { return steps[source_index(s)]; }

  friend bool operator==(const ReferenceHardware&, const ReferenceHardware&) = default;
};

inline void validate(const ReferenceHardware& r) {
  if (!(r.node_nm > 0.0)) throw Error(Errc::invalid_argument, "must be > 0", "reference.node_nm");
  for (SourceId s : kAllSources)
    if (!(r.steps_for(s) >= 0.0))
      throw Error(Errc::invalid_argument, "must be >= 0", "reference.steps." + std::string(source_name(s)));
  if (!(r.t_process_h >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "reference.t_process_hours");
  if (!(r.package_size_mm2 > 0.0))
    throw Error(Errc::invalid_argument, "must be > 0", "reference.package_size_mm2");
}

/// Either fixed blended GWPs per horizon or a compound mix resolved against
/// the profile's registry.
using SourceGwp = std::variant<GwpValues, CompoundMix>;

struct SourceConfig {
  SourceParams params;
  SourceGwp gwp;
  /// Scales the release fraction for this source only (reclaim loops).
  double release_multiplier = 1.0;
};

struct FabProfile {
  std::string name;
  std::string note;
  GwpHorizon default_horizon = GwpHorizon::Y500;
  WaferGeometry geometry;
  ReleaseConvention release;
  LithographyFactor lithography_factors;
  ReferenceHardware reference;
  std::map<HardwareKind, DieAreaModel> die_area_models;
  std::optional<CompoundRegistry> compounds;
  std::array<SourceConfig, kSourceCount> sources;

  SourceConfig& source(SourceId s) { return sources[source_index(s)]; }
  const SourceConfig& source(SourceId s) const { return sources[source_index(s)]; }

  const CompoundRegistry& registry() const {
    static const CompoundRegistry fallback = default_compound_registry();
    return compounds ? *compounds : fallback;
  }
};

inline double resolve_gwp(const FabProfile& profile, SourceId s, GwpHorizon h) {
  const auto& cfg = profile.source(s);
  if (const auto* fixed = std::get_if<GwpValues>(&cfg.gwp)) {
    auto it = fixed->find(h);
    if (it == fixed->end())
      throw Error(Errc::missing_horizon, "no GWP at " + std::string(horizon_name(h)),
                  "sources." + std::string(source_name(s)) + ".gwp");
    return it->second;
  }
  try {
    return blended_gwp(std::get<CompoundMix>(cfg.gwp), profile.registry(), h);
  } catch (const Error& e) {
    throw e.within("sources." + std::string(source_name(s)) + ".mix");
  }
}

/// Compounds a source releases: the configured mix when present, otherwise
/// the source's typical compounds, with equal weights.
inline std::vector<MixEntry> source_compounds(const FabProfile& profile, SourceId s) {
  if (const auto* mix = std::get_if<CompoundMix>(&profile.source(s).gwp)) return mix->entries;
  std::vector<MixEntry> out;
  for (auto c : source_info(s).compounds)
    if (!c.empty()) out.push_back({std::string(c), 1.0});
  return out;
}

/// Structural checks; GWP resolution at the default horizon included.
inline void validate(const FabProfile& p) {
  validate(p.geometry);
  validate(p.release);
  validate(p.lithography_factors);
  validate(p.reference);
  for (const auto& [kind, model] : p.die_area_models) {
    try {
      validate(model);
    } catch (const Error& e) {
      throw e.within("die_area_models." + std::string(kind_name(kind)));
    }
  }
  for (SourceId s : kAllSources) {
    const auto& cfg = p.source(s);
    const std::string prefix = "sources." + std::string(source_name(s));
    if (cfg.params.k && !(*cfg.params.k >= 0.0))
      throw Error(Errc::invalid_argument, "must be >= 0",
                  prefix + "." + std::string(coefficient_key(source_info(s).family)));
    if (cfg.params.alpha && !(*cfg.params.alpha >= 0.0))
      throw Error(Errc::invalid_argument, "must be >= 0", prefix + ".alpha");
    if (!(cfg.release_multiplier >= 0.0))
      throw Error(Errc::invalid_argument, "must be >= 0", prefix + ".release_multiplier");
    resolve_gwp(p, s, p.default_horizon);
  }
}

struct SourceEmission {
  SourceId source = SourceId::Etching;
  double usage_g = 0.0;    // grams per wafer
  double wafers = 0.0;     // wafers per unit
  double release = 0.0;    // release fraction applied
  double gwp = 0.0;
  double gco2eq = 0.0;

  friend bool operator==(const SourceEmission&, const SourceEmission&) = default;
};

struct EmissionBreakdown {
  std::string profile;
  GwpHorizon horizon = GwpHorizon::Y500;
  HardwareSpec spec;
  double die_area_mm2 = 0.0;
  double wafer_area_mm2 = 0.0;
  double node_ratio = 1.0;
  std::array<SourceEmission, kSourceCount> sources{};
  double total_gco2eq = 0.0;

  const SourceEmission& at(SourceId s) const { return sources[source_index(s)]; }

  friend bool operator==(const EmissionBreakdown&, const EmissionBreakdown&) = default;
};

/// wafers * usage * release * gwp, always in this order.
inline double emission_product(const SourceEmission& e) { return e.wafers * e.usage_g * e.release * e.gwp; }

namespace detail {

struct DeviceContext {
  double die_area_mm2;
  double wafer_area_mm2;
  double wafers;
  double node_ratio;
  double phi;
  double step_multiplier;
};

inline DeviceContext device_context(const HardwareSpec& spec, const FabProfile& profile) {
  try {
    validate(spec);
  } catch (const Error& e) {
    throw e.within("spec");
  }
  auto model = profile.die_area_models.find(spec.kind);
  if (model == profile.die_area_models.end())
    throw Error(Errc::missing_parameter, "profile has no die-area model for this kind",
                "die_area_models." + std::string(kind_name(spec.kind)));
  DeviceContext ctx{};
  try {
    ctx.die_area_mm2 = die_area(spec, model->second);
  } catch (const Error& e) {
    throw e.within("spec");
  }
  ctx.wafer_area_mm2 = wafer_area(profile.geometry);
  // A zero-area part consumes no wafer.
  ctx.wafers = ctx.die_area_mm2 > 0.0 ? wafers_per_unit(ctx.die_area_mm2, profile.geometry) : 0.0;
  ctx.node_ratio = profile.reference.node_nm / spec.node_nm;
  ctx.phi = profile.lithography_factors.at(spec.lithography);
  ctx.step_multiplier = 1.0;
  if (spec.kind == HardwareKind::Storage) {
    auto cap = spec.features.find("capacity_tb");
    if (cap != spec.features.end())
      ctx.step_multiplier =
          std::pow(cap->second, spec.step_capacity_exponent.value_or(kDefaultStorageStepExponent));
  }
  return ctx;
}

inline SourceEmission evaluate_source(const DeviceContext& dev, const HardwareSpec& spec,
                                      const FabProfile& profile, SourceId s, GwpHorizon h) {
  const auto& cfg = profile.source(s);
  const auto family = source_info(s).family;
  UsageContext ctx;
  ctx.die_area_mm2 = dev.die_area_mm2;
  ctx.wafer_area_mm2 = dev.wafer_area_mm2;
  ctx.node_ratio = dev.node_ratio;
  ctx.phi = dev.phi;
  ctx.tdp_w = spec.tdp_w;
  ctx.package_size_mm2 = spec.package_size_mm2;
  ctx.package_size_ref_mm2 = profile.reference.package_size_mm2;
  ctx.t_process_ref_h = profile.reference.t_process_h;
  ctx.n_ref_steps = profile.reference.steps_for(s);
  if (family == UsageFamily::AreaStep || family == UsageFamily::StepOnly) ctx.n_ref_steps *= dev.step_multiplier;

  SourceEmission e;
  e.source = s;
  e.usage_g = usage_for_source(s, cfg.params, ctx);
  e.wafers = dev.wafers;
  e.release = profile.release.release_fraction * cfg.release_multiplier;
  e.gwp = resolve_gwp(profile, s, h);
  e.gco2eq = emission_product(e);
  return e;
}

}  // namespace detail

/// Emission of one source for one unit of `spec`, in gCO2eq.
inline double source_emission(const HardwareSpec& spec, const FabProfile& profile, SourceId s, GwpHorizon h) {
  const auto dev = detail::device_context(spec, profile);
  return detail::evaluate_source(dev, spec, profile, s, h).gco2eq;
}

/// Evaluates all twelve sources; the total sums them in declaration order.
inline EmissionBreakdown total_emission(const HardwareSpec& spec, const FabProfile& profile, GwpHorizon h) {
  const auto dev = detail::device_context(spec, profile);
  EmissionBreakdown out;
  out.profile = profile.name;
  out.horizon = h;
  out.spec = spec;
  out.die_area_mm2 = dev.die_area_mm2;
  out.wafer_area_mm2 = dev.wafer_area_mm2;
  out.node_ratio = dev.node_ratio;
  double total = 0.0;
  for (SourceId s : kAllSources) {
    out.sources[source_index(s)] = detail::evaluate_source(dev, spec, profile, s, h);
    total += out.sources[source_index(s)].gco2eq;
  }
  out.total_gco2eq = total;
  return out;
}

inline EmissionBreakdown total_emission(const HardwareSpec& spec, const FabProfile& profile) {
  return total_emission(spec, profile, profile.default_horizon);
}

/// Re-sums stored per-source values in declaration order.
inline double sum_sources(const EmissionBreakdown& b) {
  double total = 0.0;
  for (const auto& e : b.sources) total += e.gco2eq;
  return total;
}

struct SourceComparison {
  SourceId source;
  double model_gco2eq;
  double measured_gco2eq;
  double diff;  // (model - measured) / measured
};

struct ValidationReport {
  std::vector<SourceComparison> entries;
  std::vector<SourceId> skipped;
  double model_total = 0.0;     // over compared sources only
  double measured_total = 0.0;
  double total_diff = 0.0;
  double max_abs_diff = 0.0;
};

inline ValidationReport compare_to_measured(const EmissionBreakdown& b, const std::map<SourceId, double>& measured) {
  ValidationReport r;
  for (SourceId s : kAllSources) {
    auto it = measured.find(s);
    if (it == measured.end()) {
      r.skipped.push_back(s);
      continue;
    }
    if (!(it->second > 0.0))
      throw Error(Errc::invalid_argument, "measured value must be > 0", "measured." + std::string(source_name(s)));
    const double model = b.at(s).gco2eq;
    const double d = (model - it->second) / it->second;
    r.entries.push_back({s, model, it->second, d});
    r.model_total += model;
    r.measured_total += it->second;
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(d));
  }
  if (r.measured_total > 0.0) r.total_diff = (r.model_total - r.measured_total) / r.measured_total;
  return r;
}

}  // namespace fmn

#endif  // FMN_ENGINE_HPP
