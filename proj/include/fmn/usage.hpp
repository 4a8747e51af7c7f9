#ifndef FMN_USAGE_HPP
#define FMN_USAGE_HPP

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fmn/error.hpp"
#include "fmn/geometry.hpp"

namespace fmn {

/// Emission sources in fabrication order. Declaration order is also the
/// summation order of totals.
enum class SourceId {
  Etching,
  ChamberCleaning,
  Photolithography,
  HeatTransferFluids,
  SolventFluids,
  DielectricFluids,
  WaferThinning,
  Testing,
  VaporPhaseSoldering,
  VacuumPumps,
  PlasmaCoatings,
  Packaging,
};

inline constexpr std::size_t kSourceCount = 12;

inline constexpr std::array<SourceId, kSourceCount> kAllSources = {
    SourceId::Etching,          SourceId::ChamberCleaning,   SourceId::Photolithography,
    SourceId::HeatTransferFluids, SourceId::SolventFluids,   SourceId::DielectricFluids,
    SourceId::WaferThinning,    SourceId::Testing,           SourceId::VaporPhaseSoldering,
    SourceId::VacuumPumps,      SourceId::PlasmaCoatings,    SourceId::Packaging,
};

/// The six algebraic shapes the twelve sources fall into.
enum class UsageFamily { AreaStep, Htf, AreaOnly, PackageScaled, StepOnly, Packaging };

struct SourceInfo {
  SourceId id;
  std::string_view name;
  UsageFamily family;
  bool uses_lith_factor;
  bool has_steps;  // has a reference step count that levers may scale
  std::array<std::string_view, 3> compounds;  // typical compounds; empty slots unused
};

inline constexpr std::array<SourceInfo, kSourceCount> kSourceTable = {{
    {SourceId::Etching, "etching", UsageFamily::AreaStep, true, true, {"CF4", "C2F6", "CHF3"}},
    {SourceId::ChamberCleaning, "chamber_cleaning", UsageFamily::AreaStep, true, true, {"NF3", "SF6", ""}},
    {SourceId::Photolithography, "photolithography", UsageFamily::AreaStep, true, true, {"CHF3", "C4F8", ""}},
    {SourceId::HeatTransferFluids, "heat_transfer_fluids", UsageFamily::Htf, false, false, {"C3F8", "C4F8", ""}},
    {SourceId::SolventFluids, "solvent_fluids", UsageFamily::AreaStep, false, true, {"C2F6", "NF3", ""}},
    {SourceId::DielectricFluids, "dielectric_fluids", UsageFamily::AreaOnly, false, false, {"C4F8", "CHF3", ""}},
    {SourceId::WaferThinning, "wafer_thinning", UsageFamily::AreaOnly, false, false, {"SF6", "CF4", ""}},
    {SourceId::Testing, "testing", UsageFamily::AreaStep, false, true, {"C3F8", "SF6", ""}},
    {SourceId::VaporPhaseSoldering, "vapor_phase_soldering", UsageFamily::PackageScaled, false, true, {"SF6", "", ""}},
    {SourceId::VacuumPumps, "vacuum_pumps", UsageFamily::StepOnly, false, true, {"CF4", "C2F6", ""}},
    {SourceId::PlasmaCoatings, "plasma_coatings", UsageFamily::AreaStep, false, true, {"CHF3", "C4F8", ""}},
    {SourceId::Packaging, "packaging", UsageFamily::Packaging, false, false, {"SF6", "C3F8", ""}},
}};

inline const SourceInfo& source_info(SourceId s) { return kSourceTable[static_cast<std::size_t>(s)]; }
inline std::string_view source_name(SourceId s) { return source_info(s).name; }
inline std::size_t source_index(SourceId s) { return static_cast<std::size_t>(s); }

inline std::optional<SourceId> find_source(std::string_view name) {
  for (const auto& info : kSourceTable)
    if (info.name == name) return info.id;
  return std::nullopt;
}

inline SourceId parse_source(std::string_view name) {
  if (auto s = find_source(name)) return *s;
  throw Error(Errc::schema, "unknown emission source '" + std::string(name) + "'");
}

/// JSON key of the base coefficient; the unit suffix encodes the family.
inline std::string_view coefficient_key(UsageFamily f) {
  switch (f) {
    case UsageFamily::AreaStep: return "k_g_per_mm2_step";
    case UsageFamily::Htf: return "k_g_per_hour_w";
    case UsageFamily::AreaOnly: return "k_g_per_mm2";
    case UsageFamily::PackageScaled: return "k_g_per_step";
    case UsageFamily::StepOnly: return "k_g_per_step";
    case UsageFamily::Packaging: return "k_g_per_mm2";
  }
  return "k";
}

inline bool family_has_alpha(UsageFamily f) {
  return f == UsageFamily::AreaStep || f == UsageFamily::Htf || f == UsageFamily::PackageScaled ||
         f == UsageFamily::StepOnly;
}

/// Reference step count and its node-scaling exponent.
struct StepScaling {
  double n_ref_steps = 0.0;
  double alpha = 0.0;
};

/// Lithography adjustment, one positive factor per lithography type.
struct LithographyFactor {
  double duv = 1.0;
  double euv = 0.8;
  double euv_high_na = 0.7;

  double at(Lithography l) const {
    switch (l) {
      case Lithography::DUV: return duv;
      case Lithography::EUV: return euv;
      case Lithography::EUV_HIGH_NA: return euv_high_na;
    }
    return duv;
  }

  friend bool operator==(const LithographyFactor&, const LithographyFactor&) = default;
};

inline void validate(const LithographyFactor& f) {
  if (!(f.duv > 0.0)) throw Error(Errc::invalid_argument, "must be > 0", "lithography_factors.duv");
  if (!(f.euv > 0.0)) throw Error(Errc::invalid_argument, "must be > 0", "lithography_factors.euv");
  if (!(f.euv_high_na > 0.0))
    throw Error(Errc::invalid_argument, "must be > 0", "lithography_factors.euv_high_na");
}

namespace detail {
inline void require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw Error(Errc::invalid_argument, "must be > 0", field);
}
inline void require_nonnegative(double v, const char* field) {
  if (!(v >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", field);
}
}  // namespace detail

// All usage functions return grams of compound used per wafer.
// node_ratio is N_ref / N.

/// k * die_area * steps * node_ratio^alpha * phi
inline double area_step_usage(double k, double die_area_mm2, StepScaling scaling, double node_ratio,
                              double phi) {
  detail::require_positive(node_ratio, "node_ratio");
  detail::require_positive(phi, "phi");
  detail::require_nonnegative(die_area_mm2, "die_area_mm2");
  return k * die_area_mm2 * scaling.n_ref_steps * std::pow(node_ratio, scaling.alpha) * phi;
}

/// Heat-transfer fluids: k * t_ref * node_ratio^alpha * TDP
inline double htf_usage(double k, double t_process_ref_h, double time_alpha, double node_ratio, double tdp_w) {
  detail::require_positive(node_ratio, "node_ratio");
  detail::require_nonnegative(tdp_w, "tdp_w");
  return k * t_process_ref_h * std::pow(node_ratio, time_alpha) * tdp_w;
}

inline double area_only_usage(double k, double area_mm2) {
  detail::require_nonnegative(area_mm2, "area_mm2");
  return k * area_mm2;
}

/// Vapor-phase soldering: k * n_solder_ref * (package / package_ref)^alpha
inline double package_scaled_usage(double k, double n_solder_ref, double package_size_mm2,
                                   double package_size_ref_mm2, double alpha) {
  detail::require_positive(package_size_ref_mm2, "package_size_ref_mm2");
  detail::require_nonnegative(package_size_mm2, "package_size_mm2");
  return k * n_solder_ref * std::pow(package_size_mm2 / package_size_ref_mm2, alpha);
}

inline double step_only_usage(double k, StepScaling scaling, double node_ratio) {
  detail::require_positive(node_ratio, "node_ratio");
  return k * scaling.n_ref_steps * std::pow(node_ratio, scaling.alpha);
}

inline double packaging_usage(double k, double package_size_mm2) {
  detail::require_nonnegative(package_size_mm2, "package_size_mm2");
  return k * package_size_mm2;
}

/// Per-source model parameters. `k` is empty in templates awaiting calibration.
struct SourceParams {
  std::optional<double> k;
  std::optional<double> alpha;
};

/// Device- and facility-derived quantities shared by all sources.
struct UsageContext {
  double die_area_mm2 = 0.0;
  double wafer_area_mm2 = 0.0;
  double node_ratio = 1.0;
  double phi = 1.0;
  double tdp_w = 0.0;
  double package_size_mm2 = 0.0;
  double package_size_ref_mm2 = 4000.0;
  double t_process_ref_h = 20.0;
  double n_ref_steps = 0.0;  // for the source being evaluated, already capacity-scaled
};

/// Dispatches a source to its family formula. phi is honoured only by the
/// etching, chamber-cleaning and photolithography rows.
inline double usage_for_source(SourceId source, const SourceParams& params, const UsageContext& ctx) {
  const auto& info = source_info(source);
  const std::string prefix = "sources." + std::string(info.name);
  if (!params.k)
    throw Error(Errc::missing_parameter, "base coefficient is not set", prefix + "." +
                                                                          std::string(coefficient_key(info.family)));
  const double k = *params.k;
  auto alpha = [&] {
    if (!params.alpha) throw Error(Errc::missing_parameter, "alpha is not set", prefix + ".alpha");
    return *params.alpha;
  };
  const double phi = info.uses_lith_factor ? ctx.phi : 1.0;
  switch (info.family) {
    case UsageFamily::AreaStep:
      return area_step_usage(k, ctx.die_area_mm2, {ctx.n_ref_steps, alpha()}, ctx.node_ratio, phi);
    case UsageFamily::Htf:
      return htf_usage(k, ctx.t_process_ref_h, alpha(), ctx.node_ratio, ctx.tdp_w);
    case UsageFamily::AreaOnly:
      return area_only_usage(k, source == SourceId::WaferThinning ? ctx.wafer_area_mm2 : ctx.die_area_mm2);
    case UsageFamily::PackageScaled:
      return package_scaled_usage(k, ctx.n_ref_steps, ctx.package_size_mm2, ctx.package_size_ref_mm2, alpha());
    case UsageFamily::StepOnly:
      return step_only_usage(k, {ctx.n_ref_steps, alpha()}, ctx.node_ratio);
    case UsageFamily::Packaging:
      return packaging_usage(k, ctx.package_size_mm2);
  }
  return 0.0;
}

}  // namespace fmn

#endif  // FMN_USAGE_HPP
