#ifndef FMN_UNITS_HPP
#define FMN_UNITS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmn/error.hpp"

namespace fmn {

enum class GwpHorizon { Y20, Y100, Y500 };

inline constexpr std::array<GwpHorizon, 3> kAllHorizons = {GwpHorizon::Y20, GwpHorizon::Y100,
                                                           GwpHorizon::Y500};

inline std::string_view horizon_name(GwpHorizon h) {
  switch (h) {
    case GwpHorizon::Y20: return "y20";
    case GwpHorizon::Y100: return "y100";
    case GwpHorizon::Y500: return "y500";
  }
  return "y500";
}

inline GwpHorizon parse_horizon(std::string_view s) {
  if (s == "y20") return GwpHorizon::Y20;
  if (s == "y100") return GwpHorizon::Y100;
  if (s == "y500") return GwpHorizon::Y500;
  throw Error(Errc::schema, "unknown GWP horizon '" + std::string(s) + "' (expected y20|y100|y500)");
}

/// GWP multipliers (gCO2eq per gram) keyed by horizon. Entries may be sparse.
using GwpValues = std::map<GwpHorizon, double>;

struct FluorinatedCompound {
  std::string id;
  GwpValues gwp;
  std::optional<double> radiative_efficiency;  // W m^-2 ppb^-1
  std::optional<double> atmospheric_lifetime_years;
};

inline void validate(const FluorinatedCompound& c) {
  if (c.id.empty()) throw Error(Errc::schema, "compound id must be non-empty", "id");
  for (const auto& [h, v] : c.gwp) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(Errc::invalid_argument, "GWP must be > 0", "gwp." + std::string(horizon_name(h)));
  }
  if (c.radiative_efficiency && !(*c.radiative_efficiency > 0.0))
    throw Error(Errc::invalid_argument, "must be > 0", "radiative_efficiency");
  if (c.atmospheric_lifetime_years && !(*c.atmospheric_lifetime_years > 0.0))
    throw Error(Errc::invalid_argument, "must be > 0", "lifetime_years");
}

/// Immutable-after-construction lookup of compounds by id.
class CompoundRegistry {
 public:
  CompoundRegistry() = default;
  explicit CompoundRegistry(std::vector<FluorinatedCompound> compounds) {
    for (auto& c : compounds) add(std::move(c));
  }

  void add(FluorinatedCompound c) {
    validate(c);
    std::string id = c.id;
    if (!compounds_.emplace(id, std::move(c)).second)
      throw Error(Errc::schema, "duplicate compound id '" + id + "'", "compounds");
  }

  const FluorinatedCompound* find(std::string_view id) const {
    auto it = compounds_.find(std::string(id));
    return it == compounds_.end() ? nullptr : &it->second;
  }

  double gwp(std::string_view id, GwpHorizon h) const {
    const auto* c = find(id);
    if (!c) throw Error(Errc::unknown_compound, "unknown compound '" + std::string(id) + "'");
    auto it = c->gwp.find(h);
    if (it == c->gwp.end())
      throw Error(Errc::missing_horizon, "compound '" + std::string(id) + "' has no GWP at " +
                                             std::string(horizon_name(h)));
    return it->second;
  }

  bool empty() const { return compounds_.empty(); }
  const std::map<std::string, FluorinatedCompound>& all() const { return compounds_; }

 private:
  std::map<std::string, FluorinatedCompound> compounds_;
};

/// The two compound GWPs stated numerically in the literature the model
/// builds on (100-year horizon). Other compounds must be user-supplied.
inline CompoundRegistry default_compound_registry() {
  return CompoundRegistry({
      FluorinatedCompound{"CF4", {{GwpHorizon::Y100, 7380.0}}, std::nullopt, std::nullopt},
      FluorinatedCompound{"SF6", {{GwpHorizon::Y100, 25200.0}}, std::nullopt, std::nullopt},
  });
}

struct MixEntry {
  std::string compound;
  double ratio = 0.0;
};

/// Emission-ratio weights; need not sum to one.
struct CompoundMix {
  std::vector<MixEntry> entries;
};

inline void validate(const CompoundMix& mix) {
  if (mix.entries.empty()) throw Error(Errc::zero_ratios, "compound mix has no entries");
  bool any_positive = false;
  for (const auto& e : mix.entries) {
    if (!(e.ratio >= 0.0) || !std::isfinite(e.ratio))
      throw Error(Errc::invalid_argument, "emission ratio must be >= 0 for '" + e.compound + "'");
    any_positive = any_positive || e.ratio > 0.0;
  }
  if (!any_positive) throw Error(Errc::zero_ratios, "all emission ratios are zero");
}

/// Ratio-weighted mean GWP of a mix: sum(ratio*gwp) / sum(ratio).
inline double blended_gwp(const CompoundMix& mix, const CompoundRegistry& registry, GwpHorizon h) {
  validate(mix);
  double weighted = 0.0;
  double total = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : mix.entries) {
    const double g = registry.gwp(e.compound, h);
    weighted += e.ratio * g;
    total += e.ratio;
    if (e.ratio > 0.0) {
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  }
  // Keep the convex-combination bound exact under rounding.
  return std::clamp(weighted / total, lo, hi);
}

inline constexpr double kGramsPerTeragram = 1e12;
inline constexpr double kCarbonPerCo2 = 12.0 / 44.0;

/// Million metric tons of carbon equivalent for `mass_tg` teragrams of gas.
inline double mmtce(double mass_tg, double gwp) {
  if (!(mass_tg >= 0.0)) throw Error(Errc::negative_mass, "mass must be >= 0", "mass_tg");
  if (!(gwp > 0.0)) throw Error(Errc::invalid_argument, "GWP must be > 0", "gwp");
  return mass_tg * gwp * 12.0 / 44.0;
}

inline double grams_to_co2eq(double mass_g, double gwp) {
  if (!(mass_g >= 0.0)) throw Error(Errc::negative_mass, "mass must be >= 0", "mass_g");
  return mass_g * gwp;
}

inline double grams_to_teragrams(double g) { return g / kGramsPerTeragram; }

}  // namespace fmn

#endif  // FMN_UNITS_HPP
