#ifndef FMN_GEOMETRY_HPP
#define FMN_GEOMETRY_HPP

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmn/error.hpp"

namespace fmn {

enum class HardwareKind { CPU, DRAM, Storage };
enum class Lithography { DUV, EUV, EUV_HIGH_NA };

inline std::string_view kind_name(HardwareKind k) {
  switch (k) {
    case HardwareKind::CPU: return "cpu";
    case HardwareKind::DRAM: return "dram";
    case HardwareKind::Storage: return "storage";
  }
  return "cpu";
}

inline HardwareKind parse_kind(std::string_view s) {
  if (s == "cpu") return HardwareKind::CPU;
  if (s == "dram") return HardwareKind::DRAM;
  if (s == "storage") return HardwareKind::Storage;
  throw Error(Errc::schema, "unknown hardware kind '" + std::string(s) + "' (expected cpu|dram|storage)");
}

inline std::string_view lithography_name(Lithography l) {
  switch (l) {
    case Lithography::DUV: return "duv";
    case Lithography::EUV: return "euv";
    case Lithography::EUV_HIGH_NA: return "euv_high_na";
  }
  return "duv";
}

inline Lithography parse_lithography(std::string_view s) {
  if (s == "duv") return Lithography::DUV;
  if (s == "euv") return Lithography::EUV;
  if (s == "euv_high_na") return Lithography::EUV_HIGH_NA;
  throw Error(Errc::schema, "unknown lithography '" + std::string(s) + "' (expected duv|euv|euv_high_na)");
}

struct WaferGeometry {
  double diameter_mm = 150.0;
  double usable_fraction = 0.95;
  double yield_fraction = 0.8;
};

inline void validate(const WaferGeometry& g) {
  if (!(g.diameter_mm > 0.0)) throw Error(Errc::invalid_argument, "must be > 0", "wafer_diameter_mm");
  if (!(g.usable_fraction > 0.0 && g.usable_fraction <= 1.0))
    throw Error(Errc::invalid_argument, "must be in (0, 1]", "usable_fraction");
  if (!(g.yield_fraction > 0.0 && g.yield_fraction <= 1.0))
    throw Error(Errc::invalid_argument, "must be in (0, 1]", "yield_fraction");
}

/// Affine die-area model: constant + sum(coefficient * feature).
/// Coefficients are mm^2 per feature unit (per core, per MB, ...).
struct DieAreaModel {
  std::vector<std::pair<std::string, double>> terms;
  double constant_mm2 = 0.0;
};

inline void validate(const DieAreaModel& m) {
  if (!(m.constant_mm2 >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "constant_mm2");
  for (const auto& [name, k] : m.terms)
    if (!(k >= 0.0)) throw Error(Errc::invalid_argument, "coefficient must be >= 0", "terms." + name);
}

/// The device whose manufacturing emissions are being estimated.
struct HardwareSpec {
  HardwareKind kind = HardwareKind::CPU;
  double node_nm = 7.0;
  Lithography lithography = Lithography::DUV;
  std::map<std::string, double> features;  // cores, cache_mb, memory_gb, capacity_tb, ...
  double tdp_w = 0.0;
  double package_size_mm2 = 0.0;
  /// Storage only: manufacturing step counts scale as capacity_tb^exponent.
  std::optional<double> step_capacity_exponent;

  double feature(std::string_view name) const {
    auto it = features.find(std::string(name));
    if (it == features.end())
      throw Error(Errc::missing_feature, "feature '" + std::string(name) + "' not present",
                  "features." + std::string(name));
    return it->second;
  }

  friend bool operator==(const HardwareSpec&, const HardwareSpec&) = default;
};

inline constexpr double kDefaultStorageStepExponent = 0.5;

inline void validate(const HardwareSpec& s) {
  if (!(s.node_nm > 0.0)) throw Error(Errc::invalid_argument, "must be > 0", "node_nm");
  if (!(s.tdp_w >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "tdp_w");
  if (!(s.package_size_mm2 >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "package_size_mm2");
  for (const auto& [name, v] : s.features)
    if (!(v >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "features." + name);
  if (s.step_capacity_exponent && !(*s.step_capacity_exponent >= 0.0))
    throw Error(Errc::invalid_argument, "must be >= 0", "step_capacity_exponent");
}

inline double die_area(const HardwareSpec& spec, const DieAreaModel& model) {
  double area = model.constant_mm2;
  for (const auto& [name, k] : model.terms) area += k * spec.feature(name);
  return area;
}

inline double wafer_area(const WaferGeometry& g) {
  const double r = g.diameter_mm / 2.0;
  return std::numbers::pi * r * r;
}

/// Fraction of a wafer consumed by one good die. Not rounded: parts larger
/// than a yielded wafer give values above one.
inline double wafers_per_unit(double die_area_mm2, const WaferGeometry& g) {
  if (!(die_area_mm2 > 0.0)) throw Error(Errc::invalid_argument, "die area must be > 0", "die_area_mm2");
  return die_area_mm2 / (g.yield_fraction * wafer_area(g) * g.usable_fraction);
}

}  // namespace fmn

#endif  // FMN_GEOMETRY_HPP
