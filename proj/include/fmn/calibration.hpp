#ifndef FMN_CALIBRATION_HPP
#define FMN_CALIBRATION_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fmn/detail/nnls.hpp"
#include "fmn/detail/text.hpp"
#include "fmn/engine.hpp"
#include "fmn/json.hpp"

namespace fmn {

inline constexpr double kEarthRadiusMiles = 3958.7613;

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
};

inline void validate(const GeoPoint& p) {
  if (!(std::abs(p.latitude) <= 90.0)) throw Error(Errc::invalid_argument, "latitude out of range", "latitude");
  if (!(std::abs(p.longitude) <= 180.0)) throw Error(Errc::invalid_argument, "longitude out of range", "longitude");
}

/// Great-circle distance on a spherical Earth.
inline double haversine_miles(GeoPoint a, GeoPoint b) {
  validate(a);
  validate(b);
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (b.latitude - a.latitude) * deg;
  const double dlon = (b.longitude - a.longitude) * deg;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  double h = s * s + std::cos(a.latitude * deg) * std::cos(b.latitude * deg) * t * t;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(h));
}

struct EmissionRecord {
  double latitude = 0.0;
  double longitude = 0.0;
  int year = 0;
  std::string compound;
  double mass_g = 0.0;

  GeoPoint location() const { return {latitude, longitude}; }
};

inline void validate(const EmissionRecord& r) {
  validate(r.location());
  if (!(r.mass_g >= 0.0)) throw Error(Errc::negative_mass, "mass must be >= 0", "mass_g");
  if (r.compound.empty()) throw Error(Errc::schema, "compound must be non-empty", "compound");
}

inline constexpr std::string_view kRecordCsvHeader = "lat,lon,year,compound,mass_g";

/// Strict CSV: exact header, comma separator, '.' decimal point.
inline std::vector<EmissionRecord> records_from_csv(std::string_view text) {
  auto rows = detail::lines(text);
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw Error(Errc::no_records, "no records");
  if (rows.front() != kRecordCsvHeader)
    throw Error(Errc::schema, "expected header '" + std::string(kRecordCsvHeader) + "'", "records:1");
  std::vector<EmissionRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string where = "records:" + std::to_string(i + 1);
    auto cells = detail::split(rows[i], ',');
    if (cells.size() != 5) throw Error(Errc::schema, "expected 5 columns", where);
    EmissionRecord r;
    r.latitude = detail::parse_double(cells[0], where + ".lat");
    r.longitude = detail::parse_double(cells[1], where + ".lon");
    r.year = static_cast<int>(detail::parse_int(cells[2], where + ".year"));
    r.compound = std::string(cells[3]);
    r.mass_g = detail::parse_double(cells[4], where + ".mass_g");
    try {
      validate(r);
    } catch (const Error& e) {
      throw e.within(where);
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(Errc::no_records, "no records");
  return out;
}

inline std::string records_to_csv(const std::vector<EmissionRecord>& records) {
  std::string out(kRecordCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += detail::format_double(r.latitude) + ',' + detail::format_double(r.longitude) + ',' +
           std::to_string(r.year) + ',' + r.compound + ',' + detail::format_double(r.mass_g) + '\n';
  }
  return out;
}

struct FacilitySite {
  GeoPoint location;
  std::map<int, double> units_produced_per_year;
  std::map<int, HardwareSpec> product_specs;
};

inline void validate(const FacilitySite& s) {
  validate(s.location);
  for (const auto& [y, n] : s.units_produced_per_year)
    if (!(n >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "units_produced_per_year." + std::to_string(y));
}

enum class BaselineMode {
  MeanPerRecord,  // arithmetic mean of neighbour record masses
  TotalPerArea,   // neighbour mass per unit area, times the facility footprint
};

struct BaselineOptions {
  double radius_miles = 10.0;
  double facility_tolerance_miles = 0.25;
  BaselineMode mode = BaselineMode::MeanPerRecord;
  /// Footprint used by TotalPerArea; defaults to the co-location disc.
  std::optional<double> facility_area_sq_miles;
};

struct BaselineResult {
  double attributable_g = 0.0;
  double facility_g = 0.0;
  double baseline_g = 0.0;
  std::size_t facility_records = 0;
  std::size_t neighbor_records = 0;
  bool clamped = false;
};

namespace detail {
// Sums after sorting so results do not depend on record order.
inline double ordered_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}
}  // namespace detail

/// Facility-attributable mass of one compound in one year: co-located
/// records minus the neighbourhood baseline, clamped at zero.
inline BaselineResult baseline_subtract(const std::vector<EmissionRecord>& records, const FacilitySite& site, int year,
                                        std::string_view compound, const BaselineOptions& opt = {}) {
  validate(site.location);
  bool any_for_year = false;
  std::vector<double> facility, neighbors;
  for (const auto& r : records) {
    if (r.year != year) continue;
    any_for_year = true;
    if (r.compound != compound) continue;
    const double d = haversine_miles(site.location, r.location());
    if (d <= opt.facility_tolerance_miles)
      facility.push_back(r.mass_g);
    else if (d <= opt.radius_miles)
      neighbors.push_back(r.mass_g);
  }
  if (!any_for_year) throw Error(Errc::no_records, "no records for year " + std::to_string(year));
  if (facility.empty())
    throw Error(Errc::no_facility_records,
                "no records co-located with the facility for " + std::string(compound) + " in " + std::to_string(year));

  BaselineResult out;
  out.facility_records = facility.size();
  out.neighbor_records = neighbors.size();
  out.facility_g = detail::ordered_sum(facility);
  if (!neighbors.empty()) {
    const double total = detail::ordered_sum(neighbors);
    if (opt.mode == BaselineMode::MeanPerRecord) {
      out.baseline_g = total / static_cast<double>(neighbors.size());
    } else {
      const double tol = opt.facility_tolerance_miles;
      const double ring = std::numbers::pi * (opt.radius_miles * opt.radius_miles - tol * tol);
      const double footprint = opt.facility_area_sq_miles.value_or(std::numbers::pi * tol * tol);
      out.baseline_g = total / ring * footprint;
    }
  }
  out.attributable_g = out.facility_g - out.baseline_g;
  if (out.attributable_g < 0.0) {
    out.attributable_g = 0.0;
    out.clamped = true;
  }
  return out;
}

using ObservationKey = std::pair<int, std::string>;  // (year, compound)

struct AttributableMasses {
  std::map<ObservationKey, double> mass_g;
  std::size_t records_used = 0;
  std::vector<std::string> warnings;
};

/// Runs baseline subtraction for every (year, compound) with facility records.
inline AttributableMasses attributable_masses(const std::vector<EmissionRecord>& records, const FacilitySite& site,
                                              const BaselineOptions& opt = {}) {
  if (records.empty()) throw Error(Errc::no_records, "no records");
  std::set<ObservationKey> keys;
  for (const auto& r : records)
    if (haversine_miles(site.location, r.location()) <= opt.facility_tolerance_miles) keys.insert({r.year, r.compound});
  if (keys.empty()) throw Error(Errc::no_facility_records, "no records co-located with the facility");
  AttributableMasses out;
  for (const auto& key : keys) {
    auto res = baseline_subtract(records, site, key.first, key.second, opt);
    out.mass_g[key] = res.attributable_g;
    out.records_used += res.facility_records + res.neighbor_records;
    if (res.clamped)
      out.warnings.push_back("attributable mass of " + key.second + " in " + std::to_string(key.first) +
                             " clamped to 0 (baseline " + detail::format_double(res.baseline_g) + " g exceeds facility " +
                             detail::format_double(res.facility_g) + " g)");
    else if (res.attributable_g == 0.0)
      out.warnings.push_back("attributable mass of " + key.second + " in " + std::to_string(key.first) + " is 0");
  }
  return out;
}

enum class YearPooling {
  Pooled,       // one least-squares system over all years
  PerYearMean,  // fit each year separately, average the coefficients
};

struct CalibrationOptions {
  YearPooling pooling = YearPooling::Pooled;
};

struct CalibrationResult {
  std::map<SourceId, double> coefficients;  // fitted sources only
  double residual = 0.0;                    // RMS relative error over fitted equations
  std::size_t records_used = 0;
  std::size_t equations = 0;
  std::vector<std::string> warnings;
};

namespace detail {

/// Released grams per unit of product per unit of k, for each source.
inline std::array<double, kSourceCount> release_per_k(const HardwareSpec& spec, const FabProfile& profile) {
  FabProfile unit = profile;
  for (SourceId s : kAllSources) unit.source(s).params.k = 1.0;
  const auto dev = device_context(spec, unit);
  std::array<double, kSourceCount> out{};
  for (SourceId s : kAllSources) {
    const auto e = evaluate_source(dev, spec, unit, s, unit.default_horizon);
    out[source_index(s)] = e.wafers * e.usage_g * e.release;
  }
  return out;
}

/// Normalised weight of `compound` in a source's release.
inline double compound_weight(const FabProfile& profile, SourceId s, std::string_view compound) {
  double total = 0.0, mine = 0.0;
  for (const auto& e : source_compounds(profile, s)) {
    total += e.ratio;
    if (e.compound == compound) mine += e.ratio;
  }
  return total > 0.0 ? mine / total : 0.0;
}

}  // namespace detail

/// Modelled released mass of each (year, compound) for a fully specified profile.
inline std::map<ObservationKey, double> modeled_release(const FabProfile& profile, const FacilitySite& site) {
  std::map<ObservationKey, double> out;
  for (const auto& [year, units] : site.units_produced_per_year) {
    auto spec = site.product_specs.find(year);
    if (spec == site.product_specs.end()) continue;
    const auto per_k = detail::release_per_k(spec->second, profile);
    std::map<std::string, double> by_compound;
    for (SourceId s : kAllSources) {
      const double k = profile.source(s).params.k.value_or(0.0);
      std::set<std::string> compounds;
      for (const auto& e : source_compounds(profile, s)) compounds.insert(e.compound);
      for (const auto& c : compounds) {
        const double w = detail::compound_weight(profile, s, c);
        by_compound[c] += w * (k * units * per_k[source_index(s)]);
      }
    }
    for (const auto& [c, m] : by_compound) out[{year, c}] = m;
  }
  return out;
}

namespace detail {

inline CalibrationResult fit_pooled(const std::map<ObservationKey, double>& attributable, const FacilitySite& site,
                                    const FabProfile& tmpl) {
  CalibrationResult result;
  std::vector<SourceId> unknown;
  for (SourceId s : kAllSources)
    if (!tmpl.source(s).params.k) unknown.push_back(s);

  std::map<int, std::array<double, kSourceCount>> per_k;
  struct Row {
    ObservationKey key;
    std::vector<double> coeffs;
    double rhs;       // observed mass minus the known sources' share
    double observed;  // attributable mass as given
  };
  std::vector<Row> rows;
  std::set<int> skipped_years;
  for (const auto& [key, mass] : attributable) {
    const auto& [year, compound] = key;
    auto units = site.units_produced_per_year.find(year);
    auto spec = site.product_specs.find(year);
    if (units == site.units_produced_per_year.end() || spec == site.product_specs.end()) {
      skipped_years.insert(year);
      continue;
    }
    if (!per_k.contains(year)) per_k[year] = release_per_k(spec->second, tmpl);
    const auto& g = per_k[year];
    Row row{key, std::vector<double>(unknown.size(), 0.0), mass, mass};
    bool mapped = false;
    for (SourceId s : kAllSources) {
      const double w = compound_weight(tmpl, s, compound);
      if (w == 0.0) continue;
      mapped = true;
      const double contribution = w * units->second * g[source_index(s)];
      if (auto k = tmpl.source(s).params.k) {
        row.rhs -= *k * contribution;
      } else {
        auto pos = std::find(unknown.begin(), unknown.end(), s) - unknown.begin();
        row.coeffs[static_cast<std::size_t>(pos)] = contribution;
      }
    }
    if (!mapped) {
      result.warnings.push_back("compound " + compound + " is not released by any configured source; ignored");
      continue;
    }
    rows.push_back(std::move(row));
  }
  for (int y : skipped_years)
    result.warnings.push_back("no production data for year " + std::to_string(y) + "; its observations were ignored");

  // Shared compounds are split by the joint solve; say so.
  std::map<std::string, std::vector<SourceId>> sharing;
  for (SourceId s : unknown)
    for (const auto& e : source_compounds(tmpl, s))
      if (e.ratio > 0.0) sharing[e.compound].push_back(s);
  std::set<std::string> observed;
  for (const auto& r : rows) observed.insert(r.key.second);
  for (const auto& [c, sources] : sharing) {
    if (sources.size() < 2 || !observed.contains(c)) continue;
    std::string names;
    for (SourceId s : sources) names += (names.empty() ? "" : ", ") + std::string(source_name(s));
    result.warnings.push_back("compound " + c + " is shared by sources [" + names +
                              "]; split by joint least squares across years using each source's modelled "
                              "usage per unit k and its compound weights (mix ratios, or equal split)");
  }

  if (unknown.empty()) return result;

  std::vector<std::string> unfittable;
  for (std::size_t j = 0; j < unknown.size(); ++j) {
    bool any = false;
    for (const auto& r : rows) any = any || r.coeffs[j] != 0.0;
    if (!any) unfittable.push_back(std::string(source_name(unknown[j])));
  }
  auto fail = [&](std::vector<std::string> names, const std::string& why) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw Error(Errc::underdetermined, why + "; unfittable sources: [" + list + "]");
  };
  if (rows.size() < unknown.size()) {
    std::vector<std::string> all;
    for (SourceId s : unknown) all.push_back(std::string(source_name(s)));
    fail(all, std::to_string(rows.size()) + " observations for " + std::to_string(unknown.size()) + " unknown coefficients");
  }
  if (!unfittable.empty()) fail(unfittable, "no observed compound constrains these sources");

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(unknown.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[static_cast<std::size_t>(i)].coeffs[static_cast<std::size_t>(j)];
    b(i) = rows[static_cast<std::size_t>(i)].rhs;
  }
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  Eigen::MatrixXd scaled = a * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < n) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd kernel = lu.kernel();
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < n; ++j)
      if (kernel.row(j).cwiseAbs().maxCoeff() > 1e-8) names.push_back(std::string(source_name(unknown[static_cast<std::size_t>(j)])));
    fail(names, "observations do not separate these sources (rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(n) + ")");
  }

  const Eigen::VectorXd xs = nnls(scaled, b);
  for (Eigen::Index j = 0; j < n; ++j) result.coefficients[unknown[static_cast<std::size_t>(j)]] = xs(j) / scale(j);

  // Relative to the observed mass; rows observing zero fall back to the
  // mean observed magnitude.
  const Eigen::VectorXd x = xs.cwiseQuotient(scale);
  const Eigen::VectorXd pred = a * x;
  double mean_abs = 0.0;
  for (const auto& r : rows) mean_abs += std::abs(r.observed) / static_cast<double>(rows.size());
  double sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double obs = rows[static_cast<std::size_t>(i)].observed;
    const double denom = obs != 0.0 ? std::abs(obs) : (mean_abs > 0.0 ? mean_abs : 1.0);
    const double rel = (pred(i) - b(i)) / denom;
    sq += rel * rel;
  }
  result.residual = std::sqrt(sq / static_cast<double>(m));
  result.equations = rows.size();
  return result;
}

}  // namespace detail

/// Fits the unset base coefficients of `tmpl` so modelled releases match
/// the attributable masses. Every usage formula is linear in its k.
inline CalibrationResult fit_base_coefficients(const std::map<ObservationKey, double>& attributable,
                                               const FacilitySite& site, const FabProfile& tmpl,
                                               const CalibrationOptions& opt = {}) {
  validate(site);
  if (opt.pooling == YearPooling::Pooled) return detail::fit_pooled(attributable, site, tmpl);

  std::map<int, std::map<ObservationKey, double>> by_year;
  for (const auto& [key, mass] : attributable) by_year[key.first][key] = mass;
  CalibrationResult out;
  std::map<SourceId, double> sums;
  double sq = 0.0;
  for (const auto& [year, obs] : by_year) {
    auto r = detail::fit_pooled(obs, site, tmpl);
    for (const auto& [s, k] : r.coefficients) sums[s] += k;
    sq += r.residual * r.residual;
    out.equations += r.equations;
    for (auto& w : r.warnings) out.warnings.push_back(std::to_string(year) + ": " + w);
  }
  for (const auto& [s, total] : sums) out.coefficients[s] = total / static_cast<double>(by_year.size());
  out.residual = by_year.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(by_year.size()));
  return out;
}

/// Template with the fitted coefficients written in.
inline FabProfile apply_calibration(FabProfile tmpl, const CalibrationResult& r) {
  for (const auto& [s, k] : r.coefficients) tmpl.source(s).params.k = k;
  return tmpl;
}

struct SyntheticRecordOptions {
  double background_g = 100.0;  // mass of each neighbour record and of the facility's share of background
  std::size_t neighbors = 4;
  double neighbor_distance_miles = 5.0;
  double far_distance_miles = 30.0;  // one record outside the baseline radius
};

/// Exact records implied by `profile` and the site's production history:
/// facility record = modelled release + background, neighbours = background.
inline std::vector<EmissionRecord> synthesize_records(const FabProfile& profile, const FacilitySite& site,
                                                      const SyntheticRecordOptions& opt = {}) {
  std::vector<EmissionRecord> out;
  constexpr double miles_per_degree = kEarthRadiusMiles * std::numbers::pi / 180.0;
  const auto& c = site.location;
  for (const auto& [key, mass] : modeled_release(profile, site)) {
    const auto& [year, compound] = key;
    out.push_back({c.latitude, c.longitude, year, compound, mass + opt.background_g});
    for (std::size_t i = 0; i < opt.neighbors; ++i) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(opt.neighbors);
      const double dlat = opt.neighbor_distance_miles * std::sin(angle) / miles_per_degree;
      const double dlon = opt.neighbor_distance_miles * std::cos(angle) /
                          (miles_per_degree * std::cos(c.latitude * std::numbers::pi / 180.0));
      out.push_back({c.latitude + dlat, c.longitude + dlon, year, compound, opt.background_g});
    }
    out.push_back({c.latitude + opt.far_distance_miles / miles_per_degree, c.longitude, year, compound,
                   50.0 * opt.background_g});
  }
  return out;
}

// ---- JSON -------------------------------------------------------------------

inline FacilitySite site_from_json(const json& j) {
  ObjectReader r(j, "");
  FacilitySite s;
  s.location.latitude = r.number("latitude");
  s.location.longitude = r.number("longitude");
  {
    auto units = r.object("units_produced_per_year");
    for (auto it = units.value().begin(); it != units.value().end(); ++it)
      s.units_produced_per_year[static_cast<int>(detail::parse_int(it.key(), units.sub(it.key())))] =
          units.number(it.key());
    units.finish();
  }
  {
    auto specs = r.object("product_specs");
    for (auto it = specs.value().begin(); it != specs.value().end(); ++it)
      s.product_specs[static_cast<int>(detail::parse_int(it.key(), specs.sub(it.key())))] =
          spec_from_json(specs.raw(it.key()), specs.sub(it.key()));
    specs.finish();
  }
  r.finish();
  validate(s);
  return s;
}

inline json to_json(const FacilitySite& s) {
  json units = json::object(), specs = json::object();
  for (const auto& [y, n] : s.units_produced_per_year) units[std::to_string(y)] = n;
  for (const auto& [y, spec] : s.product_specs) specs[std::to_string(y)] = to_json(spec);
  return json{{"latitude", s.location.latitude},
              {"longitude", s.location.longitude},
              {"units_produced_per_year", units},
              {"product_specs", specs}};
}

inline json to_json(const CalibrationResult& r, const AttributableMasses* masses = nullptr) {
  json coeffs = json::object();
  for (const auto& [s, k] : r.coefficients) coeffs[std::string(source_name(s))] = k;
  json j{{"coefficients", coeffs},
         {"residual", r.residual},
         {"records_used", r.records_used},
         {"equations", r.equations},
         {"warnings", r.warnings}};
  if (masses) {
    json att = json::array();
    for (const auto& [key, m] : masses->mass_g) att.push_back({{"year", key.first}, {"compound", key.second}, {"mass_g", m}});
    j["attributable"] = att;
  }
  return j;
}

}  // namespace fmn

#endif  // FMN_CALIBRATION_HPP
