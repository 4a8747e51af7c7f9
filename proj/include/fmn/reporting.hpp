#ifndef FMN_REPORTING_HPP
#define FMN_REPORTING_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fmn/catalog.hpp"
#include "fmn/detail/text.hpp"
#include "fmn/engine.hpp"
#include "fmn/json.hpp"
#include "fmn/scenario.hpp"

namespace fmn {

inline constexpr std::string_view kVersion = "1.0.0";

enum class SweepAxisKind { NodeNm, Capacity, Generation };
enum class Normalization { None, PerGb, PerTb };

inline std::string_view axis_name(SweepAxisKind k) {
  switch (k) {
    case SweepAxisKind::NodeNm: return "node_nm";
    case SweepAxisKind::Capacity: return "capacity";
    case SweepAxisKind::Generation: return "generation";
  }
  return "node_nm";
}

inline std::string_view normalization_name(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::PerGb: return "per_gb";
    case Normalization::PerTb: return "per_tb";
  }
  return "none";
}

inline Normalization parse_normalization(std::string_view s) {
  if (s == "none") return Normalization::None;
  if (s == "per_gb") return Normalization::PerGb;
  if (s == "per_tb") return Normalization::PerTb;
  throw Error(Errc::schema, "unknown normalization '" + std::string(s) + "' (expected none|per_gb|per_tb)", "normalization");
}

struct SweepAxis {
  SweepAxisKind kind = SweepAxisKind::NodeNm;
  std::vector<double> values;              // node sizes or capacities
  std::vector<HardwareSpec> generations;   // generation-ordered specs
};

struct SweepPoint {
  double x = 0.0;
  EmissionBreakdown breakdown;
  std::optional<EmissionBreakdown> normalized;
};

struct TrendSweep {
  SweepAxisKind axis = SweepAxisKind::NodeNm;
  Normalization normalization = Normalization::None;
  GwpHorizon horizon = GwpHorizon::Y500;
  std::vector<SweepPoint> points;
};

/// Capacity feature swept for a kind: memory_gb for DRAM, capacity_tb otherwise.
inline std::string capacity_feature(HardwareKind k) { return k == HardwareKind::DRAM ? "memory_gb" : "capacity_tb"; }

/// Divides the emission fields only; usage grams stay as evaluated.
inline EmissionBreakdown normalize(EmissionBreakdown b, Normalization n) {
  if (n == Normalization::None) return b;
  double gb = 0.0;
  if (auto it = b.spec.features.find("memory_gb"); it != b.spec.features.end())
    gb = it->second;
  else if (auto it2 = b.spec.features.find("capacity_tb"); it2 != b.spec.features.end())
    gb = it2->second * 1000.0;
  else
    throw Error(Errc::missing_feature, "normalization needs memory_gb or capacity_tb", "spec.features");
  const double divisor = n == Normalization::PerGb ? gb : gb / 1000.0;
  if (!(divisor > 0.0)) throw Error(Errc::invalid_argument, "normalization divisor must be > 0", "spec.features");
  for (auto& e : b.sources) e.gco2eq /= divisor;
  b.total_gco2eq /= divisor;
  return b;
}

inline TrendSweep sweep(const SweepAxis& axis, const HardwareSpec& base, const FabProfile& profile, GwpHorizon h,
                        Normalization norm = Normalization::None) {
  std::vector<std::pair<double, HardwareSpec>> specs;
  switch (axis.kind) {
    case SweepAxisKind::NodeNm:
      for (double v : axis.values) {
        auto s = base;
        s.node_nm = v;
        specs.emplace_back(v, s);
      }
      break;
    case SweepAxisKind::Capacity:
      for (double v : axis.values) {
        auto s = base;
        s.features[capacity_feature(base.kind)] = v;
        specs.emplace_back(v, s);
      }
      break;
    case SweepAxisKind::Generation:
      for (std::size_t i = 0; i < axis.generations.size(); ++i)
        specs.emplace_back(static_cast<double>(i), axis.generations[i]);
      break;
  }
  if (specs.empty()) throw Error(Errc::empty_input, "sweep axis has no points", "axis.values");
  if (specs.size() > 1) {
    const bool up = specs[1].first > specs[0].first;
    for (std::size_t i = 1; i < specs.size(); ++i)
      if (up ? !(specs[i].first > specs[i - 1].first) : !(specs[i].first < specs[i - 1].first))
        throw Error(Errc::invalid_argument, "axis values must be strictly monotone", "axis.values");
  }
  TrendSweep out{axis.kind, norm, h, {}};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    SweepPoint p;
    p.x = specs[i].first;
    try {
      p.breakdown = total_emission(specs[i].second, profile, h);
      if (norm != Normalization::None) p.normalized = normalize(p.breakdown, norm);
    } catch (const Error& e) {
      throw e.within("points[" + std::to_string(i) + "]");
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

// ---- JSON ---------------------------------------------------------------------

inline SweepAxis sweep_axis_from_json(const json& j, const std::string& path = "axis") {
  ObjectReader r(j, path);
  SweepAxis a;
  const std::string kind = r.string("kind");
  if (kind == "node_nm" || kind == "capacity") {
    a.kind = kind == "node_nm" ? SweepAxisKind::NodeNm : SweepAxisKind::Capacity;
    const json& v = r.raw("values");
    if (!v.is_array()) throw Error(Errc::schema, "expected an array", r.sub("values"));
    for (const auto& x : v) a.values.push_back(ObjectReader::as_number(x, r.sub("values")));
  } else if (kind == "generation") {
    a.kind = SweepAxisKind::Generation;
    const json& v = r.raw("specs");
    if (!v.is_array()) throw Error(Errc::schema, "expected an array", r.sub("specs"));
    for (std::size_t i = 0; i < v.size(); ++i)
      a.generations.push_back(spec_from_json(v[i], r.sub("specs") + "[" + std::to_string(i) + "]"));
  } else {
    throw Error(Errc::schema, "unknown axis kind '" + kind + "' (expected node_nm|capacity|generation)", r.sub("kind"));
  }
  r.finish();
  return a;
}

inline json to_json(const TrendSweep& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    json j{{"x", p.x}, {"breakdown", to_json(p.breakdown)}};
    if (p.normalized) j["normalized"] = to_json(*p.normalized);
    points.push_back(j);
  }
  return json{{"axis", axis_name(s.axis)},
              {"normalization", normalization_name(s.normalization)},
              {"horizon", horizon_name(s.horizon)},
              {"points", points}};
}

// ---- CSV ----------------------------------------------------------------------
// Comma separated, '.' decimal, LF line endings, header row first.

inline std::string breakdown_csv(const EmissionBreakdown& b) {
  using detail::format_double;
  std::string out = "source,usage_g,wafers,release,gwp,gco2eq\n";
  for (const auto& e : b.sources)
    out += std::string(source_name(e.source)) + ',' + format_double(e.usage_g) + ',' + format_double(e.wafers) + ',' +
           format_double(e.release) + ',' + format_double(e.gwp) + ',' + format_double(e.gco2eq) + '\n';
  out += "total,,,,," + format_double(b.total_gco2eq) + '\n';
  return out;
}

inline std::string ranking_csv(const std::vector<Assembly>& ranking) {
  using detail::format_double;
  std::string out = "rank,cpu,dram,storage,embodied_g,fluorinated_g,total_g,performance\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& a = ranking[i];
    out += std::to_string(i + 1) + ',' + a.key.cpu + ',' + a.key.dram + ',' + a.key.storage + ',' +
           format_double(a.embodied_total()) + ',' + format_double(a.fluorinated_total()) + ',' +
           format_double(a.total_gco2eq) + ',' + format_double(a.performance) + '\n';
  }
  return out;
}

inline std::string scenario_csv(const ScenarioReport& r) {
  using detail::format_double;
  std::string out = "source,baseline_gco2eq,modified_gco2eq,delta_gco2eq\n";
  for (SourceId s : kAllSources)
    out += std::string(source_name(s)) + ',' + format_double(r.baseline.at(s).gco2eq) + ',' +
           format_double(r.modified.at(s).gco2eq) + ',' + format_double(r.delta_gco2eq[source_index(s)]) + '\n';
  out += "total," + format_double(r.baseline.total_gco2eq) + ',' + format_double(r.modified.total_gco2eq) + ',' +
         format_double(r.total_delta_gco2eq) + '\n';
  return out;
}

inline std::string sweep_csv(const TrendSweep& s) {
  using detail::format_double;
  std::string out = "x";
  for (SourceId id : kAllSources) out += "," + std::string(source_name(id));
  out += ",total_gco2eq\n";
  for (const auto& p : s.points) {
    const auto& b = p.normalized ? *p.normalized : p.breakdown;
    out += format_double(p.x);
    for (const auto& e : b.sources) out += "," + format_double(e.gco2eq);
    out += "," + format_double(b.total_gco2eq) + "\n";
  }
  return out;
}

inline std::string validation_csv(const ValidationReport& v) {
  using detail::format_double;
  std::string out = "source,model_gco2eq,measured_gco2eq,diff\n";
  for (const auto& e : v.entries)
    out += std::string(source_name(e.source)) + ',' + format_double(e.model_gco2eq) + ',' +
           format_double(e.measured_gco2eq) + ',' + format_double(e.diff) + '\n';
  out += "total," + format_double(v.model_total) + ',' + format_double(v.measured_total) + ',' +
         format_double(v.total_diff) + '\n';
  return out;
}

// ---- export -------------------------------------------------------------------

enum class ExportFormat { Json, Csv };

inline ExportFormat parse_format(std::string_view s) {
  if (s == "json") return ExportFormat::Json;
  if (s == "csv") return ExportFormat::Csv;
  throw Error(Errc::usage, "unknown format '" + std::string(s) + "' (expected json|csv)", "format");
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open for writing", path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::io, "write failed", path);
}

/// Writes the payload to `path` and run information to `path`.meta.json.
/// The payload itself carries no timestamps, so identical inputs give
/// identical bytes.
inline void export_report(std::string_view payload, ExportFormat fmt, const std::string& path, bool sidecar = true) {
  write_file(path, payload);
  if (!sidecar) return;
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  json meta{{"generator", "forgetmenot"},
            {"version", kVersion},
            {"format", fmt == ExportFormat::Json ? "json" : "csv"},
            {"written_unix_s", secs},
            {"bytes", payload.size()}};
  write_file(path + ".meta.json", dump(meta));
}

}  // namespace fmn

#endif  // FMN_REPORTING_HPP
