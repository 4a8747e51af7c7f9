#ifndef FMN_PRESETS_HPP
#define FMN_PRESETS_HPP

#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "fmn/calibration.hpp"
#include "fmn/catalog.hpp"
#include "fmn/json.hpp"

namespace fmn {

enum class PresetKind { Profile, Spec, Catalog, Measured, Site, Records, Levers };

inline std::string_view preset_kind_name(PresetKind k) {
  switch (k) {
    case PresetKind::Profile: return "profile";
    case PresetKind::Spec: return "spec";
    case PresetKind::Catalog: return "catalog";
    case PresetKind::Measured: return "measured";
    case PresetKind::Site: return "site";
    case PresetKind::Records: return "records";
    case PresetKind::Levers: return "levers";
  }
  return "profile";
}

struct Preset {
  std::string name;
  PresetKind kind;
  std::string description;
  std::string content;  // JSON text, or CSV for records
};

namespace presets_detail {

// Coefficients, reference hardware and per-source blended GWPs of the
// Hillsboro (Oregon) worked example. The release fraction of 0.9 is the
// value that reproduces the worked per-source numbers. DRAM/storage
// die-area models and the high-NA factor are illustrative, not published.
inline constexpr std::string_view kIntelOregonProfile = R"json({
  "name": "intel-oregon-paper",
  "note": "Hillsboro worked-example coefficients. release_fraction 0.9 reproduces the published per-source values; a literal 1 - recovery reading with recovery 0.9 gives 0.1. DRAM/storage die-area models and euv_high_na are illustrative defaults.",
  "default_horizon": "y500",
  "geometry": {"wafer_diameter_mm": 150, "usable_fraction": 0.95, "yield_fraction": 0.8},
  "release_fraction": 0.9,
  "lithography_factors": {"duv": 1.0, "euv": 0.8, "euv_high_na": 0.7},
  "reference": {
    "node_nm": 14,
    "t_process_hours": 20,
    "package_size_mm2": 4000,
    "steps": {
      "etching": 20, "chamber_cleaning": 15, "photolithography": 25, "solvent_fluids": 10,
      "testing": 20, "vapor_phase_soldering": 5, "vacuum_pumps": 50, "plasma_coatings": 10
    }
  },
  "die_area_models": {
    "cpu": {"constant_mm2": 0, "terms": {"cores": 4.5, "cache_mb": 0.4}},
    "dram": {"constant_mm2": 0, "terms": {"memory_gb": 1.5}},
    "storage": {"constant_mm2": 150, "terms": {}}
  },
  "sources": {
    "etching": {"k_g_per_mm2_step": 0.005, "alpha": 0.5, "gwp": {"y500": 9928}},
    "chamber_cleaning": {"k_g_per_mm2_step": 0.003, "alpha": 0.5, "gwp": {"y500": 19550}},
    "photolithography": {"k_g_per_mm2_step": 0.0007, "alpha": 1.0, "gwp": {"y500": 12356}},
    "heat_transfer_fluids": {"k_g_per_hour_w": 0.0025, "alpha": 0.5, "gwp": {"y500": 9405}},
    "solvent_fluids": {"k_g_per_mm2_step": 0.001, "alpha": 0.5, "gwp": {"y500": 13140}},
    "dielectric_fluids": {"k_g_per_mm2": 0.01, "gwp": {"y500": 9136}},
    "wafer_thinning": {"k_g_per_mm2": 0.0002, "gwp": {"y500": 17490}},
    "testing": {"k_g_per_mm2_step": 0.0001, "alpha": 1.0, "gwp": {"y500": 16285}},
    "vapor_phase_soldering": {"k_g_per_step": 0.4, "alpha": 1.0, "gwp": {"y500": 17140}},
    "vacuum_pumps": {"k_g_per_step": 0.02, "alpha": 0.8, "gwp": {"y500": 9264}},
    "plasma_coatings": {"k_g_per_mm2_step": 0.0001, "alpha": 1.0, "gwp": {"y500": 11000}},
    "packaging": {"k_g_per_mm2": 0.0002, "gwp": {"y500": 18600}}
  }
})json";

inline constexpr std::string_view kFlagshipSpec = R"json({
  "kind": "cpu", "node_nm": 7, "lithography": "euv",
  "features": {"cores": 112, "cache_mb": 168},
  "tdp_w": 300, "package_size_mm2": 2500
})json";

// TDP and package are not published for this part; 205 W / 3500 mm2 are placeholders.
inline constexpr std::string_view kXeon32Spec = R"json({
  "kind": "cpu", "node_nm": 7, "lithography": "euv",
  "features": {"cores": 32, "cache_mb": 48},
  "tdp_w": 205, "package_size_mm2": 3500
})json";

inline constexpr std::string_view kZeroAreaSpec = R"json({
  "kind": "cpu", "node_nm": 7, "lithography": "euv",
  "features": {"cores": 0, "cache_mb": 0},
  "tdp_w": 300, "package_size_mm2": 2500
})json";

inline constexpr std::string_view kStorageSpec = R"json({
  "kind": "storage", "node_nm": 14, "lithography": "duv",
  "features": {"capacity_tb": 8},
  "tdp_w": 8, "package_size_mm2": 2000, "step_capacity_exponent": 0.5
})json";

inline constexpr std::string_view kPublishedFlagshipValues = R"json({
  "etching": 24560, "chamber_cleaning": 21278, "photolithography": 7568,
  "heat_transfer_fluids": 7640, "solvent_fluids": 4064, "dielectric_fluids": 1998,
  "wafer_thinning": 2365, "testing": 1424, "vapor_phase_soldering": 820,
  "vacuum_pumps": 618, "plasma_coatings": 480, "packaging": 356
})json";

// Synthetic component values; not a real product catalog.
inline constexpr std::string_view kFixtureComponents = R"json([
  {"id": "cpu-a", "kind": "cpu", "vendor": "intel", "generation": 2,
   "spec": {"kind": "cpu", "node_nm": 14, "lithography": "duv", "features": {"cores": 20, "cache_mb": 27.5}, "tdp_w": 150, "package_size_mm2": 3500},
   "embodied_carbon_gco2eq": 20000, "performance_score": 1.0, "attributes": {}},
  {"id": "cpu-b", "kind": "cpu", "vendor": "intel", "generation": 3,
   "spec": {"kind": "cpu", "node_nm": 10, "lithography": "duv", "features": {"cores": 28, "cache_mb": 42}, "tdp_w": 205, "package_size_mm2": 4000},
   "embodied_carbon_gco2eq": 24000, "performance_score": 1.6, "attributes": {}},
  {"id": "cpu-c", "kind": "cpu", "vendor": "intel", "generation": 4,
   "spec": {"kind": "cpu", "node_nm": 7, "lithography": "euv", "features": {"cores": 32, "cache_mb": 60}, "tdp_w": 250, "package_size_mm2": 4500},
   "embodied_carbon_gco2eq": 27000, "performance_score": 2.4, "attributes": {}},
  {"id": "cpu-d", "kind": "cpu", "vendor": "intel", "generation": 5,
   "spec": {"kind": "cpu", "node_nm": 7, "lithography": "euv", "features": {"cores": 64, "cache_mb": 120}, "tdp_w": 300, "package_size_mm2": 4500},
   "embodied_carbon_gco2eq": 32000, "performance_score": 3.9, "attributes": {}},
  {"id": "cpu-e", "kind": "cpu", "vendor": "amd", "generation": 4,
   "spec": {"kind": "cpu", "node_nm": 5, "lithography": "euv", "features": {"cores": 24, "cache_mb": 64}, "tdp_w": 200, "package_size_mm2": 3000},
   "embodied_carbon_gco2eq": 26000, "performance_score": 2.0, "attributes": {}},
  {"id": "dram-a", "kind": "dram", "vendor": "samsung", "generation": 4,
   "spec": {"kind": "dram", "node_nm": 14, "lithography": "duv", "features": {"memory_gb": 32}, "tdp_w": 5, "package_size_mm2": 1200},
   "embodied_carbon_gco2eq": 9000, "performance_score": 25.6, "attributes": {"memory_standard": "DDR4"}},
  {"id": "dram-b", "kind": "dram", "vendor": "micron", "generation": 4,
   "spec": {"kind": "dram", "node_nm": 14, "lithography": "duv", "features": {"memory_gb": 64}, "tdp_w": 7, "package_size_mm2": 1200},
   "embodied_carbon_gco2eq": 15000, "performance_score": 25.6, "attributes": {"memory_standard": "DDR4"}},
  {"id": "dram-c", "kind": "dram", "vendor": "sk-hynix", "generation": 5,
   "spec": {"kind": "dram", "node_nm": 10, "lithography": "euv", "features": {"memory_gb": 64}, "tdp_w": 8, "package_size_mm2": 1300},
   "embodied_carbon_gco2eq": 16000, "performance_score": 38.4, "attributes": {"memory_standard": "DDR5"}},
  {"id": "dram-d", "kind": "dram", "vendor": "samsung", "generation": 5,
   "spec": {"kind": "dram", "node_nm": 10, "lithography": "euv", "features": {"memory_gb": 128}, "tdp_w": 10, "package_size_mm2": 1300},
   "embodied_carbon_gco2eq": 27000, "performance_score": 38.4, "attributes": {"memory_standard": "DDR5"}},
  {"id": "sto-hdd-08", "kind": "storage", "vendor": "seagate", "generation": 1,
   "spec": {"kind": "storage", "node_nm": 28, "lithography": "duv", "features": {"capacity_tb": 8}, "tdp_w": 8, "package_size_mm2": 2000, "step_capacity_exponent": 0.5},
   "embodied_carbon_gco2eq": 12000, "performance_score": 0.25, "attributes": {"storage_interface": "SATA_HDD"}},
  {"id": "sto-hdd-16", "kind": "storage", "vendor": "seagate", "generation": 1,
   "spec": {"kind": "storage", "node_nm": 28, "lithography": "duv", "features": {"capacity_tb": 16}, "tdp_w": 9, "package_size_mm2": 2000, "step_capacity_exponent": 0.5},
   "embodied_carbon_gco2eq": 16000, "performance_score": 0.26, "attributes": {"storage_interface": "SATA_HDD"}},
  {"id": "sto-nvme-07", "kind": "storage", "vendor": "samsung", "generation": 4,
   "spec": {"kind": "storage", "node_nm": 14, "lithography": "duv", "features": {"capacity_tb": 7.68}, "tdp_w": 12, "package_size_mm2": 1500, "step_capacity_exponent": 0.5},
   "embodied_carbon_gco2eq": 60000, "performance_score": 7.0, "attributes": {"storage_interface": "NVMe"}},
  {"id": "sto-nvme-15", "kind": "storage", "vendor": "micron", "generation": 4,
   "spec": {"kind": "storage", "node_nm": 14, "lithography": "duv", "features": {"capacity_tb": 15.36}, "tdp_w": 14, "package_size_mm2": 1500, "step_capacity_exponent": 0.5},
   "embodied_carbon_gco2eq": 110000, "performance_score": 7.0, "attributes": {"storage_interface": "NVMe"}},
  {"id": "sto-ssd-08", "kind": "storage", "vendor": "kioxia", "generation": 3,
   "spec": {"kind": "storage", "node_nm": 14, "lithography": "duv", "features": {"capacity_tb": 7.68}, "tdp_w": 6, "package_size_mm2": 1500, "step_capacity_exponent": 0.5},
   "embodied_carbon_gco2eq": 55000, "performance_score": 0.55, "attributes": {"storage_interface": "SATA_SSD"}}
])json";

inline constexpr std::string_view kFixtureClasses = R"json({
  "rejects-everything": {"constraints": [{"component": "cpu", "field": "cores", "op": "gt", "value": 100000}]}
})json";

inline constexpr std::string_view kSyntheticSite = R"json({
  "latitude": 45.5229, "longitude": -122.9898,
  "units_produced_per_year": {"2021": 100000, "2022": 150000, "2023": 200000},
  "product_specs": {
    "2021": {"kind": "cpu", "node_nm": 14, "lithography": "duv", "features": {"cores": 28, "cache_mb": 38.5}, "tdp_w": 205, "package_size_mm2": 3500},
    "2022": {"kind": "cpu", "node_nm": 10, "lithography": "duv", "features": {"cores": 40, "cache_mb": 60}, "tdp_w": 270, "package_size_mm2": 4000},
    "2023": {"kind": "cpu", "node_nm": 7, "lithography": "euv", "features": {"cores": 112, "cache_mb": 168}, "tdp_w": 300, "package_size_mm2": 2500}
  }
})json";

inline constexpr std::string_view kCleanEtchLevers = R"json([
  {"type": "clean_etch_rebalance", "clean_step_multiplier": 0.5, "etch_step_multiplier": 1.5}
])json";

inline json fixture_catalog(const json& profile, const std::string& profile_name) {
  json components = json::parse(kFixtureComponents);
  for (auto& c : components) c["fab_profile"] = profile_name;
  json cat{{"components", components}, {"classes", json::parse(kFixtureClasses)}};
  if (!profile.is_null()) cat["profiles"] = json{{profile_name, profile}};
  return cat;
}

/// Same fab as the worked example, with `factor(source, horizon)` applied
/// to the y500 GWP to fill all three horizons.
template <typename Factor>
json horizon_profile(std::string name, Factor factor) {
  json p = json::parse(kIntelOregonProfile);
  p["name"] = std::move(name);
  p["note"] = "Synthetic GWP table derived from the worked-example y500 values.";
  std::size_t i = 0;
  for (auto& [key, src] : p["sources"].items()) {
    const double v = src["gwp"]["y500"].template get<double>();
    src["gwp"] = json{{"y20", v * factor(i, GwpHorizon::Y20)},
                      {"y100", v * factor(i, GwpHorizon::Y100)},
                      {"y500", v}};
    ++i;
  }
  return p;
}

inline json template_profile() {
  json p = json::parse(kIntelOregonProfile);
  p["name"] = "template";
  p["note"] = "Neutral template: base coefficients are null and must be filled (for example by calibrate).";
  for (auto& [key, src] : p["sources"].items())
    for (auto& [field, v] : src.items())
      if (field.rfind("k_", 0) == 0) v = nullptr;
  return p;
}

inline std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  auto add = [&](std::string name, PresetKind kind, std::string desc, std::string content) {
    out.push_back({std::move(name), kind, std::move(desc), std::move(content)});
  };
  const json intel = json::parse(kIntelOregonProfile);
  add("intel-oregon-paper", PresetKind::Profile, "Hillsboro worked-example fab profile", dump(intel));
  add("template", PresetKind::Profile, "profile with null base coefficients", dump(template_profile()));
  const json uniform = horizon_profile("uniform-fab", [](std::size_t, GwpHorizon) { return 1.0; });
  const json varying = horizon_profile("horizon-fab", [](std::size_t i, GwpHorizon h) {
    // Arbitrary, source-dependent reweighting so rankings can move.
    const double base = h == GwpHorizon::Y20 ? 0.55 : 0.85;
    return base + 0.07 * static_cast<double>((i * 5) % 7);
  });
  add("uniform-fab", PresetKind::Profile, "worked-example fab with horizon-independent GWPs", dump(uniform));
  add("horizon-fab", PresetKind::Profile, "worked-example fab with synthetic horizon-dependent GWPs", dump(varying));

  add("flagship", PresetKind::Spec, "112-core / 168 MB, 7 nm EUV, 300 W, 2500 mm2 package",
      dump(json::parse(kFlagshipSpec)));
  add("xeon-32core", PresetKind::Spec, "32-core / 48 MB, 7 nm EUV (TDP and package are placeholders)",
      dump(json::parse(kXeon32Spec)));
  add("zero-area", PresetKind::Spec, "CPU with no cores or cache", dump(json::parse(kZeroAreaSpec)));
  add("storage-8tb", PresetKind::Spec, "8 TB storage device, 14 nm DUV", dump(json::parse(kStorageSpec)));

  add("flagship-published", PresetKind::Measured, "published per-source values for the flagship part",
      dump(json::parse(kPublishedFlagshipValues)));

  add("fixture", PresetKind::Catalog, "synthetic 5x4x5 catalog on the worked-example fab",
      dump(fixture_catalog(nullptr, "intel-oregon-paper")));
  add("fixture-uniform-gwp", PresetKind::Catalog, "fixture catalog with horizon-independent GWPs",
      dump(fixture_catalog(uniform, "uniform-fab")));
  add("fixture-horizon-gwp", PresetKind::Catalog, "fixture catalog with horizon-dependent GWPs",
      dump(fixture_catalog(varying, "horizon-fab")));

  add("clean-etch-rebalance", PresetKind::Levers, "halve cleaning steps, add 50% etching steps",
      dump(json::parse(kCleanEtchLevers)));

  const json site_json = json::parse(kSyntheticSite);
  add("synthetic-site", PresetKind::Site, "Hillsboro site with three years of production", dump(site_json));
  const FacilitySite site = site_from_json(site_json);
  const FabProfile profile = profile_from_json(intel);
  add("synthetic-records", PresetKind::Records, "exact records generated from intel-oregon-paper at synthetic-site",
      records_to_csv(synthesize_records(profile, site)));
  std::vector<EmissionRecord> uniform_records;
  for (const auto& r : synthesize_records(profile, site))
    uniform_records.push_back({r.latitude, r.longitude, r.year, r.compound,
                               haversine_miles(site.location, r.location()) < 20.0 ? 100.0 : r.mass_g});
  add("synthetic-records-uniform", PresetKind::Records, "facility and neighbours all report the same mass",
      records_to_csv(uniform_records));
  return out;
}

}  // namespace presets_detail

/// Embedded presets, built once.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = presets_detail::build_presets();
  return all;
}

inline const Preset* find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

inline constexpr std::string_view kPresetPrefix = "preset:";

/// Text of a named preset. FORGETMENOT_CONFIG_DIR, when set, is searched
/// first for NAME.json (or NAME.csv).
inline std::string preset_text(std::string_view name) {
  if (const char* dir = std::getenv("FORGETMENOT_CONFIG_DIR"); dir && *dir) {
    for (const char* ext : {".json", ".csv"}) {
      std::filesystem::path p = std::filesystem::path(dir) / (std::string(name) + ext);
      if (std::filesystem::is_regular_file(p)) return read_file(p.string());
    }
  }
  if (const auto* p = find_preset(name)) return p->content;
  throw Error(Errc::not_found, "unknown preset '" + std::string(name) + "'");
}

/// "preset:NAME" resolves to a preset; anything else is a file path.
inline std::string load_source(std::string_view ref) {
  if (ref.starts_with(kPresetPrefix)) return preset_text(ref.substr(kPresetPrefix.size()));
  return read_file(std::string(ref));
}

/// Profiles addressable by name from catalogs: embedded profile presets.
inline const FabProfile* preset_profile(std::string_view name) {
  static const std::map<std::string, FabProfile, std::less<>> cache = [] {
    std::map<std::string, FabProfile, std::less<>> m;
    for (const auto& p : presets())
      if (p.kind == PresetKind::Profile) m.emplace(p.name, profile_from_json(json::parse(p.content)));
    return m;
  }();
  if (const char* dir = std::getenv("FORGETMENOT_CONFIG_DIR"); dir && *dir) {
    std::filesystem::path p = std::filesystem::path(dir) / (std::string(name) + ".json");
    if (std::filesystem::is_regular_file(p)) {
      // Config-dir profiles are re-read on every call; callers cache per request.
      thread_local std::map<std::string, FabProfile> overrides;
      auto& slot = overrides[std::string(name)];
      slot = profile_from_json(parse_json_text(read_file(p.string()), p.string()));
      return &slot;
    }
  }
  auto it = cache.find(name);
  return it == cache.end() ? nullptr : &it->second;
}

}  // namespace fmn

#endif  // FMN_PRESETS_HPP
