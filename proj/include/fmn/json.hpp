#ifndef FMN_JSON_HPP
#define FMN_JSON_HPP

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fmn/engine.hpp"
#include "fmn/error.hpp"

namespace fmn {

using json = nlohmann::json;

/// Reads one JSON object strictly: every key must be consumed, and keys
/// left over when finish() is called are reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(Errc::schema, "expected an object", path_or("(root)"));
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json& raw(std::string_view key) {
    const std::string k(key);
    if (!j_.contains(k)) throw Error(Errc::schema, "missing required field", sub(k));
    seen_.insert(k);
    return j_.at(k);
  }

  const json* raw_opt(std::string_view key) {
    const std::string k(key);
    if (!j_.contains(k)) return nullptr;
    seen_.insert(k);
    return &j_.at(k);
  }

  double number(std::string_view key) { return as_number(raw(key), sub(key)); }

  std::optional<double> number_opt(std::string_view key) {
    const json* v = raw_opt(key);
    if (!v) return std::nullopt;
    return as_number(*v, sub(key));
  }

  /// Present-but-null maps to nullopt as well.
  std::optional<double> nullable_number(std::string_view key) {
    const json* v = raw_opt(key);
    if (!v || v->is_null()) return std::nullopt;
    return as_number(*v, sub(key));
  }

  std::string string(std::string_view key) { return as_string(raw(key), sub(key)); }

  std::optional<std::string> string_opt(std::string_view key) {
    const json* v = raw_opt(key);
    if (!v) return std::nullopt;
    return as_string(*v, sub(key));
  }

  bool boolean_opt(std::string_view key, bool fallback) {
    const json* v = raw_opt(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw Error(Errc::schema, "expected a boolean", sub(key));
    return v->get<bool>();
  }

  ObjectReader object(std::string_view key) { return ObjectReader(raw(key), sub(key)); }

  std::string sub(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  const std::string& path() const { return path_; }
  const json& value() const { return j_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw Error(Errc::unknown_key, "unknown key '" + it.key() + "'", sub(it.key()));
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw Error(Errc::schema, "expected a number", path);
    return v.get<double>();
  }
  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw Error(Errc::schema, "expected a string", path);
    return v.get<std::string>();
  }

 private:
  std::string path_or(const char* fallback) const { return path_.empty() ? fallback : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline json parse_json_text(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::schema, std::string("invalid JSON: ") + e.what(), origin);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Canonical text form: two-space indent, sorted keys, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- units ----------------------------------------------------------------

inline GwpValues gwp_values_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  GwpValues out;
  for (GwpHorizon h : kAllHorizons)
    if (auto v = r.number_opt(horizon_name(h))) {
      if (!(*v > 0.0)) throw Error(Errc::invalid_argument, "GWP must be > 0", r.sub(horizon_name(h)));
      out[h] = *v;
    }
  r.finish();
  if (out.empty()) throw Error(Errc::schema, "at least one horizon required", path);
  return out;
}

inline json to_json(const GwpValues& g) {
  json j = json::object();
  for (const auto& [h, v] : g) j[std::string(horizon_name(h))] = v;
  return j;
}

inline FluorinatedCompound compound_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  FluorinatedCompound c;
  c.id = r.string("id");
  c.gwp = gwp_values_from_json(r.raw("gwp"), r.sub("gwp"));
  c.radiative_efficiency = r.number_opt("radiative_efficiency");
  c.atmospheric_lifetime_years = r.number_opt("lifetime_years");
  r.finish();
  try {
    validate(c);
  } catch (const Error& e) {
    throw e.within(path);
  }
  return c;
}

inline json to_json(const FluorinatedCompound& c) {
  json j{{"id", c.id}, {"gwp", to_json(c.gwp)}};
  if (c.radiative_efficiency) j["radiative_efficiency"] = *c.radiative_efficiency;
  if (c.atmospheric_lifetime_years) j["lifetime_years"] = *c.atmospheric_lifetime_years;
  return j;
}

inline CompoundRegistry registry_from_array(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw Error(Errc::schema, "expected an array", path);
  CompoundRegistry reg;
  for (std::size_t i = 0; i < arr.size(); ++i)
    reg.add(compound_from_json(arr[i], path + "[" + std::to_string(i) + "]"));
  return reg;
}

inline json registry_to_array(const CompoundRegistry& reg) {
  json arr = json::array();
  for (const auto& [id, c] : reg.all()) arr.push_back(to_json(c));
  return arr;
}

/// Registry document: {"compounds": [...]}.
inline CompoundRegistry registry_from_json(const json& j) {
  ObjectReader r(j, "");
  auto reg = registry_from_array(r.raw("compounds"), "compounds");
  r.finish();
  return reg;
}

inline json registry_to_json(const CompoundRegistry& reg) { return json{{"compounds", registry_to_array(reg)}}; }

inline CompoundMix mix_from_json(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw Error(Errc::schema, "expected an array", path);
  CompoundMix mix;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader r(arr[i], path + "[" + std::to_string(i) + "]");
    mix.entries.push_back({r.string("compound"), r.number("ratio")});
    r.finish();
  }
  try {
    validate(mix);
  } catch (const Error& e) {
    throw e.within(path);
  }
  return mix;
}

inline json to_json(const CompoundMix& mix) {
  json arr = json::array();
  for (const auto& e : mix.entries) arr.push_back({{"compound", e.compound}, {"ratio", e.ratio}});
  return arr;
}

// ---- geometry ---------------------------------------------------------------

inline HardwareSpec spec_from_json(const json& j, const std::string& path = "spec") {
  ObjectReader r(j, path);
  HardwareSpec s;
  try {
    s.kind = parse_kind(r.string("kind"));
  } catch (const Error& e) {
    if (!e.field().empty()) throw;
    throw Error(e.code(), e.what(), r.sub("kind"));
  }
  s.node_nm = r.number("node_nm");
  try {
    s.lithography = parse_lithography(r.string("lithography"));
  } catch (const Error& e) {
    if (!e.field().empty()) throw;
    throw Error(e.code(), e.what(), r.sub("lithography"));
  }
  if (const json* f = r.raw_opt("features")) {
    ObjectReader fr(*f, r.sub("features"));
    for (auto it = f->begin(); it != f->end(); ++it) s.features[it.key()] = fr.number(it.key());
    fr.finish();
  }
  s.tdp_w = r.number_opt("tdp_w").value_or(0.0);
  s.package_size_mm2 = r.number_opt("package_size_mm2").value_or(0.0);
  s.step_capacity_exponent = r.number_opt("step_capacity_exponent");
  r.finish();
  try {
    validate(s);
  } catch (const Error& e) {
    throw path.empty() ? e : e.within(path);
  }
  return s;
}

inline json to_json(const HardwareSpec& s) {
  json features = json::object();
  for (const auto& [k, v] : s.features) features[k] = v;
  json j{{"kind", kind_name(s.kind)},
         {"node_nm", s.node_nm},
         {"lithography", lithography_name(s.lithography)},
         {"features", features},
         {"tdp_w", s.tdp_w},
         {"package_size_mm2", s.package_size_mm2}};
  if (s.step_capacity_exponent) j["step_capacity_exponent"] = *s.step_capacity_exponent;
  return j;
}

inline DieAreaModel die_area_model_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  DieAreaModel m;
  m.constant_mm2 = r.number_opt("constant_mm2").value_or(0.0);
  if (const json* t = r.raw_opt("terms")) {
    ObjectReader tr(*t, r.sub("terms"));
    for (auto it = t->begin(); it != t->end(); ++it) m.terms.emplace_back(it.key(), tr.number(it.key()));
    tr.finish();
  }
  r.finish();
  try {
    validate(m);
  } catch (const Error& e) {
    throw e.within(path);
  }
  return m;
}

inline json to_json(const DieAreaModel& m) {
  json terms = json::object();
  for (const auto& [k, v] : m.terms) terms[k] = v;
  return json{{"constant_mm2", m.constant_mm2}, {"terms", terms}};
}

// ---- fab profile --------------------------------------------------------------

inline FabProfile profile_from_json(const json& j) {
  ObjectReader r(j, "");
  FabProfile p;
  p.name = r.string("name");
  p.note = r.string_opt("note").value_or("");
  if (auto h = r.string_opt("default_horizon")) p.default_horizon = parse_horizon(*h);

  {
    auto g = r.object("geometry");
    p.geometry.diameter_mm = g.number("wafer_diameter_mm");
    p.geometry.usable_fraction = g.number("usable_fraction");
    p.geometry.yield_fraction = g.number("yield_fraction");
    g.finish();
  }

  auto rho = r.number_opt("release_fraction");
  auto eta = r.number_opt("recovery");
  if (rho.has_value() == eta.has_value())
    throw Error(Errc::schema, "exactly one of release_fraction or recovery is required", "release_fraction");
  p.release = rho ? ReleaseConvention{*rho} : ReleaseConvention::from_recovery(*eta);

  if (const json* lf = r.raw_opt("lithography_factors")) {
    ObjectReader l(*lf, "lithography_factors");
    p.lithography_factors.duv = l.number("duv");
    p.lithography_factors.euv = l.number("euv");
    p.lithography_factors.euv_high_na = l.number_opt("euv_high_na").value_or(p.lithography_factors.euv_high_na);
    l.finish();
  }

  {
    auto ref = r.object("reference");
    p.reference.node_nm = ref.number("node_nm");
    p.reference.t_process_h = ref.number("t_process_hours");
    p.reference.package_size_mm2 = ref.number("package_size_mm2");
    auto steps = ref.object("steps");
    for (const auto& info : kSourceTable)
      if (info.has_steps) p.reference.steps_for(info.id) = steps.number(info.name);
    steps.finish();
    ref.finish();
  }

  {
    auto models = r.object("die_area_models");
    for (HardwareKind k : {HardwareKind::CPU, HardwareKind::DRAM, HardwareKind::Storage})
      if (const json* m = models.raw_opt(kind_name(k)))
        p.die_area_models[k] = die_area_model_from_json(*m, models.sub(kind_name(k)));
    models.finish();
  }

  if (const json* c = r.raw_opt("compounds")) p.compounds = registry_from_array(*c, "compounds");

  {
    auto sources = r.object("sources");
    for (const auto& info : kSourceTable) {
      auto s = sources.object(info.name);
      auto& cfg = p.source(info.id);
      cfg.params.k = s.nullable_number(coefficient_key(info.family));
      if (!s.has(coefficient_key(info.family)))
        throw Error(Errc::schema, "missing required field", s.sub(coefficient_key(info.family)));
      if (family_has_alpha(info.family)) {
        if (!s.has("alpha")) throw Error(Errc::schema, "missing required field", s.sub("alpha"));
        cfg.params.alpha = s.nullable_number("alpha");
      }
      const json* gwp = s.raw_opt("gwp");
      const json* mix = s.raw_opt("mix");
      if ((gwp != nullptr) == (mix != nullptr))
        throw Error(Errc::schema, "exactly one of gwp or mix is required", s.sub("gwp"));
      if (gwp)
        cfg.gwp = gwp_values_from_json(*gwp, s.sub("gwp"));
      else
        cfg.gwp = mix_from_json(*mix, s.sub("mix"));
      cfg.release_multiplier = s.number_opt("release_multiplier").value_or(1.0);
      s.finish();
    }
    sources.finish();
  }
  r.finish();
  validate(p);
  return p;
}

inline json to_json(const FabProfile& p) {
  json j;
  j["name"] = p.name;
  if (!p.note.empty()) j["note"] = p.note;
  j["default_horizon"] = horizon_name(p.default_horizon);
  j["geometry"] = {{"wafer_diameter_mm", p.geometry.diameter_mm},
                   {"usable_fraction", p.geometry.usable_fraction},
                   {"yield_fraction", p.geometry.yield_fraction}};
  j["release_fraction"] = p.release.release_fraction;
  j["lithography_factors"] = {{"duv", p.lithography_factors.duv},
                              {"euv", p.lithography_factors.euv},
                              {"euv_high_na", p.lithography_factors.euv_high_na}};
  json steps = json::object();
  for (const auto& info : kSourceTable)
    if (info.has_steps) steps[std::string(info.name)] = p.reference.steps_for(info.id);
  j["reference"] = {{"node_nm", p.reference.node_nm},
                    {"t_process_hours", p.reference.t_process_h},
                    {"package_size_mm2", p.reference.package_size_mm2},
                    {"steps", steps}};
  json models = json::object();
  for (const auto& [k, m] : p.die_area_models) models[std::string(kind_name(k))] = to_json(m);
  j["die_area_models"] = models;
  if (p.compounds) j["compounds"] = registry_to_array(*p.compounds);
  json sources = json::object();
  for (const auto& info : kSourceTable) {
    const auto& cfg = p.source(info.id);
    json s = json::object();
    s[std::string(coefficient_key(info.family))] = cfg.params.k ? json(*cfg.params.k) : json(nullptr);
    if (family_has_alpha(info.family)) s["alpha"] = cfg.params.alpha ? json(*cfg.params.alpha) : json(nullptr);
    if (const auto* g = std::get_if<GwpValues>(&cfg.gwp))
      s["gwp"] = to_json(*g);
    else
      s["mix"] = to_json(std::get<CompoundMix>(cfg.gwp));
    if (cfg.release_multiplier != 1.0) s["release_multiplier"] = cfg.release_multiplier;
    sources[std::string(info.name)] = s;
  }
  j["sources"] = sources;
  return j;
}

// ---- breakdown & validation ---------------------------------------------------

inline json to_json(const SourceEmission& e) {
  return json{{"source", source_name(e.source)}, {"usage_g", e.usage_g}, {"wafers", e.wafers},
              {"release", e.release},            {"gwp", e.gwp},         {"gco2eq", e.gco2eq}};
}

inline json to_json(const EmissionBreakdown& b) {
  json sources = json::array();
  for (const auto& e : b.sources) sources.push_back(to_json(e));
  return json{{"profile", b.profile},
              {"horizon", horizon_name(b.horizon)},
              {"spec", to_json(b.spec)},
              {"die_area_mm2", b.die_area_mm2},
              {"wafer_area_mm2", b.wafer_area_mm2},
              {"node_ratio", b.node_ratio},
              {"sources", sources},
              {"total_gco2eq", b.total_gco2eq}};
}

inline EmissionBreakdown breakdown_from_json(const json& j, const std::string& path = "") {
  ObjectReader r(j, path);
  EmissionBreakdown b;
  b.profile = r.string("profile");
  b.horizon = parse_horizon(r.string("horizon"));
  b.spec = spec_from_json(r.raw("spec"), r.sub("spec"));
  b.die_area_mm2 = r.number("die_area_mm2");
  b.wafer_area_mm2 = r.number("wafer_area_mm2");
  b.node_ratio = r.number("node_ratio");
  const json& arr = r.raw("sources");
  if (!arr.is_array() || arr.size() != kSourceCount)
    throw Error(Errc::schema, "expected an array of twelve sources", r.sub("sources"));
  std::array<bool, kSourceCount> filled{};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader s(arr[i], r.sub("sources") + "[" + std::to_string(i) + "]");
    SourceEmission e;
    e.source = parse_source(s.string("source"));
    e.usage_g = s.number("usage_g");
    e.wafers = s.number("wafers");
    e.release = s.number("release");
    e.gwp = s.number("gwp");
    e.gco2eq = s.number("gco2eq");
    s.finish();
    if (filled[source_index(e.source)])
      throw Error(Errc::schema, "duplicate source '" + std::string(source_name(e.source)) + "'", s.path());
    filled[source_index(e.source)] = true;
    b.sources[source_index(e.source)] = e;
  }
  b.total_gco2eq = r.number("total_gco2eq");
  r.finish();
  return b;
}

/// Accepts a breakdown document or a flat {source: gCO2eq} object.
inline std::map<SourceId, double> measured_from_json(const json& j) {
  std::map<SourceId, double> out;
  if (j.is_object() && j.contains("sources") && j.at("sources").is_array()) {
    for (const auto& e : breakdown_from_json(j).sources) out[e.source] = e.gco2eq;
    return out;
  }
  ObjectReader r(j, "measured");
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto s = find_source(it.key());
    if (!s) throw Error(Errc::unknown_key, "unknown source '" + it.key() + "'", r.sub(it.key()));
    out[*s] = r.number(it.key());
  }
  r.finish();
  return out;
}

inline json to_json(const ValidationReport& v) {
  json per_source = json::object();
  for (const auto& e : v.entries)
    per_source[std::string(source_name(e.source))] = {
        {"model_gco2eq", e.model_gco2eq}, {"measured_gco2eq", e.measured_gco2eq}, {"diff", e.diff}};
  json skipped = json::array();
  for (SourceId s : v.skipped) skipped.push_back(source_name(s));
  return json{{"per_source", per_source},       {"skipped", skipped},
              {"model_total", v.model_total},   {"measured_total", v.measured_total},
              {"total_diff", v.total_diff},     {"max_abs_diff", v.max_abs_diff}};
}

}  // namespace fmn

#endif  // FMN_JSON_HPP
