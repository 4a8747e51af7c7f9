#ifndef FMN_CATALOG_HPP
#define FMN_CATALOG_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "fmn/detail/parallel.hpp"
#include "fmn/detail/text.hpp"
#include "fmn/engine.hpp"
#include "fmn/json.hpp"

namespace fmn {

using AttributeValue = std::variant<double, std::string>;

struct Component {
  std::string id;
  HardwareKind kind = HardwareKind::CPU;
  std::string vendor;
  int generation = 0;
  HardwareSpec spec;
  std::string fab_profile;
  double embodied_carbon_gco2eq = 0.0;
  double performance_score = 0.0;
  std::map<std::string, AttributeValue> attributes;
};

/// Looks a field up on a component: "generation", a spec feature, "node_nm",
/// "tdp_w", "vendor", "lithography", or a free-form attribute.
inline std::optional<AttributeValue> component_field(const Component& c, std::string_view field) {
  if (field == "generation") return static_cast<double>(c.generation);
  if (field == "vendor") return c.vendor;
  if (field == "node_nm") return c.spec.node_nm;
  if (field == "tdp_w") return c.spec.tdp_w;
  if (field == "lithography") return std::string(lithography_name(c.spec.lithography));
  if (field == "performance_score") return c.performance_score;
  if (auto it = c.spec.features.find(std::string(field)); it != c.spec.features.end()) return it->second;
  if (auto it = c.attributes.find(std::string(field)); it != c.attributes.end()) return it->second;
  return std::nullopt;
}

enum class CompareOp { Gt, Ge, Lt, Le, Eq, In };

/// One attribute/range test on one of the three chosen components.
struct Constraint {
  HardwareKind component = HardwareKind::CPU;
  std::string field;
  CompareOp op = CompareOp::Eq;
  std::vector<AttributeValue> values;  // one value, or the set for In

  /// Missing fields and type mismatches fail the test rather than erroring.
  bool test(const Component& c) const {
    auto v = component_field(c, field);
    if (!v) return false;
    auto same = [&](const AttributeValue& x) { return x == *v; };
    switch (op) {
      case CompareOp::Eq: return same(values.front());
      case CompareOp::In: return std::any_of(values.begin(), values.end(), same);
      default: break;
    }
    const auto* num = std::get_if<double>(&*v);
    const auto* bound = std::get_if<double>(&values.front());
    if (!num || !bound) return false;
    switch (op) {
      case CompareOp::Gt: return *num > *bound;
      case CompareOp::Ge: return *num >= *bound;
      case CompareOp::Lt: return *num < *bound;
      case CompareOp::Le: return *num <= *bound;
      default: return false;
    }
  }
};

struct ServerClass {
  std::string name;
  std::vector<Constraint> constraints;  // conjunction

  bool accepts(const Component& cpu, const Component& dram, const Component& storage) const {
    for (const auto& c : constraints) {
      const Component& target =
          c.component == HardwareKind::CPU ? cpu : c.component == HardwareKind::DRAM ? dram : storage;
      if (!c.test(target)) return false;
    }
    return true;
  }
};

inline ServerClass general_purpose() { return {"GeneralPurpose", {}}; }

inline ServerClass compute_optimized() {
  return {"ComputeOptimized",
          {{HardwareKind::CPU, "cores", CompareOp::Gt, {24.0}},
           {HardwareKind::CPU, "generation", CompareOp::In, {4.0, 5.0}}}};
}

inline ServerClass memory_optimized() {
  return {"MemoryOptimized",
          {{HardwareKind::CPU, "cores", CompareOp::Ge, {20.0}},
           {HardwareKind::CPU, "cores", CompareOp::Le, {32.0}},
           {HardwareKind::DRAM, "memory_standard", CompareOp::Eq, {std::string("DDR5")}},
           {HardwareKind::DRAM, "memory_gb", CompareOp::Gt, {32.0}}}};
}

inline ServerClass storage_optimized() {
  return {"StorageOptimized",
          {{HardwareKind::CPU, "cores", CompareOp::Ge, {20.0}},
           {HardwareKind::CPU, "cores", CompareOp::Le, {32.0}},
           {HardwareKind::Storage, "storage_interface", CompareOp::Eq, {std::string("NVMe")}}}};
}

inline std::optional<ServerClass> builtin_server_class(std::string_view name) {
  if (name == "GeneralPurpose") return general_purpose();
  if (name == "ComputeOptimized") return compute_optimized();
  if (name == "MemoryOptimized") return memory_optimized();
  if (name == "StorageOptimized") return storage_optimized();
  return std::nullopt;
}

struct Catalog {
  std::vector<Component> components;
  std::map<std::string, FabProfile> profiles;  // inline profiles, by name
  std::map<std::string, ServerClass> classes;  // custom classes, by name

  ServerClass server_class(std::string_view name) const {
    if (auto it = classes.find(std::string(name)); it != classes.end()) return it->second;
    if (auto c = builtin_server_class(name)) return *c;
    throw Error(Errc::not_found, "unknown server class '" + std::string(name) + "'", "class");
  }
};

/// Resolves a fab-profile name not defined inline in the catalog.
using ProfileResolver = std::function<const FabProfile*(std::string_view)>;

struct AssemblyKey {
  std::string cpu, dram, storage;
  friend auto operator<=>(const AssemblyKey&, const AssemblyKey&) = default;
};

struct Assembly {
  AssemblyKey key;
  std::array<double, 3> embodied_gco2eq{};     // cpu, dram, storage
  std::array<double, 3> fluorinated_gco2eq{};
  std::array<double, 3> performance_scores{};
  double total_gco2eq = 0.0;
  double performance = 0.0;  // the CPU's throughput score

  double embodied_total() const { return embodied_gco2eq[0] + embodied_gco2eq[1] + embodied_gco2eq[2]; }
  double fluorinated_total() const { return fluorinated_gco2eq[0] + fluorinated_gco2eq[1] + fluorinated_gco2eq[2]; }

  friend bool operator==(const Assembly&, const Assembly&) = default;
};

/// Ascending total, ties broken by (cpu, dram, storage) ids.
inline bool ranks_before(const Assembly& a, const Assembly& b) {
  if (a.total_gco2eq != b.total_gco2eq) return a.total_gco2eq < b.total_gco2eq;
  return a.key < b.key;
}

struct EnumerateOptions {
  unsigned threads = 1;
};

/// Fluorinated gCO2eq for every component at `h`, in catalog order.
inline std::vector<double> component_fluorinated(const Catalog& catalog, GwpHorizon h, const ProfileResolver& resolver,
                                                 unsigned threads = 1) {
  std::vector<double> out(catalog.components.size());
  detail::parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto& c = catalog.components[i];
    const FabProfile* profile = nullptr;
    if (auto it = catalog.profiles.find(c.fab_profile); it != catalog.profiles.end())
      profile = &it->second;
    else if (resolver)
      profile = resolver(c.fab_profile);
    const std::string where = "components[" + c.id + "]";
    if (!profile) throw Error(Errc::not_found, "unknown fab profile '" + c.fab_profile + "'", where + ".fab_profile");
    try {
      out[i] = total_emission(c.spec, *profile, h).total_gco2eq;
    } catch (const Error& e) {
      throw e.within(where);
    }
  });
  return out;
}

/// Every class-feasible (cpu, dram, storage) triple, ordered by ids.
inline std::vector<Assembly> enumerate_assemblies(const Catalog& catalog, const ServerClass& cls, GwpHorizon h,
                                                  const ProfileResolver& resolver, EnumerateOptions opt = {}) {
  std::array<std::vector<std::size_t>, 3> by_kind;
  for (std::size_t i = 0; i < catalog.components.size(); ++i)
    by_kind[static_cast<std::size_t>(catalog.components[i].kind)].push_back(i);
  for (auto& v : by_kind) {
    if (v.empty()) throw Error(Errc::empty_input, "catalog needs at least one cpu, dram and storage component", "components");
    std::sort(v.begin(), v.end(),
              [&](std::size_t a, std::size_t b) { return catalog.components[a].id < catalog.components[b].id; });
  }
  const auto fluorinated = component_fluorinated(catalog, h, resolver, opt.threads);

  std::vector<Assembly> out;
  for (std::size_t ci : by_kind[0])
    for (std::size_t di : by_kind[1])
      for (std::size_t si : by_kind[2]) {
        const auto& cpu = catalog.components[ci];
        const auto& dram = catalog.components[di];
        const auto& sto = catalog.components[si];
        if (!cls.accepts(cpu, dram, sto)) continue;
        Assembly a;
        a.key = {cpu.id, dram.id, sto.id};
        a.embodied_gco2eq = {cpu.embodied_carbon_gco2eq, dram.embodied_carbon_gco2eq, sto.embodied_carbon_gco2eq};
        a.fluorinated_gco2eq = {fluorinated[ci], fluorinated[di], fluorinated[si]};
        a.performance_scores = {cpu.performance_score, dram.performance_score, sto.performance_score};
        a.performance = cpu.performance_score;
        a.total_gco2eq = a.embodied_total() + a.fluorinated_total();
        out.push_back(std::move(a));
      }
  return out;
}

struct RankingReport {
  std::vector<Assembly> ranking;  // ascending total
  std::size_t median_index = 0;   // lower median

  const Assembly& lowest() const { return ranking.front(); }
  const Assembly& median() const { return ranking[median_index]; }
  const Assembly& highest() const { return ranking.back(); }
};

inline RankingReport rank_assemblies(std::vector<Assembly> assemblies) {
  if (assemblies.empty()) throw Error(Errc::empty_input, "no assemblies to rank");
  std::sort(assemblies.begin(), assemblies.end(), ranks_before);
  RankingReport r;
  r.median_index = (assemblies.size() - 1) / 2;
  r.ranking = std::move(assemblies);
  return r;
}

/// Assemblies no other assembly beats on both performance (higher) and
/// total emissions (lower). Sorted like a ranking.
inline std::vector<Assembly> pareto_front(const std::vector<Assembly>& assemblies) {
  if (assemblies.empty()) throw Error(Errc::empty_input, "no assemblies");
  std::vector<const Assembly*> order;
  for (const auto& a : assemblies) order.push_back(&a);
  std::sort(order.begin(), order.end(), [](const Assembly* a, const Assembly* b) {
    if (a->performance != b->performance) return a->performance > b->performance;
    return a->total_gco2eq < b->total_gco2eq;
  });
  std::vector<Assembly> front;
  double best_higher = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && order[j]->performance == order[i]->performance) ++j;
    const double group_min = order[i]->total_gco2eq;
    for (std::size_t k = i; k < j; ++k)
      if (order[k]->total_gco2eq == group_min && group_min < best_higher) front.push_back(*order[k]);
    best_higher = std::min(best_higher, group_min);
    i = j;
  }
  std::sort(front.begin(), front.end(), ranks_before);
  return front;
}

struct HorizonWinner {
  GwpHorizon horizon;
  AssemblyKey winner;
  std::map<GwpHorizon, std::size_t> rank_under;  // 1-based
};

struct RankStabilityReport {
  std::vector<GwpHorizon> horizons;
  std::map<GwpHorizon, std::vector<AssemblyKey>> order;  // ascending total per horizon
  std::map<AssemblyKey, std::map<GwpHorizon, std::size_t>> ranks;
  std::vector<HorizonWinner> winners;

  bool identical() const {
    for (const auto& [h, o] : order)
      if (o != order.begin()->second) return false;
    return true;
  }
};

/// Re-ranks the feasible assemblies under each horizon; embodied parts are
/// horizon-independent.
inline RankStabilityReport rank_stability(const Catalog& catalog, const ServerClass& cls,
                                          const std::vector<GwpHorizon>& horizons, const ProfileResolver& resolver,
                                          EnumerateOptions opt = {}) {
  if (horizons.empty()) throw Error(Errc::empty_input, "no horizons requested", "horizons");
  RankStabilityReport r;
  r.horizons = horizons;
  for (GwpHorizon h : horizons) {
    auto ranked = rank_assemblies(enumerate_assemblies(catalog, cls, h, resolver, opt));
    auto& o = r.order[h];
    for (std::size_t i = 0; i < ranked.ranking.size(); ++i) {
      o.push_back(ranked.ranking[i].key);
      r.ranks[ranked.ranking[i].key][h] = i + 1;
    }
  }
  for (GwpHorizon h : horizons) {
    HorizonWinner w{h, r.order[h].front(), {}};
    for (GwpHorizon other : horizons) w.rank_under[other] = r.ranks[w.winner][other];
    r.winners.push_back(std::move(w));
  }
  return r;
}

// ---- JSON -------------------------------------------------------------------

inline AttributeValue attribute_from_json(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw Error(Errc::schema, "expected a string or number", path);
}

inline json to_json(const AttributeValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

inline CompareOp parse_compare_op(std::string_view s, const std::string& path) {
  if (s == "gt") return CompareOp::Gt;
  if (s == "ge") return CompareOp::Ge;
  if (s == "lt") return CompareOp::Lt;
  if (s == "le") return CompareOp::Le;
  if (s == "eq") return CompareOp::Eq;
  if (s == "in") return CompareOp::In;
  throw Error(Errc::schema, "unknown operator '" + std::string(s) + "' (expected gt|ge|lt|le|eq|in)", path);
}

inline std::string_view compare_op_name(CompareOp op) {
  switch (op) {
    case CompareOp::Gt: return "gt";
    case CompareOp::Ge: return "ge";
    case CompareOp::Lt: return "lt";
    case CompareOp::Le: return "le";
    case CompareOp::Eq: return "eq";
    case CompareOp::In: return "in";
  }
  return "eq";
}

/// {"constraints": [{"component": "cpu", "field": "cores", "op": "gt", "value": 24}, ...]}
inline ServerClass server_class_from_json(const std::string& name, const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ServerClass cls{name, {}};
  const json& arr = r.raw("constraints");
  if (!arr.is_array()) throw Error(Errc::schema, "expected an array", r.sub("constraints"));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader c(arr[i], r.sub("constraints") + "[" + std::to_string(i) + "]");
    Constraint con;
    con.component = parse_kind(c.string("component"));
    con.field = c.string("field");
    con.op = parse_compare_op(c.string("op"), c.sub("op"));
    if (con.op == CompareOp::In) {
      const json& vals = c.raw("values");
      if (!vals.is_array() || vals.empty()) throw Error(Errc::schema, "expected a non-empty array", c.sub("values"));
      for (const auto& v : vals) con.values.push_back(attribute_from_json(v, c.sub("values")));
    } else {
      con.values.push_back(attribute_from_json(c.raw("value"), c.sub("value")));
    }
    c.finish();
    cls.constraints.push_back(std::move(con));
  }
  r.finish();
  return cls;
}

inline json to_json(const ServerClass& cls) {
  json arr = json::array();
  for (const auto& c : cls.constraints) {
    json j{{"component", kind_name(c.component)}, {"field", c.field}, {"op", compare_op_name(c.op)}};
    if (c.op == CompareOp::In) {
      json vals = json::array();
      for (const auto& v : c.values) vals.push_back(to_json(v));
      j["values"] = vals;
    } else {
      j["value"] = to_json(c.values.front());
    }
    arr.push_back(j);
  }
  return json{{"constraints", arr}};
}

inline Component component_from_json(const json& j, std::size_t index) {
  std::string where = "components[" + std::to_string(index) + "]";
  if (j.is_object() && j.contains("id") && j.at("id").is_string()) where = "components[" + j.at("id").get<std::string>() + "]";
  try {
    ObjectReader r(j, "");
    Component c;
    c.id = r.string("id");
    c.kind = parse_kind(r.string("kind"));
    c.vendor = r.string_opt("vendor").value_or("");
    c.generation = static_cast<int>(r.number_opt("generation").value_or(0.0));
    c.spec = spec_from_json(r.raw("spec"), "spec");
    c.fab_profile = r.string("fab_profile");
    c.embodied_carbon_gco2eq = r.number("embodied_carbon_gco2eq");
    c.performance_score = r.number("performance_score");
    if (const json* a = r.raw_opt("attributes")) {
      ObjectReader ar(*a, "attributes");
      for (auto it = a->begin(); it != a->end(); ++it)
        c.attributes[it.key()] = attribute_from_json(ar.raw(it.key()), ar.sub(it.key()));
      ar.finish();
    }
    r.finish();

    if (c.spec.kind != c.kind) throw Error(Errc::schema, "spec.kind does not match component kind", "spec.kind");
    if (!(c.embodied_carbon_gco2eq >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "embodied_carbon_gco2eq");
    if (!(c.performance_score >= 0.0)) throw Error(Errc::invalid_argument, "must be >= 0", "performance_score");
    validate(c.spec);
    auto need_feature = [&](const char* f) {
      if (!c.spec.features.contains(f)) throw Error(Errc::schema, "missing required feature", std::string("spec.features.") + f);
    };
    auto need_attr = [&](const char* a) {
      if (!c.attributes.contains(a)) throw Error(Errc::schema, "missing required attribute", std::string("attributes.") + a);
    };
    switch (c.kind) {
      case HardwareKind::CPU:
        need_feature("cores");
        if (!r.has("generation")) throw Error(Errc::schema, "missing required field", "generation");
        break;
      case HardwareKind::DRAM:
        need_feature("memory_gb");
        need_attr("memory_standard");
        break;
      case HardwareKind::Storage:
        need_feature("capacity_tb");
        need_attr("storage_interface");
        break;
    }
    return c;
  } catch (const Error& e) {
    throw e.within(where);
  }
}

inline json to_json(const Component& c) {
  json attrs = json::object();
  for (const auto& [k, v] : c.attributes) attrs[k] = to_json(v);
  return json{{"id", c.id},
              {"kind", kind_name(c.kind)},
              {"vendor", c.vendor},
              {"generation", c.generation},
              {"spec", to_json(c.spec)},
              {"fab_profile", c.fab_profile},
              {"embodied_carbon_gco2eq", c.embodied_carbon_gco2eq},
              {"performance_score", c.performance_score},
              {"attributes", attrs}};
}

inline Catalog catalog_from_json(const json& j) {
  ObjectReader r(j, "");
  Catalog cat;
  if (const json* p = r.raw_opt("profiles")) {
    ObjectReader pr(*p, "profiles");
    for (auto it = p->begin(); it != p->end(); ++it) {
      try {
        auto profile = profile_from_json(pr.raw(it.key()));
        cat.profiles.emplace(it.key(), std::move(profile));
      } catch (const Error& e) {
        throw e.within(pr.sub(it.key()));
      }
    }
    pr.finish();
  }
  if (const json* c = r.raw_opt("classes")) {
    ObjectReader cr(*c, "classes");
    for (auto it = c->begin(); it != c->end(); ++it)
      cat.classes.emplace(it.key(), server_class_from_json(it.key(), cr.raw(it.key()), cr.sub(it.key())));
    cr.finish();
  }
  const json& arr = r.raw("components");
  if (!arr.is_array()) throw Error(Errc::schema, "expected an array", "components");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto comp = component_from_json(arr[i], i);
    if (!ids.insert(comp.id).second) throw Error(Errc::schema, "duplicate component id", "components[" + comp.id + "].id");
    cat.components.push_back(std::move(comp));
  }
  r.finish();
  return cat;
}

inline json to_json(const Catalog& cat) {
  json j;
  if (!cat.profiles.empty()) {
    json p = json::object();
    for (const auto& [name, profile] : cat.profiles) p[name] = to_json(profile);
    j["profiles"] = p;
  }
  if (!cat.classes.empty()) {
    json c = json::object();
    for (const auto& [name, cls] : cat.classes) c[name] = to_json(cls);
    j["classes"] = c;
  }
  json comps = json::array();
  for (const auto& c : cat.components) comps.push_back(to_json(c));
  j["components"] = comps;
  return j;
}

inline json to_json(const Assembly& a, std::size_t rank) {
  auto triple = [](const std::array<double, 3>& v) {
    return json{{"cpu", v[0]}, {"dram", v[1]}, {"storage", v[2]}};
  };
  return json{{"rank", rank},
              {"cpu", a.key.cpu},
              {"dram", a.key.dram},
              {"storage", a.key.storage},
              {"embodied_gco2eq", triple(a.embodied_gco2eq)},
              {"fluorinated_gco2eq", triple(a.fluorinated_gco2eq)},
              {"performance_scores", triple(a.performance_scores)},
              {"embodied_g", a.embodied_total()},
              {"fluorinated_g", a.fluorinated_total()},
              {"total_gco2eq", a.total_gco2eq},
              {"performance", a.performance}};
}

inline json to_json(const RankingReport& r) {
  json ranking = json::array();
  for (std::size_t i = 0; i < r.ranking.size(); ++i) ranking.push_back(to_json(r.ranking[i], i + 1));
  return json{{"count", r.ranking.size()},
              {"lowest", to_json(r.lowest(), 1)},
              {"median", to_json(r.median(), r.median_index + 1)},
              {"highest", to_json(r.highest(), r.ranking.size())},
              {"ranking", ranking}};
}

inline json assemblies_to_json(const std::vector<Assembly>& v) {
  json arr = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) arr.push_back(to_json(v[i], i + 1));
  return arr;
}

inline json key_to_json(const AssemblyKey& k) { return json{{"cpu", k.cpu}, {"dram", k.dram}, {"storage", k.storage}}; }

inline json to_json(const RankStabilityReport& r) {
  json horizons = json::array();
  for (GwpHorizon h : r.horizons) horizons.push_back(horizon_name(h));
  json order = json::object();
  for (const auto& [h, keys] : r.order) {
    json arr = json::array();
    for (const auto& k : keys) arr.push_back(key_to_json(k));
    order[std::string(horizon_name(h))] = arr;
  }
  json winners = json::array();
  for (const auto& w : r.winners) {
    json under = json::object();
    for (const auto& [h, rank] : w.rank_under) under[std::string(horizon_name(h))] = rank;
    winners.push_back({{"horizon", horizon_name(w.horizon)}, {"winner", key_to_json(w.winner)}, {"rank_under", under}});
  }
  return json{{"horizons", horizons}, {"order", order}, {"winners", winners}, {"identical", r.identical()}};
}

}  // namespace fmn

#endif  // FMN_CATALOG_HPP
