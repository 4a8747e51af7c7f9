#ifndef FMN_SERVICE_HPP
#define FMN_SERVICE_HPP

#include <iomanip>
#include <memory>
#include <sstream>
#include <string>

#include <httplib.h>
#include <openssl/sha.h>

#include "fmn/workflows.hpp"

namespace fmn {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::ostringstream os;
  for (unsigned char c : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
  return os.str();
}

struct ServiceResponse {
  int status = 200;
  json envelope;
  std::string content_hash;  // of the data payload; empty on error
};

inline int http_status_for(const Error& e) {
  if (e.code() == Errc::not_found) return 404;
  if (is_schema_error(e.code()) || e.code() == Errc::usage) return 400;
  return 422;
}

namespace service_detail {

inline ServiceResponse ok(json data) {
  ServiceResponse r;
  r.content_hash = sha256_hex(data.dump());
  r.envelope = json{{"ok", true}, {"data", std::move(data)}};
  return r;
}

inline ServiceResponse fail(int status, std::string_view code, const std::string& message, const std::string& field) {
  ServiceResponse r;
  r.status = status;
  r.envelope = json{{"ok", false},
                    {"error", {{"code", code}, {"message", message}, {"detail", {{"field", field}}}}}};
  return r;
}

/// Inline object under `key`, or a preset named by `key`_ref.
inline json inline_or_ref(ObjectReader& r, const std::string& key) {
  const json* inl = r.raw_opt(key);
  auto ref = r.string_opt(key + "_ref");
  if (inl && ref) throw Error(Errc::schema, "give either " + key + " or " + key + "_ref", key);
  if (inl) return *inl;
  if (ref) return preset_json(*ref);
  throw Error(Errc::schema, "missing required key (or " + key + "_ref)", key);
}

inline HardwareSpec read_spec(ObjectReader& r) { return spec_from_json(inline_or_ref(r, "spec"), "spec"); }

inline FabProfile read_profile(ObjectReader& r) {
  try {
    return profile_from_json(inline_or_ref(r, "profile"));
  } catch (const Error& e) {
    if (e.code() == Errc::not_found) throw;
    throw e.within("profile");
  }
}

inline std::optional<GwpHorizon> read_horizon(ObjectReader& r) {
  if (auto s = r.string_opt("horizon")) {
    try {
      return parse_horizon(*s);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), "horizon");
    }
  }
  return std::nullopt;
}

inline json estimate(const json& body) {
  ObjectReader r(body, "");
  auto spec = read_spec(r);
  auto profile = read_profile(r);
  auto h = read_horizon(r);
  r.finish();
  return estimate_payload(spec, profile, h);
}

inline json scenario(const json& body) {
  ObjectReader r(body, "");
  auto spec = read_spec(r);
  auto profile = read_profile(r);
  auto h = read_horizon(r);
  std::vector<Lever> levers;
  if (r.has("levers") || r.has("levers_ref")) levers = levers_from_json(inline_or_ref(r, "levers"));
  r.finish();
  return scenario_payload(spec, profile, levers, h);
}

inline json sweep(const json& body) {
  ObjectReader r(body, "");
  auto spec = read_spec(r);
  auto profile = read_profile(r);
  auto h = read_horizon(r);
  auto axis = sweep_axis_from_json(r.raw("axis"), "axis");
  Normalization norm = Normalization::None;
  if (auto n = r.string_opt("normalization")) norm = parse_normalization(*n);
  r.finish();
  return sweep_payload(axis, spec, profile, h, norm);
}

inline json assemble(const json& body) {
  ObjectReader r(body, "");
  const Catalog catalog = catalog_from_json(inline_or_ref(r, "catalog"));
  AssembleRequest req;
  if (auto c = r.string_opt("class")) req.server_class = *c;
  if (const json* hs = r.raw_opt("horizons")) {
    if (!hs->is_array()) throw Error(Errc::schema, "expected an array of horizon names", "horizons");
    std::string joined;
    for (const auto& h : *hs) {
      if (!h.is_string()) throw Error(Errc::schema, "expected a horizon name", "horizons");
      joined += (joined.empty() ? "" : ",") + h.get<std::string>();
    }
    req.horizons = parse_horizon_list(joined);
  }
  req.pareto = r.boolean_opt("pareto", false);
  req.threads = detail::default_threads();
  r.finish();
  return to_json(fmn::assemble(catalog, req));
}

inline json preset_list() {
  json arr = json::array();
  for (const auto& p : presets())
    arr.push_back({{"name", p.name},
                   {"kind", preset_kind_name(p.kind)},
                   {"description", p.description},
                   {"content_hash", sha256_hex(p.content)}});
  return json{{"presets", arr}};
}

}  // namespace service_detail

/// Transport-free request handler: the HTTP server and tests both call this.
inline ServiceResponse handle_request(std::string_view method, std::string_view path, std::string_view body) {
  using namespace service_detail;
  using Handler = json (*)(const json&);
  static const std::map<std::string, Handler, std::less<>> posts{
      {"/v1/estimate", &service_detail::estimate},
      {"/v1/scenario", &service_detail::scenario},
      {"/v1/sweep", &service_detail::sweep},
      {"/v1/assemble", &service_detail::assemble},
  };
  try {
    if (path == "/v1/presets") {
      if (method != "GET") return fail(405, "method_not_allowed", "use GET", "");
      return ok(preset_list());
    }
    auto it = posts.find(path);
    if (it == posts.end()) return fail(404, "not_found", "no route " + std::string(path), "");
    if (method != "POST") return fail(405, "method_not_allowed", "use POST", "");
    json parsed;
    try {
      parsed = json::parse(body);
    } catch (const json::parse_error& e) {
      return fail(400, "schema", std::string("malformed JSON: ") + e.what(), "");
    }
    return ok(it->second(parsed));
  } catch (const Error& e) {
    return fail(http_status_for(e), errc_name(e.code()), e.what(), e.field());
  } catch (const std::exception& e) {
    return fail(500, "internal", e.what(), "");
  }
}

struct ServiceOptions {
  std::string bind = "127.0.0.1";
  int port = 8086;
  bool cors_dev = false;
};

/// Wires handle_request into an httplib server (not yet listening).
inline std::unique_ptr<httplib::Server> make_server(const ServiceOptions& opt) {
  auto server = std::make_unique<httplib::Server>();
  const bool cors = opt.cors_dev;
  auto dispatch = [cors](const httplib::Request& req, httplib::Response& res) {
    auto r = handle_request(req.method, req.path, req.body);
    res.status = r.status;
    if (!r.content_hash.empty()) {
      res.set_header("ETag", "\"" + r.content_hash + "\"");
      res.set_header("X-Content-Hash", "sha256:" + r.content_hash);
    }
    if (cors) res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.envelope.dump(), "application/json");
  };
  server->Get(R"(/v1/.*)", dispatch);
  server->Post(R"(/v1/.*)", dispatch);
  if (cors)
    server->Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  return server;
}

inline int serve(const ServiceOptions& opt, std::ostream& err) {
  auto server = make_server(opt);
  err << "listening on http://" << opt.bind << ":" << opt.port << "\n";
  if (!server->listen(opt.bind, opt.port)) {
    err << "error: cannot listen on " << opt.bind << ":" << opt.port << "\n";
    return 2;
  }
  return 0;
}

}  // namespace fmn

#endif  // FMN_SERVICE_HPP
