#include "service.hpp"

#include <charconv>
#include <cmath>

#include "httplib.h"
#include "json.hpp"

namespace strata::service {

using json = nlohmann::json;

HierarchySpec make_hierarchy(const std::optional<std::vector<std::string>>& generational,
                             const std::optional<std::vector<std::string>>& co_level) {
  HierarchySpec spec;
  if (generational) spec.generational_kinds = {generational->begin(), generational->end()};
  if (co_level) spec.co_level_kinds = {co_level->begin(), co_level->end()};
  // Listing a kind explicitly moves it out of the default free set.
  for (const auto& k : spec.generational_kinds) spec.free_kinds.erase(k);
  for (const auto& k : spec.co_level_kinds) spec.free_kinds.erase(k);
  spec.check();
  return spec;
}

namespace {

Response json_response(int status, const json& body) { return {status, body.dump() + "\n"}; }

Response error_response(int status, std::string code, std::string message) {
  return json_response(status, json{{"code", std::move(code)}, {"message", std::move(message)}});
}

// Maps library failures onto the documented statuses.
Response from_exception() {
  try {
    throw;
  } catch (const UnknownNodeError& e) {
    return error_response(404, "UNKNOWN_NODE", e.what());
  } catch (const NumericalError& e) {
    return error_response(500, "NUMERICAL_ERROR", e.what());
  } catch (const SyntaxError& e) {
    return error_response(400, "SYNTAX_ERROR", e.what());
  } catch (const SchemaError& e) {
    return error_response(400, "SCHEMA_ERROR", e.what());
  } catch (const ConfigError& e) {
    return error_response(400, "CONFIG_ERROR", e.what());
  } catch (const SpecError& e) {
    return error_response(400, "SPEC_ERROR", e.what());
  } catch (const CycleError& e) {
    return error_response(400, "CYCLE_ERROR", e.what());
  } catch (const ValidationError& e) {
    return error_response(400, "VALIDATION_ERROR", e.what());
  } catch (const std::invalid_argument& e) {
    return error_response(400, "BAD_REQUEST", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "INTERNAL", e.what());
  }
}

struct BadRequest : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> string_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw BadRequest(what + " must be an array of kinds");
  std::vector<std::string> out;
  for (const auto& k : j) {
    if (!k.is_string()) throw BadRequest(what + " must be an array of kinds");
    out.push_back(k.get<std::string>());
  }
  return out;
}

std::string required_param(const Request& r, const std::string& name) {
  auto it = r.params.find(name);
  if (it == r.params.end() || it->second.empty()) throw BadRequest("missing query parameter '" + name + "'");
  return it->second;
}

template <typename Int>
Int parse_integer(const std::string& text, const std::string& name) {
  Int value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) throw BadRequest(name + " must be an integer");
  return value;
}

}  // namespace

Response Service::handle(const Request& request) const {
  try {
    const auto& p = request.path;
    const bool get = request.method == "GET";
    if (get && p == "/api/health") return json_response(200, json{{"status", "ok"}});
    if (get && p == "/api/dataset") return {200, serialize_dataset(dataset_)};
    if (request.method == "POST" && p == "/api/layout") return layout(request.body);
    if (get && p == "/api/query/most-connected") {
      const auto ids = most_connected(dataset_);
      const auto deg = degrees(dataset_);
      const std::size_t best = ids.empty() ? 0 : deg[dataset_.require_index(ids.front())];
      return json_response(200, json{{"ids", ids}, {"degree", best}});
    }
    if (get && p == "/api/query/common") return common(request);
    if (get && p == "/api/query/snapshot") return snapshot(request);
    if (get && p == "/api/report") return report(request);
    return error_response(404, "NOT_FOUND", request.method + " " + p + " is not an endpoint");
  } catch (...) {
    return from_exception();
  }
}

Response Service::layout(const std::string& body) const {
  json req;
  try {
    req = json::parse(body.empty() ? std::string("{}") : body);
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("request body: ") + e.what());
  }
  if (!req.is_object()) throw SchemaError("$", "request body must be an object");
  static const std::set<std::string> known{"mode", "seed", "pins", "trace", "hierarchy", "cycle_policy", "config"};
  for (const auto& [key, _] : req.items()) {
    if (!known.count(key)) throw SchemaError("$." + key, "unknown request field");
  }

  LayoutConfig config;
  if (req.contains("config")) config = apply_config_overrides(config, req["config"].dump());
  if (req.contains("mode")) {
    const auto mode = req["mode"].is_string() ? parse_layout_mode(req["mode"].get<std::string>()) : std::nullopt;
    if (!mode) throw SchemaError("$.mode", "expected force_directed or force_layered");
    config.mode = *mode;
  }
  if (req.contains("seed")) {
    if (!req["seed"].is_number_unsigned()) throw SchemaError("$.seed", "expected a non-negative integer");
    config.seed = req["seed"].get<std::uint64_t>();
  }
  config.check();

  std::optional<std::vector<std::string>> gen, co;
  if (req.contains("hierarchy")) {
    const auto& h = req["hierarchy"];
    if (!h.is_object()) throw SchemaError("$.hierarchy", "expected an object");
    for (const auto& [key, value] : h.items()) {
      if (key == "generational") gen = string_list(value, "hierarchy.generational");
      else if (key == "co_level") co = string_list(value, "hierarchy.co_level");
      else throw SchemaError("$.hierarchy." + key, "unknown hierarchy field");
    }
  }
  CyclePolicy policy = CyclePolicy::reject;
  if (req.contains("cycle_policy")) {
    const auto v = req["cycle_policy"];
    if (v == "break_back_edges") policy = CyclePolicy::break_back_edges;
    else if (v != "reject") throw SchemaError("$.cycle_policy", "expected reject or break_back_edges");
  }

  RunOptions options;
  if (req.contains("trace")) {
    if (!req["trace"].is_boolean()) throw SchemaError("$.trace", "expected a boolean");
    options.record_trace = req["trace"].get<bool>();
  }
  if (req.contains("pins")) {
    const auto& pins = req["pins"];
    if (!pins.is_array()) throw SchemaError("$.pins", "expected an array");
    for (std::size_t i = 0; i < pins.size(); ++i) {
      const auto& pin = pins[i];
      const auto path = "$.pins[" + std::to_string(i) + "]";
      if (!pin.is_object() || !pin.contains("id") || !pin["id"].is_string() || !pin.contains("x") ||
          !pin["x"].is_number() || !pin.contains("y") || !pin["y"].is_number() || pin.size() != 3) {
        throw SchemaError(path, "expected {id, x, y}");
      }
      options.pins.push_back({pin["id"].get<std::string>(), {pin["x"].get<double>(), pin["y"].get<double>()}});
    }
  }
  // Unknown pin ids are reported before any layering work.
  for (const auto& pin : options.pins) dataset_.require_index(pin.id);

  std::optional<LayerAssignment> layers;
  if (config.mode == LayoutMode::force_layered) layers = assign_layers(dataset_, make_hierarchy(gen, co), policy);
  const auto result = run(dataset_, config, layers ? &*layers : nullptr, options);

  auto doc = json::parse(export_layout_json(dataset_, {{&result, nullptr}}));
  if (result.trace) doc["trace"] = json::parse(export_trace(result, dataset_));
  return json_response(200, doc);
}

Response Service::common(const Request& request) const {
  const auto a = required_param(request, "a");
  const auto b = required_param(request, "b");
  return json_response(200, json{{"a", a}, {"b", b}, {"ids", common_neighbors(dataset_, a, b)}});
}

Response Service::snapshot(const Request& request) const {
  const int year = parse_integer<int>(required_param(request, "year"), "year");
  const auto snap = snapshot_at_year(dataset_, year);
  std::vector<std::string> ids;
  for (const auto& p : snap.dataset.persons()) ids.push_back(p.id);
  return json_response(200, json{{"year", year},
                                 {"ids", ids},
                                 {"undated_included", snap.undated_included},
                                 {"dataset", json::parse(serialize_dataset(snap.dataset))}});
}

Response Service::report(const Request& request) const {
  LayoutConfig fd, fl;
  if (request.params.count("seed")) fd.seed = parse_integer<std::uint64_t>(request.params.at("seed"), "seed");
  fl.seed = fd.seed;
  const auto cmp = compare_report(dataset_, fd, fl);
  return {200, export_layout_json(dataset_,
                                  {{&cmp.force_directed, &cmp.directed_report},
                                   {&cmp.force_layered, &cmp.layered_report}},
                                  cmp.table)};
}

bool mount(httplib::Server& server, const Service& service, const std::string& static_dir) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.params.emplace(k, v);
    const auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  const std::string api = R"(/api/.*)";
  server.Get(api, forward);
  server.Post(api, forward);
  server.Put(api, forward);
  server.Delete(api, forward);
  return static_dir.empty() || server.set_mount_point("/", static_dir);
}

}  // namespace strata::service
