#include "strata/render_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace strata {

using nlohmann::json;

const EdgeStyle& StyleSpec::style_for(const std::string& kind) const {
  auto it = edge_styles.find(kind);
  return it == edge_styles.end() ? fallback_edge : it->second;
}

std::string format_coord(double value) {
  if (!std::isfinite(value)) return "0.000";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 3);
  std::string out(buf, res.ptr);
  if (out == "-0.000") out = "0.000";
  return out;
}

double round_coord(double value) {
  const auto text = format_coord(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string person_summary(const Person& p) {
  std::string s = p.label.empty() ? p.id : p.label;
  if (p.birth_year || p.death_year) {
    s += " (" + (p.birth_year ? std::to_string(*p.birth_year) : std::string("?")) + "-" +
         (p.death_year ? std::to_string(*p.death_year) : std::string("?")) + ")";
  }
  for (const auto& [k, v] : p.attributes) s += "\n" + k + ": " + v;
  return s;
}

}  // namespace

std::string to_svg(const Layout& layout, const GraphDataset& dataset, const StyleSpec& style) {
  const double width = layout.config.canvas_width;
  const double height = layout.canvas_height();
  const auto& pos = layout.positions;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_coord(width)
      << "\" height=\"" << format_coord(height) << "\" viewBox=\"0 0 " << format_coord(width) << ' '
      << format_coord(height) << "\">\n";
  svg << "<title>" << xml_escape(dataset.meta().count("title") ? dataset.meta().at("title") : "network") << " ("
      << to_string(layout.mode) << ")</title>\n";
  svg << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << format_coord(width) << "\" height=\""
      << format_coord(height) << "\" fill=\"#ffffff\"/>\n";

  if (layout.mode == LayoutMode::force_layered && layout.layers) {
    svg << "<g class=\"bands\">\n";
    for (int layer = 0; layer < layout.layers->layer_count; ++layer) {
      const double top = band_center(layout.config, layer) - layout.config.band_height / 2.0;
      svg << "<rect class=\"band\" x=\"0\" y=\"" << format_coord(top) << "\" width=\"" << format_coord(width)
          << "\" height=\"" << format_coord(layout.config.band_height) << "\" fill=\""
          << (layer % 2 == 0 ? "#f4f4f4" : "#fbfbfb") << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"edges\" fill=\"none\">\n";
  for (const auto& e : dataset.edges()) {
    const auto& rel = dataset.relations()[e.relation];
    const auto& es = style.style_for(rel.kind);
    svg << "<line class=\"edge " << xml_escape(rel.kind) << "\" x1=\"" << format_coord(pos[e.source].x) << "\" y1=\""
        << format_coord(pos[e.source].y) << "\" x2=\"" << format_coord(pos[e.target].x) << "\" y2=\""
        << format_coord(pos[e.target].y) << "\" stroke=\"" << es.stroke << "\" stroke-width=\""
        << format_coord(es.width) << '"';
    if (!es.dasharray.empty()) svg << " stroke-dasharray=\"" << es.dasharray << '"';
    svg << "/>\n";
  }
  svg << "</g>\n";

  svg << "<g class=\"nodes\" fill=\"#3b6ea5\" stroke=\"#ffffff\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& p = dataset.persons()[i];
    svg << "<circle class=\"node\" data-id=\"" << xml_escape(p.id) << "\" cx=\"" << format_coord(pos[i].x)
        << "\" cy=\"" << format_coord(pos[i].y) << "\" r=\"" << format_coord(style.node_radius) << '"';
    if (style.label_visibility == LabelVisibility::hover_only_metadata) {
      svg << "><title>" << xml_escape(person_summary(p)) << "</title></circle>\n";
    } else {
      svg << "/>\n";
    }
  }
  svg << "</g>\n";

  if (style.label_visibility == LabelVisibility::all && !dataset.empty()) {
    svg << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"" << format_coord(style.font_size)
        << "\" fill=\"#222222\">\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto& p = dataset.persons()[i];
      svg << "<text x=\"" << format_coord(pos[i].x + style.node_radius + 2.0) << "\" y=\""
          << format_coord(pos[i].y + style.font_size / 3.0) << "\">" << xml_escape(p.label.empty() ? p.id : p.label)
          << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json positions_json(const std::vector<Vec2>& positions, const GraphDataset& dataset) {
  json out = json::array();
  for (std::size_t i = 0; i < positions.size() && i < dataset.size(); ++i) {
    out.push_back({{"id", dataset.persons()[i].id}, {"x", round_coord(positions[i].x)}, {"y", round_coord(positions[i].y)}});
  }
  return out;
}

json config_json(const LayoutConfig& c) {
  json lengths = json::object();
  for (const auto& [kind, len] : c.link_length) lengths[kind] = len;
  return {
      {"mode", std::string(to_string(c.mode))},
      {"seed", c.seed},
      {"canvas_width", c.canvas_width},
      {"canvas_height", c.canvas_height},
      {"band_height", c.band_height},
      {"margin", c.margin},
      {"default_link_length", c.default_link_length},
      {"link_length", lengths},
      {"repulsion_strength", c.repulsion_strength},
      {"collision_radius", c.collision_radius},
      {"theta", c.theta},
      {"alpha_start", c.alpha_start},
      {"alpha_min", c.alpha_min},
      {"alpha_decay", c.alpha_decay},
      {"damping", c.damping},
      {"band_stiffness_floor", c.band_stiffness_floor},
      {"tick_limit", c.tick_limit},
  };
}

double number_field(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected number");
  return v.get<double>();
}

LayoutConfig apply_config(LayoutConfig c, const json& obj, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected object");
  for (const auto& [key, v] : obj.items()) {
    const std::string p = path + "." + key;
    if (key == "mode") {
      if (!v.is_string()) throw SchemaError(p, "expected string");
      auto mode = parse_layout_mode(v.get<std::string>());
      if (!mode) throw SchemaError(p, "unknown layout mode");
      c.mode = *mode;
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw SchemaError(p, "expected non-negative integer");
      }
      c.seed = v.get<std::uint64_t>();
    } else if (key == "tick_limit") {
      if (!v.is_number_integer()) throw SchemaError(p, "expected integer");
      const auto t = v.get<std::int64_t>();
      if (t < 1 || t > 1'000'000) throw SchemaError(p, "out of range");
      c.tick_limit = static_cast<int>(t);
    } else if (key == "link_length") {
      if (!v.is_object()) throw SchemaError(p, "expected object of kind -> length");
      for (const auto& [kind, len] : v.items()) c.link_length[kind] = number_field(len, p + "." + kind);
    } else if (key == "canvas_width") c.canvas_width = number_field(v, p);
    else if (key == "canvas_height") c.canvas_height = number_field(v, p);
    else if (key == "band_height") c.band_height = number_field(v, p);
    else if (key == "margin") c.margin = number_field(v, p);
    else if (key == "default_link_length") c.default_link_length = number_field(v, p);
    else if (key == "repulsion_strength") c.repulsion_strength = number_field(v, p);
    else if (key == "collision_radius") c.collision_radius = number_field(v, p);
    else if (key == "theta") c.theta = number_field(v, p);
    else if (key == "alpha_start") c.alpha_start = number_field(v, p);
    else if (key == "alpha_min") c.alpha_min = number_field(v, p);
    else if (key == "alpha_decay") c.alpha_decay = number_field(v, p);
    else if (key == "damping") c.damping = number_field(v, p);
    else if (key == "band_stiffness_floor") c.band_stiffness_floor = number_field(v, p);
    else throw SchemaError(p, "unknown config field");
  }
  return c;
}

json report_json(const QualityReport& r) {
  json out = {
      {"node_count", r.node_count},
      {"edge_count", r.edge_count},
      {"edge_crossings", r.edge_crossings},
      {"node_overlaps", r.node_overlaps},
      {"stress", r.stress},
      {"bridge_nodes", r.bridge_nodes},
      {"mode", std::string(to_string(r.mode))},
      {"runtime_ms", r.runtime_ms},
  };
  if (r.layer_violation) out["layer_violation"] = *r.layer_violation;
  return out;
}

QualityReport report_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected object");
  QualityReport r;
  try {
    r.node_count = j.at("node_count").get<std::size_t>();
    r.edge_count = j.at("edge_count").get<std::size_t>();
    r.edge_crossings = j.at("edge_crossings").get<std::int64_t>();
    r.node_overlaps = j.at("node_overlaps").get<std::int64_t>();
    r.stress = j.at("stress").get<double>();
    r.bridge_nodes = j.at("bridge_nodes").get<std::vector<std::string>>();
    r.runtime_ms = j.value("runtime_ms", std::int64_t{0});
    if (j.contains("layer_violation")) r.layer_violation = j.at("layer_violation").get<double>();
    auto mode = parse_layout_mode(j.at("mode").get<std::string>());
    if (!mode) throw SchemaError(path + ".mode", "unknown layout mode");
    r.mode = *mode;
  } catch (const json::exception& e) {
    throw SchemaError(path, e.what());
  }
  return r;
}

}  // namespace

LayoutConfig apply_config_overrides(LayoutConfig base, std::string_view overrides_json) {
  json obj;
  try {
    obj = json::parse(overrides_json.begin(), overrides_json.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("malformed JSON: ") + e.what());
  }
  return apply_config(std::move(base), obj, "$");
}

std::string config_to_json(const LayoutConfig& config) { return config_json(config).dump(); }

std::string report_to_json(const QualityReport& report) { return report_json(report).dump(2) + "\n"; }

std::string export_layout_json(const GraphDataset& dataset, const std::vector<ModeExport>& modes,
                               const std::optional<std::string>& comparison_table) {
  json doc;
  doc["dataset"] = json::parse(serialize_dataset(dataset));
  doc["modes"] = json::object();
  for (const auto& m : modes) {
    if (!m.layout) continue;
    const Layout& layout = *m.layout;
    json entry = {
        {"positions", positions_json(layout.positions, dataset)},
        {"config", config_json(layout.config)},
        {"ticks_run", layout.ticks_run},
        {"final_alpha", layout.final_alpha},
        {"canvas", {{"width", layout.config.canvas_width}, {"height", layout.canvas_height()}}},
    };
    if (layout.layers) {
      json layers = json::object();
      for (std::size_t i = 0; i < dataset.size(); ++i) layers[dataset.persons()[i].id] = layout.layers->layer_of[i];
      entry["layers"] = layers;
      entry["layer_count"] = layout.layers->layer_count;
      if (!layout.layers->broken_relations.empty()) entry["broken_relations"] = layout.layers->broken_relations;
    }
    if (m.report) entry["report"] = report_json(*m.report);
    doc["modes"][std::string(to_string(layout.mode))] = std::move(entry);
  }
  if (doc["modes"].size() == 2) {
    json comparison = json::object();
    for (const auto& m : modes) {
      if (m.report) comparison[std::string(to_string(m.report->mode))] = report_json(*m.report);
    }
    if (comparison_table) comparison["table"] = *comparison_table;
    doc["comparison"] = std::move(comparison);
  }
  return doc.dump(2) + "\n";
}

ImportedLayouts import_layout_json(std::string_view text, const KindRegistry& registry) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dataset") || !doc.contains("modes")) {
    throw SchemaError("$", "expected object with 'dataset' and 'modes'");
  }
  ImportedLayouts out{parse_dataset(doc["dataset"].dump(), DocumentFormat::json, registry), {}, {}};
  const auto& modes = doc["modes"];
  if (!modes.is_object()) throw SchemaError("$.modes", "expected object");
  for (const auto& [name, entry] : modes.items()) {
    const std::string path = "$.modes." + name;
    auto mode = parse_layout_mode(name);
    if (!mode || !entry.is_object()) throw SchemaError(path, "unknown mode entry");
    Layout layout;
    layout.mode = *mode;
    layout.config = apply_config(LayoutConfig{}, entry.value("config", json::object()), path + ".config");
    try {
      layout.ticks_run = entry.at("ticks_run").get<int>();
      layout.final_alpha = entry.at("final_alpha").get<double>();
      const auto& positions = entry.at("positions");
      if (positions.size() != out.dataset.size()) throw SchemaError(path + ".positions", "expected one entry per person");
      for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i].at("id").get<std::string>() != out.dataset.persons()[i].id) {
          throw SchemaError(path + ".positions[" + std::to_string(i) + "]", "id out of canonical order");
        }
        layout.positions.push_back({positions[i].at("x").get<double>(), positions[i].at("y").get<double>()});
      }
      if (entry.contains("layers")) {
        LayerAssignment layers;
        for (const auto& p : out.dataset.persons()) layers.layer_of.push_back(entry.at("layers").at(p.id).get<int>());
        layers.layer_count = entry.at("layer_count").get<int>();
        layers.broken_relations = entry.value("broken_relations", std::vector<std::size_t>{});
        layout.layers = std::move(layers);
      }
    } catch (const json::exception& e) {
      throw SchemaError(path, e.what());
    }
    out.reports.push_back(entry.contains("report") ? std::optional(report_from_json(entry["report"], path + ".report"))
                                                   : std::nullopt);
    out.layouts.push_back(std::move(layout));
  }
  return out;
}

std::string export_trace(const Layout& layout, const GraphDataset& dataset) {
  if (!layout.trace) throw TraceMissingError();
  json ticks = json::array();
  for (const auto& frame : *layout.trace) {
    json entry = {{"tick", frame.tick}, {"alpha", frame.alpha}, {"positions", positions_json(frame.positions, dataset)}};
    if (frame.snap) entry["snap"] = true;
    ticks.push_back(std::move(entry));
  }
  return json{{"ticks", ticks}}.dump() + "\n";
}

}  // namespace strata
