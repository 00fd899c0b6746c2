// strata: command-line front end.
//
// Exit codes: 0 ok, 1 usage, 2 bad input (parse, validation, layering,
// unknown id, bad config), 3 numerical failure, 4 server startup failure,
// 5 output file not writable.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "service.hpp"
#include "strata/strata.hpp"

namespace {

using namespace strata;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3, kStartup = 4, kOutput = 5 };

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StartupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw OutputError("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SyntaxError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_kinds(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string k; std::getline(ss, k, ',');) {
    if (!k.empty()) out.push_back(k);
  }
  return out;
}

// Options shared by the dataset-reading commands.
struct DatasetOptions {
  std::string path;
  std::vector<std::string> kinds;  // name:directed | name:undirected

  void add(CLI::App* cmd) {
    cmd->add_option("dataset", path, "Dataset document (JSON)")->required();
    cmd->add_option("--kind", kinds, "Register a relation kind, e.g. apprentice_of:directed");
  }

  GraphDataset load() const {
    KindRegistry registry;
    for (const auto& spec : kinds) {
      const auto colon = spec.find(':');
      const auto name = spec.substr(0, colon);
      const auto mode = colon == std::string::npos ? "directed" : spec.substr(colon + 1);
      if (name.empty() || (mode != "directed" && mode != "undirected")) {
        throw SpecError("--kind expects name:directed or name:undirected, got '" + spec + "'");
      }
      registry.add(name, mode == "directed");
    }
    return load_dataset(path, registry);
  }
};

struct HierarchyOptions {
  std::optional<std::string> generational, co_level;
  std::string policy = "reject";

  void add(CLI::App* cmd) {
    cmd->add_option("--hierarchy", generational, "Generational kinds, comma separated (default parent_of)");
    cmd->add_option("--colevel", co_level, "Co-level kinds, comma separated (default spouse_of)");
    cmd->add_option("--cycle-policy", policy, "reject | break")
        ->check(CLI::IsMember({"reject", "break"}));
  }

  HierarchySpec spec() const {
    auto list = [](const std::optional<std::string>& s) {
      return s ? std::optional(split_kinds(*s)) : std::nullopt;
    };
    return service::make_hierarchy(list(generational), list(co_level));
  }
  CyclePolicy cycle_policy() const { return policy == "break" ? CyclePolicy::break_back_edges : CyclePolicy::reject; }
};

struct LayoutOptions {
  std::string mode = "force-directed";
  std::uint64_t seed = 0;
  std::optional<std::string> config_path;

  void add(CLI::App* cmd, bool with_mode) {
    if (with_mode) {
      cmd->add_option("--mode", mode, "force-directed | force-layered")
          ->check(CLI::IsMember({"force-directed", "force-layered", "force_directed", "force_layered"}));
    }
    cmd->add_option("--seed", seed, "Simulation seed");
    cmd->add_option("--config", config_path, "JSON file of LayoutConfig overrides");
  }

  LayoutConfig config() const {
    LayoutConfig c;
    if (config_path) c = apply_config_overrides(c, read_file(*config_path));
    c.mode = *parse_layout_mode(mode);
    c.seed = seed;
    c.check();
    return c;
  }
};

std::string summary(const QualityReport& r, const Layout& layout) {
  std::ostringstream s;
  s << to_string(r.mode) << ": nodes=" << r.node_count << " edges=" << r.edge_count << " ticks=" << layout.ticks_run
    << " crossings=" << r.edge_crossings << " overlaps=" << r.node_overlaps << " stress=" << std::fixed
    << std::setprecision(6) << r.stress;
  if (r.layer_violation) s << " layer_violation=" << std::setprecision(3) << *r.layer_violation;
  s << " bridges=" << r.bridge_nodes.size();
  return s.str();
}

void report_broken(const GraphDataset& d, const LayerAssignment& a) {
  for (auto r : a.broken_relations) {
    const auto& rel = d.relations()[r];
    std::cerr << "warning: broke cycle at " << rel.source << " " << rel.kind << " " << rel.target << "\n";
  }
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: dataset failed validation\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.code << " " << v.entity << ": " << v.message << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOutput;
  } catch (const StartupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStartup;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strata: force-directed and force-layered layouts for genealogical networks"};
  app.require_subcommand(1);

  // layout
  auto* layout_cmd = app.add_subcommand("layout", "Lay out a dataset in one mode");
  DatasetOptions layout_data;
  HierarchyOptions layout_hier;
  LayoutOptions layout_opts;
  std::optional<std::string> svg_path, json_path, trace_path;
  std::string labels = "all";
  layout_data.add(layout_cmd);
  layout_hier.add(layout_cmd);
  layout_opts.add(layout_cmd, true);
  layout_cmd->add_option("--svg", svg_path, "Write an SVG rendering");
  layout_cmd->add_option("--json", json_path, "Write the layout document");
  layout_cmd->add_option("--trace", trace_path, "Write the per-tick trace");
  layout_cmd->add_option("--labels", labels, "all | hover | none")->check(CLI::IsMember({"all", "hover", "none"}));

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Run both modes with one seed and compare metrics");
  DatasetOptions compare_data;
  HierarchyOptions compare_hier;
  LayoutOptions compare_opts;
  std::optional<std::string> compare_json, compare_table;
  compare_data.add(compare_cmd);
  compare_hier.add(compare_cmd);
  compare_opts.add(compare_cmd, false);
  compare_cmd->add_option("--json", compare_json, "Write the two-mode layout document");
  compare_cmd->add_option("--table", compare_table, "Write the comparison table");

  // query
  auto* query_cmd = app.add_subcommand("query", "Exploration queries");
  DatasetOptions query_data;
  query_data.add(query_cmd);
  query_cmd->require_subcommand(1);
  auto* q_most = query_cmd->add_subcommand("most-connected", "Persons of maximum degree");
  auto* q_common = query_cmd->add_subcommand("common", "Persons related to both a and b");
  std::string common_a, common_b;
  q_common->add_option("a", common_a, "Person id")->required();
  q_common->add_option("b", common_b, "Person id")->required();
  auto* q_snapshot = query_cmd->add_subcommand("snapshot", "Persons alive in a year");
  int snapshot_year = 0;
  std::optional<std::string> snapshot_out;
  q_snapshot->add_option("year", snapshot_year, "Calendar year; missing life dates count as alive")->required();
  q_snapshot->add_option("--out", snapshot_out, "Write the sub-dataset document");

  // layers
  auto* layers_cmd = app.add_subcommand("layers", "Print the generational layer of every person");
  DatasetOptions layers_data;
  HierarchyOptions layers_hier;
  layers_data.add(layers_cmd);
  layers_hier.add(layers_cmd);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic genealogy");
  GeneratorSpec gen;
  std::optional<std::string> synth_out;
  synth_cmd->add_option("--families", gen.n_families, "Founder couples");
  synth_cmd->add_option("--generations", gen.generations, "Generations including founders");
  synth_cmd->add_option("--children-mean", gen.children_mean, "Mean children per couple");
  synth_cmd->add_option("--intermarriage", gen.intermarriage_rate, "Probability a child marries into another family");
  synth_cmd->add_option("--godparent", gen.godparent_rate, "Probability a child has a godparent");
  synth_cmd->add_option("--seed", gen.seed, "Generator seed");
  synth_cmd->add_option("--max-persons", gen.max_persons, "Size cap");
  synth_cmd->add_option("--out", synth_out, "Output path (default stdout)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API for one dataset");
  DatasetOptions serve_data;
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::string static_dir;
  serve_data.add(serve_cmd);
  serve_cmd->add_option("--port", port, "Port (default $STRATA_PORT, else 8088; 0 picks a free port)")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--static", static_dir, "Directory of viewer assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*layout_cmd) {
    return run_guarded([&] {
      const auto dataset = layout_data.load();
      const auto config = layout_opts.config();
      std::optional<LayerAssignment> layers;
      if (config.mode == LayoutMode::force_layered) {
        layers = assign_layers(dataset, layout_hier.spec(), layout_hier.cycle_policy());
        report_broken(dataset, *layers);
      }
      const auto* lp = layers ? &*layers : nullptr;
      RunOptions options;
      options.record_trace = trace_path.has_value();
      const auto t0 = std::chrono::steady_clock::now();
      const auto result = run(dataset, config, lp, options);
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
      const auto report = quality_report(result, dataset, lp, ms.count());

      StyleSpec style;
      style.label_visibility = labels == "all"    ? LabelVisibility::all
                               : labels == "none" ? LabelVisibility::none
                                                  : LabelVisibility::hover_only_metadata;
      if (svg_path) write_file(*svg_path, to_svg(result, dataset, style));
      if (json_path) write_file(*json_path, export_layout_json(dataset, {{&result, &report}}));
      if (trace_path) write_file(*trace_path, export_trace(result, dataset));
      std::cout << summary(report, result) << "\n";
      return kOk;
    });
  }

  if (*compare_cmd) {
    return run_guarded([&] {
      const auto dataset = compare_data.load();
      const auto config = compare_opts.config();
      const auto cmp = compare_report(dataset, config, config, compare_hier.spec(), compare_hier.cycle_policy());
      if (compare_json) {
        write_file(*compare_json, export_layout_json(dataset,
                                                     {{&cmp.force_directed, &cmp.directed_report},
                                                      {&cmp.force_layered, &cmp.layered_report}},
                                                     cmp.table));
      }
      if (compare_table) write_file(*compare_table, cmp.table);
      std::cout << cmp.table;
      return kOk;
    });
  }

  if (*query_cmd) {
    return run_guarded([&] {
      const auto dataset = query_data.load();
      std::vector<std::string> ids;
      if (*q_most) {
        ids = most_connected(dataset);
      } else if (*q_common) {
        ids = common_neighbors(dataset, common_a, common_b);
      } else {
        const auto snap = snapshot_at_year(dataset, snapshot_year);
        for (const auto& p : snap.dataset.persons()) ids.push_back(p.id);
        if (snapshot_out) write_file(*snapshot_out, serialize_dataset(snap.dataset));
        std::cerr << snap.dataset.size() << " of " << dataset.size() << " persons, " << snap.undated_included
                  << " kept for missing dates\n";
      }
      for (const auto& id : ids) std::cout << id << "\n";
      return kOk;
    });
  }

  if (*layers_cmd) {
    return run_guarded([&] {
      const auto dataset = layers_data.load();
      const auto layers = assign_layers(dataset, layers_hier.spec(), layers_hier.cycle_policy());
      report_broken(dataset, layers);
      std::size_t width = 2;
      for (const auto& p : dataset.persons()) width = std::max(width, p.id.size());
      std::cout << std::left << std::setw(static_cast<int>(width)) << "id" << "  layer\n";
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        std::cout << std::left << std::setw(static_cast<int>(width)) << dataset.persons()[i].id << "  "
                  << layers.layer_of[i] << "\n";
      }
      return kOk;
    });
  }

  if (*synth_cmd) {
    return run_guarded([&] {
      const auto text = serialize_dataset(synth_family(gen));
      if (synth_out) write_file(*synth_out, text);
      else std::cout << text;
      return kOk;
    });
  }

  if (*serve_cmd) {
    int chosen = 8088;
    if (const char* env = std::getenv("STRATA_PORT"); env && *env) {
      try {
        std::size_t used = 0;
        chosen = std::stoi(env, &used);
        if (used != std::strlen(env) || chosen < 0 || chosen > 65535) throw std::out_of_range(env);
      } catch (const std::exception&) {
        std::cerr << "error: STRATA_PORT must be a port number, got '" << env << "'\n";
        return kUsage;
      }
    }
    if (port) chosen = *port;
    return run_guarded([&] {
      const service::Service svc(serve_data.load());
      httplib::Server server;
      // httplib's default also sets SO_REUSEPORT, which would let two servers share a port.
      server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
      });
      if (!service::mount(server, svc, static_dir)) throw StartupError("cannot serve " + static_dir);
      const int bound = chosen == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, chosen) ? chosen : -1);
      if (bound < 0) throw StartupError("cannot bind " + host + ":" + std::to_string(chosen));
      std::cout << "listening on http://" << host << ":" << bound << std::endl;
      if (!server.listen_after_bind()) throw StartupError("server stopped unexpectedly");
      return kOk;
    });
  }
  return kUsage;
}
