#include "strata/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "strata/prng.hpp"

namespace strata {

using nlohmann::json;

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
        std::string msg = "dataset invalid:";
        for (const auto& v : violations) msg += " [" + v.code + " " + v.entity + "]";
        return msg;
      }()),
      violations_(std::move(violations)) {}

CycleError::CycleError(std::vector<std::string> cycle)
    : Error([&] {
        std::string msg = "generational cycle:";
        for (const auto& id : cycle) msg += " " + id;
        return msg;
      }()),
      cycle_(std::move(cycle)) {}

NumericalError::NumericalError(int tick, std::string node_id)
    : Error("non-finite coordinate at tick " + std::to_string(tick) + " for node '" + node_id + "'"),
      tick_(tick),
      node_id_(std::move(node_id)) {}

// ---------------------------------------------------------------------------
// KindRegistry

KindRegistry::KindRegistry() {
  kinds_.emplace(std::string(kParentOf), true);
  kinds_.emplace(std::string(kSpouseOf), false);
  kinds_.emplace(std::string(kGodparentOf), true);
}

void KindRegistry::add(std::string kind, bool directed) {
  if (kind.empty()) throw SpecError("relation kind must be non-empty");
  auto it = kinds_.find(kind);
  if (it != kinds_.end()) {
    if (it->second != directed) throw SpecError("relation kind '" + kind + "' already registered with other directedness");
    return;
  }
  kinds_.emplace(std::move(kind), directed);
}

bool KindRegistry::contains(std::string_view kind) const { return kinds_.find(kind) != kinds_.end(); }

bool KindRegistry::directed(std::string_view kind) const {
  auto it = kinds_.find(kind);
  return it == kinds_.end() || it->second;
}

std::vector<std::string> KindRegistry::kinds() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : kinds_) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// GraphDataset

GraphDataset::GraphDataset(std::vector<Person> persons, std::vector<Relation> relations,
                           std::map<std::string, std::string> meta, KindRegistry registry)
    : persons_(std::move(persons)),
      relations_(std::move(relations)),
      meta_(std::move(meta)),
      registry_(std::move(registry)) {
  for (std::size_t i = 0; i < persons_.size(); ++i) index_.emplace(persons_[i].id, i);
  adjacency_.resize(persons_.size());
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    auto& rel = relations_[r];
    rel.directed = registry_.directed(rel.kind);
    auto s = index_of(rel.source);
    auto t = index_of(rel.target);
    if (!s || !t) continue;
    edges_.push_back({*s, *t, r});
    adjacency_[*s].push_back(*t);
    if (*s != *t) adjacency_[*t].push_back(*s);
  }
}

std::optional<std::size_t> GraphDataset::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t GraphDataset::require_index(std::string_view id) const {
  auto idx = index_of(id);
  if (!idx) throw UnknownNodeError(std::string(id));
  return *idx;
}

// ---------------------------------------------------------------------------
// validate

namespace {

std::string triple(const Relation& r) { return r.source + " " + r.kind + " " + r.target; }

}  // namespace

std::vector<Violation> validate(const GraphDataset& dataset) {
  std::vector<Violation> out;
  std::set<std::string> seen_ids;
  for (const auto& p : dataset.persons()) {
    if (p.id.empty()) {
      out.push_back({"EMPTY_ID", "", "person with empty id (label '" + p.label + "')"});
    } else if (!seen_ids.insert(p.id).second) {
      out.push_back({"DUPLICATE_ID", p.id, "person id '" + p.id + "' appears more than once"});
    }
    if (p.birth_year && p.death_year && *p.birth_year > *p.death_year) {
      out.push_back({"TEMPORAL_ORDER", p.id,
                     "birth year " + std::to_string(*p.birth_year) + " after death year " +
                         std::to_string(*p.death_year)});
    }
  }

  std::set<std::tuple<std::string, std::string, std::string>> seen_relations;
  for (const auto& r : dataset.relations()) {
    if (!dataset.registry().contains(r.kind)) {
      out.push_back({"UNKNOWN_KIND", triple(r), "relation kind '" + r.kind + "' is not registered"});
    }
    if (r.source == r.target) {
      out.push_back({"SELF_LOOP", triple(r), "relation joins '" + r.source + "' to itself"});
    }
    for (const auto* end : {&r.source, &r.target}) {
      if (!dataset.index_of(*end)) {
        out.push_back({"UNKNOWN_ENDPOINT", *end, "relation " + triple(r) + " references unknown person '" + *end + "'"});
      }
    }
    auto key = std::make_tuple(r.source, r.target, r.kind);
    if (!r.directed && std::get<1>(key) < std::get<0>(key)) std::swap(std::get<0>(key), std::get<1>(key));
    if (!seen_relations.insert(key).second) {
      out.push_back({"DUPLICATE_RELATION", triple(r), "relation " + triple(r) + " appears more than once"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// parse / serialize

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected string");
  return v.get<std::string>();
}

std::optional<int> as_year(const json& v, const std::string& path) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer()) throw SchemaError(path, "expected integer year");
  auto y = v.get<std::int64_t>();
  if (y < -1'000'000 || y > 1'000'000) throw SchemaError(path, "year out of range");
  return static_cast<int>(y);
}

std::map<std::string, std::string> as_string_map(const json& v, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected object");
  std::map<std::string, std::string> out;
  for (const auto& [k, val] : v.items()) out.emplace(k, as_string(val, path + "." + k));
  return out;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
  for (const auto& [k, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw SchemaError(path + "." + k, "unknown field");
    }
  }
}

}  // namespace

GraphDataset parse_dataset(std::string_view text, DocumentFormat format, const KindRegistry& registry) {
  if (format != DocumentFormat::json) throw SchemaError("$", "unsupported document format");
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected top-level object");
  reject_unknown_keys(doc, {"meta", "persons", "relations"}, "$");

  std::map<std::string, std::string> meta;
  if (auto it = doc.find("meta"); it != doc.end()) meta = as_string_map(*it, "$.meta");

  const json& persons_doc = require(doc, "persons", "$");
  if (!persons_doc.is_array()) throw SchemaError("$.persons", "expected array");
  std::vector<Person> persons;
  persons.reserve(persons_doc.size());
  for (std::size_t i = 0; i < persons_doc.size(); ++i) {
    const std::string path = "$.persons[" + std::to_string(i) + "]";
    const json& p = persons_doc[i];
    if (!p.is_object()) throw SchemaError(path, "expected object");
    reject_unknown_keys(p, {"id", "label", "birth_year", "death_year", "attributes"}, path);
    Person person;
    person.id = as_string(require(p, "id", path), path + ".id");
    person.label = as_string(require(p, "label", path), path + ".label");
    if (auto it = p.find("birth_year"); it != p.end()) person.birth_year = as_year(*it, path + ".birth_year");
    if (auto it = p.find("death_year"); it != p.end()) person.death_year = as_year(*it, path + ".death_year");
    if (auto it = p.find("attributes"); it != p.end()) person.attributes = as_string_map(*it, path + ".attributes");
    persons.push_back(std::move(person));
  }

  std::vector<Relation> relations;
  if (auto it = doc.find("relations"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("$.relations", "expected array");
    relations.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "$.relations[" + std::to_string(i) + "]";
      const json& r = (*it)[i];
      if (!r.is_object()) throw SchemaError(path, "expected object");
      reject_unknown_keys(r, {"source", "target", "kind"}, path);
      Relation rel;
      rel.source = as_string(require(r, "source", path), path + ".source");
      rel.target = as_string(require(r, "target", path), path + ".target");
      rel.kind = as_string(require(r, "kind", path), path + ".kind");
      relations.push_back(std::move(rel));
    }
  }

  GraphDataset dataset(std::move(persons), std::move(relations), std::move(meta), registry);
  if (auto violations = validate(dataset); !violations.empty()) throw ValidationError(std::move(violations));
  return dataset;
}

GraphDataset load_dataset(const std::string& path, const KindRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SyntaxError("cannot read dataset file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), DocumentFormat::json, registry);
}

std::string serialize_dataset(const GraphDataset& dataset) {
  json doc;
  doc["meta"] = json::object();
  for (const auto& [k, v] : dataset.meta()) doc["meta"][k] = v;
  doc["persons"] = json::array();
  for (const auto& p : dataset.persons()) {
    json jp = {{"id", p.id}, {"label", p.label}};
    if (p.birth_year) jp["birth_year"] = *p.birth_year;
    if (p.death_year) jp["death_year"] = *p.death_year;
    if (!p.attributes.empty()) jp["attributes"] = p.attributes;
    doc["persons"].push_back(std::move(jp));
  }
  doc["relations"] = json::array();
  for (const auto& r : dataset.relations()) {
    doc["relations"].push_back({{"source", r.source}, {"target", r.target}, {"kind", r.kind}});
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// synth_family

namespace {

constexpr std::string_view kGivenNames[] = {
    "Anna", "Jan", "Maria", "Pieter", "Catharina", "Cornelis", "Elisabeth", "Jacob",
    "Margriet", "Hendrick", "Susanna", "Frans", "Barbara", "Adriaen", "Clara", "Gillis",
};
constexpr std::string_view kSurnames[] = {
    "Verhulst", "Quellinck", "de Vos", "Snyders", "van Balen", "Francken", "Teniers", "Brueghel",
    "Jordaens", "de Witte", "Wildens", "van Kessel",
};
constexpr std::string_view kProfessions[] = {
    "painter", "engraver", "sculptor", "art dealer", "goldsmith", "printer", "merchant", "tapestry weaver",
};

template <typename T, std::size_t N>
std::string_view pick(Lcg& rng, const T (&table)[N]) {
  return table[rng.below(static_cast<std::uint32_t>(N))];
}

class FamilyBuilder {
 public:
  explicit FamilyBuilder(const GeneratorSpec& spec) : spec_(spec), rng_(spec.seed) {}

  std::size_t add_person(std::size_t family, int birth) {
    if (persons_.size() >= spec_.max_persons) {
      throw LimitError("generated dataset exceeds the cap of " + std::to_string(spec_.max_persons) + " persons");
    }
    Person p;
    p.id = "p" + std::to_string(persons_.size());
    std::string surname(kSurnames[family % std::size(kSurnames)]);
    if (family >= std::size(kSurnames)) surname += " " + std::to_string(family / std::size(kSurnames) + 1);
    p.label = std::string(pick(rng_, kGivenNames)) + " " + surname;
    p.birth_year = birth;
    p.death_year = birth + 30 + static_cast<int>(rng_.below(45));
    p.attributes["family"] = surname;
    p.attributes["profession"] = std::string(pick(rng_, kProfessions));
    persons_.push_back(std::move(p));
    family_.push_back(family);
    return persons_.size() - 1;
  }

  void relate(std::size_t source, std::size_t target, std::string_view kind) {
    relations_.push_back({persons_[source].id, persons_[target].id, std::string(kind), kind != kSpouseOf});
  }

  std::size_t children_count() {
    if (spec_.children_mean <= 0.0) return 0;
    // Binomial with mean children_mean: no transcendental functions, so the
    // draw sequence is bit-identical on every platform.
    const auto trials = static_cast<std::size_t>(2 * std::ceil(spec_.children_mean));
    const double p = spec_.children_mean / static_cast<double>(trials);
    std::size_t n = 0;
    for (std::size_t t = 0; t < trials; ++t) n += rng_.chance(p) ? 1 : 0;
    return n;
  }

  GraphDataset build() {
    struct Couple {
      std::size_t a, b;
    };
    std::vector<Couple> couples;
    for (std::size_t f = 0; f < spec_.n_families; ++f) {
      const int base = 1560 + static_cast<int>(rng_.below(20));
      auto a = add_person(f, base);
      auto b = add_person(f, base + static_cast<int>(rng_.below(6)));
      relate(a, b, kSpouseOf);
      couples.push_back({a, b});
    }
    std::vector<std::size_t> previous_generation;
    for (const auto& c : couples) {
      previous_generation.push_back(c.a);
      previous_generation.push_back(c.b);
    }

    for (std::size_t g = 1; g < spec_.generations; ++g) {
      std::vector<std::size_t> children;
      for (const auto& c : couples) {
        const int parents_birth = std::max(*persons_[c.a].birth_year, *persons_[c.b].birth_year);
        const std::size_t n = children_count();
        for (std::size_t k = 0; k < n; ++k) {
          auto child = add_person(family_[c.a], parents_birth + 20 + static_cast<int>(rng_.below(16)));
          relate(c.a, child, kParentOf);
          relate(c.b, child, kParentOf);
          if (rng_.chance(spec_.godparent_rate)) {
            std::vector<std::size_t> candidates;
            for (auto q : previous_generation) {
              if (q != c.a && q != c.b) candidates.push_back(q);
            }
            if (!candidates.empty()) {
              relate(candidates[rng_.below(static_cast<std::uint32_t>(candidates.size()))], child, kGodparentOf);
            }
          }
          children.push_back(child);
        }
      }

      previous_generation = children;
      if (g + 1 == spec_.generations) break;

      std::vector<Couple> next;
      std::vector<bool> married(children.size(), false);
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (married[i]) continue;
        const auto child = children[i];
        married[i] = true;
        std::optional<std::size_t> partner;
        if (rng_.chance(spec_.intermarriage_rate)) {
          std::vector<std::size_t> candidates;
          for (std::size_t j = i + 1; j < children.size(); ++j) {
            if (!married[j] && family_[children[j]] != family_[child]) candidates.push_back(j);
          }
          if (!candidates.empty()) {
            auto j = candidates[rng_.below(static_cast<std::uint32_t>(candidates.size()))];
            married[j] = true;
            partner = children[j];
          }
        }
        if (!partner) {
          const int birth = *persons_[child].birth_year - 3 + static_cast<int>(rng_.below(7));
          partner = add_person(family_[child], birth);
          previous_generation.push_back(*partner);
        }
        relate(child, *partner, kSpouseOf);
        next.push_back({child, *partner});
      }
      couples = std::move(next);
    }

    std::map<std::string, std::string> meta{
        {"title", "synthetic genealogy"},
        {"generator", "families=" + std::to_string(spec_.n_families) +
                          " generations=" + std::to_string(spec_.generations) +
                          " seed=" + std::to_string(spec_.seed)},
    };
    return GraphDataset(std::move(persons_), std::move(relations_), std::move(meta));
  }

 private:
  const GeneratorSpec& spec_;
  Lcg rng_;
  std::vector<Person> persons_;
  std::vector<std::size_t> family_;
  std::vector<Relation> relations_;
};

}  // namespace

GraphDataset synth_family(const GeneratorSpec& spec) {
  auto probability = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (spec.generations < 1) throw ConfigError("generations must be >= 1");
  if (spec.n_families < 1) throw ConfigError("n_families must be >= 1");
  if (!std::isfinite(spec.children_mean) || spec.children_mean < 0.0) throw ConfigError("children_mean must be >= 0");
  if (spec.children_mean > 64.0) throw ConfigError("children_mean must be <= 64");
  if (!probability(spec.intermarriage_rate) || !probability(spec.godparent_rate)) {
    throw ConfigError("rates must lie in [0, 1]");
  }
  return FamilyBuilder(spec).build();
}

}  // namespace strata
