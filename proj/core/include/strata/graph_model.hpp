#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "strata/errors.hpp"

namespace strata {

inline constexpr std::string_view kParentOf = "parent_of";
inline constexpr std::string_view kSpouseOf = "spouse_of";
inline constexpr std::string_view kGodparentOf = "godparent_of";

using Attributes = std::map<std::string, std::string>;

struct Person {
  std::string id;
  std::string label;
  std::optional<int> birth_year;
  std::optional<int> death_year;
  Attributes attributes;

  friend bool operator==(const Person&, const Person&) = default;
};

struct Relation {
  std::string source;
  std::string target;
  std::string kind;
  bool directed = true;

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// Open registry of relation kinds and their directedness. The three
/// built-ins are always present and cannot be redefined.
class KindRegistry {
 public:
  KindRegistry();

  /// Registers a user kind. Throws SpecError when `kind` is empty or
  /// clashes with a built-in of different directedness.
  void add(std::string kind, bool directed);

  bool contains(std::string_view kind) const;
  /// Directedness of a registered kind; unknown kinds report directed.
  bool directed(std::string_view kind) const;
  std::vector<std::string> kinds() const;

 private:
  std::map<std::string, bool, std::less<>> kinds_;
};

/// An edge with both endpoints resolved to canonical node indices.
struct ResolvedEdge {
  std::size_t source;
  std::size_t target;
  std::size_t relation;  // index into relations()
};

/// Persons plus typed relations. Immutable once constructed; person order
/// is the canonical node order used by every algorithm.
class GraphDataset {
 public:
  GraphDataset() = default;
  GraphDataset(std::vector<Person> persons, std::vector<Relation> relations,
               std::map<std::string, std::string> meta = {},
               KindRegistry registry = {});

  const std::vector<Person>& persons() const noexcept { return persons_; }
  const std::vector<Relation>& relations() const noexcept { return relations_; }
  const std::map<std::string, std::string>& meta() const noexcept { return meta_; }
  const KindRegistry& registry() const noexcept { return registry_; }

  std::size_t size() const noexcept { return persons_.size(); }
  bool empty() const noexcept { return persons_.empty(); }

  /// Canonical index of the first person with this id.
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Throws UnknownNodeError.
  std::size_t require_index(std::string_view id) const;
  const Person& person(std::string_view id) const { return persons_[require_index(id)]; }

  /// Relations whose endpoints both resolve, in relation order.
  const std::vector<ResolvedEdge>& edges() const noexcept { return edges_; }

  /// Undirected adjacency over all relation kinds, one entry per incident
  /// relation (parallel relations repeat the neighbour).
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return adjacency_; }

  friend bool operator==(const GraphDataset& a, const GraphDataset& b) {
    return a.persons_ == b.persons_ && a.relations_ == b.relations_ && a.meta_ == b.meta_;
  }

 private:
  std::vector<Person> persons_;
  std::vector<Relation> relations_;
  std::map<std::string, std::string> meta_;
  KindRegistry registry_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<ResolvedEdge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Every broken invariant, in a stable order: persons first (document
/// order), then relations. Empty iff the dataset is valid.
///
/// Codes: EMPTY_ID, DUPLICATE_ID, TEMPORAL_ORDER, SELF_LOOP,
/// UNKNOWN_ENDPOINT, UNKNOWN_KIND, DUPLICATE_RELATION.
std::vector<Violation> validate(const GraphDataset& dataset);

enum class DocumentFormat { json };

/// Parses a dataset document and verifies every invariant.
/// Throws SyntaxError, SchemaError or ValidationError.
GraphDataset parse_dataset(std::string_view text, DocumentFormat format = DocumentFormat::json,
                           const KindRegistry& registry = {});

/// Reads and parses a dataset file. I/O failures surface as SyntaxError.
GraphDataset load_dataset(const std::string& path, const KindRegistry& registry = {});

/// Canonical document text: sorted keys, two-space indent, trailing newline.
std::string serialize_dataset(const GraphDataset& dataset);

struct GeneratorSpec {
  std::size_t n_families = 2;
  std::size_t generations = 3;
  double children_mean = 2.0;
  double intermarriage_rate = 0.2;
  double godparent_rate = 0.3;
  std::uint64_t seed = 1;
  std::size_t max_persons = 100'000;
};

/// Synthetic genealogy: one founder couple per family, then generation by
/// generation each couple gets children, children marry (across families
/// with `intermarriage_rate`, otherwise an in-law), and each child may get
/// a godparent from the previous generation. Pure function of `spec`.
/// Throws ConfigError for an invalid spec, LimitError past `max_persons`.
GraphDataset synth_family(const GeneratorSpec& spec);

}  // namespace strata
