#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "oracles.hpp"
#include "strata/layering.hpp"
#include "test_support.hpp"

using namespace strata;
using strata::testing::make_dataset;

namespace {

std::vector<std::vector<std::string>> cluster_ids(const GraphDataset& d, const HierarchySpec& spec) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : co_level_clusters(d, spec)) {
    out.emplace_back();
    for (auto i : c) out.back().push_back(d.persons()[i].id);
  }
  return out;
}

void expect_invariants(const GraphDataset& d, const HierarchySpec& spec, const LayerAssignment& a) {
  ASSERT_EQ(a.layer_of.size(), d.size());
  std::set<int> used;
  for (auto l : a.layer_of) {
    EXPECT_GE(l, 0);
    used.insert(l);
  }
  if (d.size() > 0) {
    EXPECT_EQ(*used.begin(), 0);
    EXPECT_EQ(static_cast<int>(used.size()), a.layer_count);
    EXPECT_EQ(*used.rbegin(), a.layer_count - 1);
  }
  std::set<std::size_t> broken(a.broken_relations.begin(), a.broken_relations.end());
  for (std::size_t r = 0; r < d.relations().size(); ++r) {
    const auto& rel = d.relations()[r];
    const auto s = a.layer(d, rel.source), t = a.layer(d, rel.target);
    if (spec.is_generational(rel.kind) && !broken.count(r)) EXPECT_GE(t, s + 1);
    if (spec.is_co_level(rel.kind)) EXPECT_EQ(s, t);
  }
}

}  // namespace

TEST(CoLevelClusters, Examples) {
  const HierarchySpec spec;
  EXPECT_EQ(cluster_ids(strata::testing::trio(), spec),
            (std::vector<std::vector<std::string>>{{"A", "B"}, {"C"}}));
  EXPECT_EQ(cluster_ids(strata::testing::chain3(), spec),
            (std::vector<std::vector<std::string>>{{"a"}, {"b"}, {"c"}}));
  const auto chain = make_dataset({"A", "B", "C"}, {{"A", "B", "spouse_of"}, {"B", "C", "spouse_of"}});
  EXPECT_EQ(cluster_ids(chain, spec), (std::vector<std::vector<std::string>>{{"A", "B", "C"}}));
}

TEST(CoLevelClusters, OrderFollowsSmallestMember) {
  const auto d = make_dataset({"x", "y", "z", "w"}, {{"w", "y", "spouse_of"}});
  EXPECT_EQ(cluster_ids(d, {}), (std::vector<std::vector<std::string>>{{"x"}, {"y", "w"}, {"z"}}));
}

TEST(AssignLayers, Chain3) {
  const auto d = strata::testing::chain3();
  const auto a = assign_layers(d);
  EXPECT_EQ(a.layer_of, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(a.layer_count, 3);
}

TEST(AssignLayers, Trio) {
  EXPECT_EQ(assign_layers(strata::testing::trio()).layer_of, (std::vector<int>{0, 0, 1}));
}

TEST(AssignLayers, ShortcutEdgeMatchesExhaustiveOracle) {
  const auto d = make_dataset({"A", "B", "C"}, {{"A", "B", "parent_of"}, {"B", "C", "parent_of"}, {"A", "C", "parent_of"}});
  const auto expected = oracle::minimal_layers(d, {"parent_of"}, {"spouse_of"});
  ASSERT_TRUE(expected);
  EXPECT_EQ(*expected, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(assign_layers(d).layer_of, *expected);
}

TEST(AssignLayers, TwoCycleRejected) {
  const auto d = make_dataset({"A", "B"}, {{"A", "B", "parent_of"}, {"B", "A", "parent_of"}});
  try {
    assign_layers(d, {}, CyclePolicy::reject);
    FAIL() << "expected CycleError";
  } catch (const CycleError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<std::string>{"A", "B"}));
  }
}

TEST(AssignLayers, CycleBrokenAndRecorded) {
  const auto d = make_dataset({"A", "B"}, {{"A", "B", "parent_of"}, {"B", "A", "parent_of"}});
  const auto a = assign_layers(d, {}, CyclePolicy::break_back_edges);
  EXPECT_EQ(a.layer_of, (std::vector<int>{0, 1}));
  EXPECT_EQ(a.broken_relations, (std::vector<std::size_t>{1}));
  expect_invariants(d, {}, a);
}

TEST(AssignLayers, LongerCycleListsPersonsInOrder) {
  const auto d = make_dataset({"A", "B", "C"}, {{"A", "B", "parent_of"}, {"B", "C", "parent_of"}, {"C", "A", "parent_of"}});
  try {
    assign_layers(d);
    FAIL();
  } catch (const CycleError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<std::string>{"A", "B", "C"}));
  }
}

TEST(AssignLayers, SpouseAndParentContradict) {
  const auto d = make_dataset({"A", "B"}, {{"A", "B", "spouse_of"}, {"A", "B", "parent_of"}});
  EXPECT_THROW(assign_layers(d), SpecError);
}

TEST(AssignLayers, OverlappingSpecRejected) {
  HierarchySpec spec;
  spec.co_level_kinds.insert("parent_of");
  EXPECT_THROW(assign_layers(strata::testing::trio(), spec), SpecError);
}

TEST(AssignLayers, GodparentIsFree) {
  const auto d = make_dataset({"g", "c"}, {{"c", "g", "godparent_of"}});
  EXPECT_EQ(assign_layers(d).layer_of, (std::vector<int>{0, 0}));
}

TEST(AssignLayers, ComponentsLayeredIndependently) {
  const auto d = make_dataset({"a", "b", "c", "x", "y"},
                              {{"a", "b", "parent_of"}, {"b", "c", "parent_of"}, {"x", "y", "parent_of"}});
  EXPECT_EQ(assign_layers(d).layer_of, (std::vector<int>{0, 1, 2, 0, 1}));
}

TEST(AssignLayers, CustomHierarchy) {
  // Godparenthood promoted to a generational kind.
  HierarchySpec spec;
  spec.free_kinds.clear();
  spec.generational_kinds.insert("godparent_of");
  const auto d = make_dataset({"g", "c"}, {{"g", "c", "godparent_of"}});
  EXPECT_EQ(assign_layers(d, spec).layer_of, (std::vector<int>{0, 1}));
}

TEST(AssignLayers, FixturesSatisfyInvariants) {
  for (const auto& name : strata::testing::shipped_fixtures()) {
    const auto d = strata::testing::fixture(name);
    const auto a = assign_layers(d);
    SCOPED_TRACE(name);
    expect_invariants(d, {}, a);
    EXPECT_TRUE(a.broken_relations.empty());
  }
}

TEST(AssignLayers, MinimalOnRandomSmallGraphs) {
  Lcg rng(2024);
  int checked = 0;
  for (int iter = 0; iter < 150; ++iter) {
    const auto d = strata::testing::random_dataset(rng, 7, 0.25);
    const auto expected = oracle::minimal_layers(d, {"parent_of"}, {"spouse_of"});
    if (!expected) {
      EXPECT_ANY_THROW(assign_layers(d));
      continue;
    }
    const auto a = assign_layers(d);
    EXPECT_EQ(a.layer_of, *expected) << serialize_dataset(d);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(AssignLayers, BreakPolicyAlwaysYieldsValidLayers) {
  Lcg rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    const auto d = strata::testing::random_dataset(rng, 10, 0.3, {"parent_of", "godparent_of"});
    const auto a = assign_layers(d, {}, CyclePolicy::break_back_edges);
    expect_invariants(d, {}, a);
    EXPECT_EQ(a, assign_layers(d, {}, CyclePolicy::break_back_edges));
  }
}

TEST(AssignLayers, RemovingGenerationalEdgeNeverRaisesLayer) {
  Lcg rng(99);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const auto d = strata::testing::random_dataset(rng, 8, 0.2);
    LayerAssignment before;
    try {
      before = assign_layers(d);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t r = 0; r < d.relations().size(); ++r) {
      if (d.relations()[r].kind != "parent_of") continue;
      auto rels = d.relations();
      rels.erase(rels.begin() + static_cast<std::ptrdiff_t>(r));
      const GraphDataset smaller(d.persons(), rels);
      const auto after = assign_layers(smaller);
      for (std::size_t i = 0; i < d.size(); ++i) EXPECT_LE(after.layer_of[i], before.layer_of[i]);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(CompactLayers, Examples) {
  LayerAssignment raw{{0, 2}, 3, {}};
  const auto c = compact_layers(raw);
  EXPECT_EQ(c.layer_of, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.layer_count, 2);
  const LayerAssignment compact{{0, 1, 1, 2}, 3, {}};
  EXPECT_EQ(compact_layers(compact), compact);
}

TEST(CompactLayers, OrderIsomorphicToSortOracle) {
  Lcg rng(17);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + rng.below(12);
    LayerAssignment raw;
    for (std::size_t i = 0; i < n; ++i) raw.layer_of.push_back(static_cast<int>(rng.below(40)));
    raw.layer_count = *std::max_element(raw.layer_of.begin(), raw.layer_of.end()) + 1;
    // Oracle: rank among the sorted distinct values.
    auto distinct = raw.layer_of;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto c = compact_layers(raw);
    EXPECT_EQ(c.layer_count, static_cast<int>(distinct.size()));
    for (std::size_t i = 0; i < n; ++i) {
      const auto rank = std::lower_bound(distinct.begin(), distinct.end(), raw.layer_of[i]) - distinct.begin();
      EXPECT_EQ(c.layer_of[i], rank);
    }
  }
}

TEST(AssignLayers, Deterministic) {
  const auto d = strata::testing::fixture("cornelia38.json");
  EXPECT_EQ(assign_layers(d), assign_layers(d));
}
