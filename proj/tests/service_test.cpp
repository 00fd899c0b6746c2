#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "service.hpp"
#include "test_support.hpp"

using namespace strata;
using service::Request;
using service::Service;
using json = nlohmann::json;

namespace {

Service cornelia() { return Service(strata::testing::fixture("cornelia38.json")); }

service::Response post_layout(const Service& s, const json& body) { return s.handle({"POST", "/api/layout", {}, body.dump()}); }

// Reports carry wall-clock runtime; everything else must match exactly.
json without_runtime(json doc) {
  for (auto& [_, mode] : doc["modes"].items()) {
    if (mode.contains("report")) mode["report"].erase("runtime_ms");
  }
  if (doc.contains("comparison")) {
    for (auto& [key, value] : doc["comparison"].items()) {
      if (value.is_object()) value.erase("runtime_ms");
    }
  }
  return doc;
}

json position_of(const json& doc, const std::string& mode, const std::string& id) {
  for (const auto& p : doc["modes"][mode]["positions"]) {
    if (p["id"] == id) return p;
  }
  return nullptr;
}

}  // namespace

TEST(Service, Health) {
  const auto r = cornelia().handle({"GET", "/api/health", {}, ""});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(json::parse(r.body), (json{{"status", "ok"}}));
}

TEST(Service, DatasetDocument) {
  const auto s = cornelia();
  const auto r = s.handle({"GET", "/api/dataset", {}, ""});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(parse_dataset(r.body), s.dataset());
}

TEST(Service, LayoutIsDeterministic) {
  const auto s = cornelia();
  const json body{{"mode", "force_layered"}, {"seed", 11}, {"pins", json::array()}};
  const auto a = post_layout(s, body);
  const auto b = post_layout(s, body);
  EXPECT_EQ(a.status, 200);
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(json::parse(a.body)["modes"]["force_layered"]["positions"].size(), 38u);
}

TEST(Service, ConcurrentIdenticalRequests) {
  const auto s = cornelia();
  const json body{{"mode", "force_directed"}, {"seed", 5}};
  std::vector<std::future<std::string>> jobs;
  for (int i = 0; i < 4; ++i) jobs.push_back(std::async(std::launch::async, [&] { return post_layout(s, body).body; }));
  const auto first = jobs[0].get();
  for (std::size_t i = 1; i < jobs.size(); ++i) EXPECT_EQ(jobs[i].get(), first);
}

TEST(Service, PinnedCoordinateDirected) {
  const auto s = cornelia();
  const auto id = s.dataset().persons()[0].id;
  const auto r = post_layout(s, {{"mode", "force_directed"}, {"seed", 11}, {"pins", {{{"id", id}, {"x", 100}, {"y", 100}}}}});
  ASSERT_EQ(r.status, 200);
  const auto p = position_of(json::parse(r.body), "force_directed", id);
  EXPECT_EQ(p["x"].get<double>(), 100.0);
  EXPECT_EQ(p["y"].get<double>(), 100.0);
}

TEST(Service, PinnedCoordinateLayered) {
  const auto s = cornelia();
  const auto layers = assign_layers(s.dataset());
  for (std::size_t i : {0u, 20u, 37u}) {
    const auto id = s.dataset().persons()[i].id;
    const auto r = post_layout(s, {{"mode", "force_layered"}, {"seed", 11}, {"pins", {{{"id", id}, {"x", 100}, {"y", 100}}}}});
    ASSERT_EQ(r.status, 200);
    const auto doc = json::parse(r.body);
    const auto p = position_of(doc, "force_layered", id);
    EXPECT_EQ(p["x"].get<double>(), 100.0);
    EXPECT_EQ(p["y"].get<double>(), band_center(LayoutConfig{}, layers.layer_of[i]));
    EXPECT_EQ(doc["modes"]["force_layered"]["layers"][id].get<int>(), layers.layer_of[i]);
  }
}

TEST(Service, TraceOnRequest) {
  const auto s = cornelia();
  const auto doc = json::parse(post_layout(s, {{"mode", "force_layered"}, {"seed", 1}, {"trace", true}}).body);
  ASSERT_TRUE(doc.contains("trace"));
  const auto& ticks = doc["trace"]["ticks"];
  ASSERT_GE(ticks.size(), 2u);
  EXPECT_TRUE(ticks.back()["snap"].get<bool>());
  EXPECT_FALSE(json::parse(post_layout(s, {{"seed", 1}}).body).contains("trace"));
}

TEST(Service, HierarchyAndConfigOverrides) {
  const auto s = cornelia();
  const auto r = post_layout(s, {{"mode", "force_layered"},
                                 {"seed", 2},
                                 {"hierarchy", {{"generational", {"parent_of"}}, {"co_level", json::array()}}},
                                 {"config", {{"band_height", 80}}}});
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = json::parse(r.body);
  EXPECT_EQ(doc["modes"]["force_layered"]["config"]["band_height"].get<double>(), 80.0);
}

TEST(Service, BadRequests) {
  const auto s = cornelia();
  auto status = [&](const std::string& body) { return s.handle({"POST", "/api/layout", {}, body}).status; };
  EXPECT_EQ(status("{not json"), 400);
  EXPECT_EQ(status(R"({"mode":"sideways"})"), 400);
  EXPECT_EQ(status(R"({"seed":-1})"), 400);
  EXPECT_EQ(status(R"({"colour":"red"})"), 400);
  EXPECT_EQ(status(R"({"config":{"theta":3}})"), 400);
  EXPECT_EQ(status(R"({"pins":[{"id":"a01","x":1}]})"), 400);
  EXPECT_EQ(status(R"({"mode":"force_layered","hierarchy":{"generational":["spouse_of"],"co_level":["spouse_of"]}})"), 400);
  const auto body = json::parse(s.handle({"POST", "/api/layout", {}, "{not json"}).body);
  EXPECT_EQ(body["code"], "SYNTAX_ERROR");
  EXPECT_TRUE(body["message"].is_string());
}

TEST(Service, UnknownIdsAre404) {
  const auto s = cornelia();
  const auto r = post_layout(s, {{"pins", {{{"id", "nobody"}, {"x", 1}, {"y", 1}}}}});
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(json::parse(r.body)["code"], "UNKNOWN_NODE");
  EXPECT_EQ(s.handle({"GET", "/api/query/common", {{"a", "a01"}, {"b", "nobody"}}, ""}).status, 404);
  EXPECT_EQ(s.handle({"GET", "/api/nothing", {}, ""}).status, 404);
}

TEST(Service, NumericalFailureIs500) {
  // A huge repulsion blows coordinates up to infinity within a few ticks.
  const auto s = cornelia();
  const auto r = post_layout(s, {{"config", {{"repulsion_strength", 1e308}}}});
  EXPECT_EQ(r.status, 500);
  EXPECT_EQ(json::parse(r.body)["code"], "NUMERICAL_ERROR");
}

TEST(Service, Queries) {
  const auto s = cornelia();
  const auto& d = s.dataset();
  const auto most = json::parse(s.handle({"GET", "/api/query/most-connected", {}, ""}).body);
  EXPECT_EQ(most["ids"].get<std::vector<std::string>>(), most_connected(d));
  const auto common = s.handle({"GET", "/api/query/common", {{"a", "a01"}, {"b", "a02"}}, ""});
  EXPECT_EQ(common.status, 200);
  EXPECT_EQ(json::parse(common.body)["ids"].get<std::vector<std::string>>(), common_neighbors(d, "a01", "a02"));
  EXPECT_EQ(s.handle({"GET", "/api/query/common", {{"a", "a01"}}, ""}).status, 400);
  EXPECT_EQ(s.handle({"GET", "/api/query/common", {{"a", "a01"}, {"b", "a01"}}, ""}).status, 400);

  const auto snap = s.handle({"GET", "/api/query/snapshot", {{"year", "1650"}}, ""});
  ASSERT_EQ(snap.status, 200);
  const auto doc = json::parse(snap.body);
  const auto sub = parse_dataset(doc["dataset"].dump());
  EXPECT_TRUE(validate(sub).empty());
  EXPECT_EQ(sub, snapshot_at_year(d, 1650).dataset);
  EXPECT_EQ(s.handle({"GET", "/api/query/snapshot", {{"year", "soon"}}, ""}).status, 400);
}

TEST(Service, Report) {
  const auto s = cornelia();
  const auto r = s.handle({"GET", "/api/report", {{"seed", "11"}}, ""});
  ASSERT_EQ(r.status, 200);
  const auto doc = json::parse(r.body);
  EXPECT_EQ(doc["modes"].size(), 2u);
  EXPECT_EQ(doc["modes"]["force_layered"]["report"]["layer_violation"].get<double>(), 0.0);
  EXPECT_GT(doc["modes"]["force_directed"]["report"]["layer_violation"].get<double>(), 0.0);
  EXPECT_EQ(doc["modes"]["force_directed"]["report"]["node_count"].get<int>(), 38);
  EXPECT_EQ(without_runtime(doc), without_runtime(json::parse(s.handle({"GET", "/api/report", {{"seed", "11"}}, ""}).body)));
}

TEST(Service, OverHttp) {
  const auto s = cornelia();
  httplib::Server server;
  ASSERT_TRUE(service::mount(server, s));
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/api/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  const auto common = client.Get("/api/query/common?a=a01&b=a02");
  ASSERT_TRUE(common);
  EXPECT_EQ(common->status, 200);
  const std::string body = R"({"mode":"force_layered","seed":11,"pins":[{"id":"a01","x":100,"y":100}]})";
  const auto r1 = client.Post("/api/layout", body, "application/json");
  const auto r2 = client.Post("/api/layout", body, "application/json");
  ASSERT_TRUE(r1 && r2);
  EXPECT_EQ(r1->status, 200);
  EXPECT_EQ(r1->body, r2->body);
  const auto bad = client.Post("/api/layout", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  server.stop();
  worker.join();
}

TEST(Service, MakeHierarchy) {
  const auto spec = service::make_hierarchy(std::vector<std::string>{"godparent_of"}, std::nullopt);
  EXPECT_TRUE(spec.is_generational("godparent_of"));
  EXPECT_FALSE(spec.free_kinds.count("godparent_of"));
  EXPECT_THROW(service::make_hierarchy(std::vector<std::string>{"spouse_of"}, std::nullopt), SpecError);
}
