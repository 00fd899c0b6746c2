#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/strata.hpp"

namespace httplib {
class Server;
}

namespace strata::service {

/// Hierarchy from explicit kind lists; an absent list keeps the default.
/// Kinds named in neither list are free.
HierarchySpec make_hierarchy(const std::optional<std::vector<std::string>>& generational,
                             const std::optional<std::vector<std::string>>& co_level);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Transport-free request handling over one immutable dataset. Every
/// handler is a pure function of the request; concurrent calls are safe.
class Service {
 public:
  explicit Service(GraphDataset dataset) : dataset_(std::move(dataset)) {}

  Response handle(const Request& request) const;

  const GraphDataset& dataset() const noexcept { return dataset_; }

 private:
  Response layout(const std::string& body) const;
  Response common(const Request& request) const;
  Response snapshot(const Request& request) const;
  Response report(const Request& request) const;

  GraphDataset dataset_;
};

/// Routes every /api/ request of `server` to `service`; serves
/// `static_dir` at / when given. False when the directory cannot be served.
bool mount(httplib::Server& server, const Service& service, const std::string& static_dir = {});

}  // namespace strata::service
