#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bora/util/error.hpp"

namespace bora::net {

struct NetError : Error {
  explicit NetError(const std::string& message) : Error("NetError", message) {}
};

struct HttpRequest {
  std::string method;
  std::string path;  // percent-decoded, no query
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> params;   // captured from the route pattern
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;

  std::string header(const std::string& lowercase_name) const;
  std::optional<std::string> query_param(const std::string& name) const;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "text/plain";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  static HttpResponse text(int status, std::string body);
  static HttpResponse json(int status, std::string body);
  static HttpResponse binary(std::string body, std::string content_type = "application/octet-stream");
};

std::string url_decode(std::string_view s);
std::map<std::string, std::string> parse_query(std::string_view query);

/// Matches "/a/{x}/b" style patterns (one segment per placeholder, a trailing
/// "/*" captures the rest under "*"). Returns the captures on success.
std::optional<std::map<std::string, std::string>> match_route(std::string_view pattern, std::string_view path);

}  // namespace bora::net
