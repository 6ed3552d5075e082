#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "bora/ingest/parsers.hpp"

namespace bora::ingest {

struct DuplicateProtocol : Error {
  explicit DuplicateProtocol(const std::string& name)
      : Error("DuplicateProtocol", "protocol already registered: " + name) {}
};

struct UnknownProtocol : Error {
  explicit UnknownProtocol(const std::string& name)
      : Error("UnknownProtocol", "no parser registered for protocol: " + name) {}
};

using ParserHandle = std::shared_ptr<const ProtocolParser>;

class ParserRegistry {
 public:
  // Registry preloaded with http_poll (CSV) and push_channel (PUSH1).
  static std::shared_ptr<ParserRegistry> with_builtins();

  ParserHandle register_parser(const std::string& protocol_name, ParserHandle parser);
  ParserHandle resolve(const std::string& protocol_name) const;
  bool contains(const std::string& protocol_name) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, ParserHandle> parsers_;
};

}  // namespace bora::ingest
