#include "bora/ingest/registry.hpp"

namespace bora::ingest {

std::shared_ptr<ParserRegistry> ParserRegistry::with_builtins() {
  auto r = std::make_shared<ParserRegistry>();
  r->register_parser(kHttpPoll, std::make_shared<CsvParser>());
  r->register_parser(kPushChannel, std::make_shared<PushParser>());
  return r;
}

ParserHandle ParserRegistry::register_parser(const std::string& protocol_name, ParserHandle parser) {
  if (!parser) throw PreconditionError("null parser for " + protocol_name);
  std::lock_guard lock(mu_);
  auto [it, inserted] = parsers_.emplace(protocol_name, std::move(parser));
  if (!inserted) throw DuplicateProtocol(protocol_name);
  return it->second;
}

ParserHandle ParserRegistry::resolve(const std::string& protocol_name) const {
  std::lock_guard lock(mu_);
  auto it = parsers_.find(protocol_name);
  if (it == parsers_.end()) throw UnknownProtocol(protocol_name);
  return it->second;
}

bool ParserRegistry::contains(const std::string& protocol_name) const {
  std::lock_guard lock(mu_);
  return parsers_.count(protocol_name) != 0;
}

}  // namespace bora::ingest
