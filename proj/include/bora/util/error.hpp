#pragma once

#include <stdexcept>
#include <string>

namespace bora {

// Root of every library exception. `kind()` is the stable error name that
// travels over the wire (HTTP error bodies, handshake errors).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Caller broke an operation's precondition.
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& message) : Error("PreconditionError", message) {}
};

}  // namespace bora
