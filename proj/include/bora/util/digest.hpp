#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "bora/util/bytes.hpp"

namespace bora::util {

// Lowercase hex SHA-256.
std::string sha256_hex(ByteView data);
inline std::string sha256_hex(std::string_view data) { return sha256_hex(as_bytes(data)); }

std::string base64_encode(ByteView data);
// Returns nullopt on malformed input.
std::optional<Bytes> base64_decode(std::string_view text);

}  // namespace bora::util
