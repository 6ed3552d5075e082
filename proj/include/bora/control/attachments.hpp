#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "bora/util/bytes.hpp"

namespace bora::control {

struct Attachment {
  std::string media_type;
  util::Bytes data;
  std::string sha256;
};

/// Latest image attached to each widget; a new attach replaces the old.
class AttachmentStore {
 public:
  // Throws config::IllegalPatch for non-image types, empty or oversized data.
  void put(const std::string& widget_id, std::string media_type, util::Bytes data);
  std::shared_ptr<const Attachment> get(const std::string& widget_id) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Attachment>> items_;
};

}  // namespace bora::control
