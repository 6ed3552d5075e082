#include "bora/control/attachments.hpp"

#include "bora/config/patch.hpp"
#include "bora/util/digest.hpp"

namespace bora::control {

void AttachmentStore::put(const std::string& widget_id, std::string media_type, util::Bytes data) {
  // Same rules the patch validator applies; checked again for direct callers.
  config::check_payload(config::ControlPatch::attach_image(widget_id, media_type, data));
  auto item = std::make_shared<Attachment>();
  item->sha256 = util::sha256_hex(data);
  item->media_type = std::move(media_type);
  item->data = std::move(data);
  std::lock_guard lock(mu_);
  items_[widget_id] = std::move(item);
}

std::shared_ptr<const Attachment> AttachmentStore::get(const std::string& widget_id) const {
  std::lock_guard lock(mu_);
  auto it = items_.find(widget_id);
  return it == items_.end() ? nullptr : it->second;
}

std::size_t AttachmentStore::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

}  // namespace bora::control
