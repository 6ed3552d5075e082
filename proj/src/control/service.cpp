#include "bora/control/service.hpp"

#include <openssl/crypto.h>
#include <spdlog/spdlog.h>

namespace bora::control {

using config::ControlPatch;
using config::PatchOp;

ControlService::ControlService(config::DashboardSpec initial, std::shared_ptr<DeviceRegistry> devices,
                               std::shared_ptr<AttachmentStore> attachments,
                               std::shared_ptr<RecordingService> recordings, std::string token)
    : devices_(std::move(devices)),
      attachments_(std::move(attachments)),
      recordings_(std::move(recordings)),
      token_(std::move(token)),
      spec_(std::make_shared<const config::DashboardSpec>(std::move(initial))) {
  if (!attachments_) attachments_ = std::make_shared<AttachmentStore>();
}

SpecHandle ControlService::spec() const {
  std::lock_guard lock(spec_mu_);
  return spec_;
}

bool ControlService::authorized(std::string_view presented) const {
  if (token_.empty()) return true;
  return presented.size() == token_.size() && CRYPTO_memcmp(presented.data(), token_.data(), token_.size()) == 0;
}

void ControlService::on_spec_change(SpecListener listener) {
  std::lock_guard lock(mutate_mu_);
  listeners_.push_back(std::move(listener));
}

SubmitResult ControlService::submit(const ControlPatch& patch, const std::string& client) {
  config::check_payload(patch);
  std::lock_guard lock(mutate_mu_);
  SubmitResult result;
  SpecHandle current = spec();

  if (patch.affects_spec()) {
    auto next = std::make_shared<const config::DashboardSpec>(config::apply_settings_patch(*current, patch));
    if (patch.op == PatchOp::attach_image) {
      const auto& img = std::get<config::ImagePayload>(patch.payload);
      attachments_->put(patch.target, img.media_type, img.data);
    }
    {
      std::lock_guard slock(spec_mu_);
      spec_ = next;
    }
    spdlog::info("patch {} on '{}' from {} -> revision {}", config::to_string(patch.op), patch.target,
                 client.empty() ? "?" : client, next->revision);
    for (const auto& l : listeners_) l(next);
    result.revision = next->revision;
    return result;
  }

  result.revision = current->revision;
  switch (patch.op) {
    case PatchOp::set_device_param:
      if (!devices_) throw UnknownDevice(patch.target);
      result.device = devices_->set(patch.target, std::get<double>(patch.payload), client);
      break;
    case PatchOp::mark_recording: {
      if (!recordings_) throw UnknownStream(patch.target);
      const auto& r = std::get<config::RecordingRange>(patch.payload);
      result.recording = recordings_->mark(patch.target, r.from_ts, r.to_ts);
      break;
    }
    default:
      throw config::IllegalPatch("unhandled op " + std::string(config::to_string(patch.op)));
  }
  return result;
}

}  // namespace bora::control
