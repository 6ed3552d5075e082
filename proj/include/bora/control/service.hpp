#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bora/config/patch.hpp"
#include "bora/control/attachments.hpp"
#include "bora/control/devices.hpp"
#include "bora/control/recordings.hpp"

namespace bora::control {

using SpecHandle = std::shared_ptr<const config::DashboardSpec>;
// Called with each newly published spec, in revision order, while the
// mutation lock is held: listeners must not submit patches themselves.
using SpecListener = std::function<void(const SpecHandle&)>;

struct SubmitResult {
  std::uint64_t revision = 0;           // live spec revision after the patch
  std::optional<DeviceAck> device;      // set_device_param
  std::optional<RecordingMark> recording;  // mark_recording
};

struct Unauthorized : Error {
  Unauthorized() : Error("Unauthorized", "missing or wrong token") {}
};

/// Owner of the live dashboard spec and front door for every mutation.
/// Patches go through one lock, so revisions form a total order; readers
/// grab the current spec pointer without waiting on mutations.
class ControlService {
 public:
  ControlService(config::DashboardSpec initial, std::shared_ptr<DeviceRegistry> devices,
                 std::shared_ptr<AttachmentStore> attachments, std::shared_ptr<RecordingService> recordings,
                 std::string token = {});

  SpecHandle spec() const;

  // An empty configured token disables the check.
  bool authorized(std::string_view presented) const;
  const std::string& token() const { return token_; }

  // Throws UnknownWidget, IllegalPatch, ValidationError (spec ops),
  // UnknownDevice / ValueOutOfRange, UnknownStream / EmptyRange.
  SubmitResult submit(const config::ControlPatch& patch, const std::string& client = {});

  void on_spec_change(SpecListener listener);

  DeviceRegistry& devices() { return *devices_; }
  AttachmentStore& attachments() { return *attachments_; }
  RecordingService* recordings() { return recordings_.get(); }

 private:
  std::shared_ptr<DeviceRegistry> devices_;
  std::shared_ptr<AttachmentStore> attachments_;
  std::shared_ptr<RecordingService> recordings_;
  std::string token_;

  std::mutex mutate_mu_;
  mutable std::mutex spec_mu_;
  SpecHandle spec_;
  std::vector<SpecListener> listeners_;
};

}  // namespace bora::control
