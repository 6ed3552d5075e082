#include "bora/stream/frame_ring.hpp"

#include <algorithm>

namespace bora::stream {

FrameRing::FrameRing(std::size_t capacity) : slots_(std::max<std::size_t>(capacity, 1)) {}

void FrameRing::publish(SourceFrame frame) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (count_ > 0 && frame.seq != newest_ + 1) throw PreconditionError("frame ring seq must be consecutive");
    newest_ = frame.seq;
    slots_[frame.seq % slots_.size()] = std::move(frame);
    count_ = std::min(count_ + 1, slots_.size());
  }
  cv_.notify_all();
}

std::vector<SourceFrame> FrameRing::next_after(std::uint64_t after_seq, std::size_t backlog,
                                               std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || (count_ > 0 && newest_ > after_seq); });
  std::vector<SourceFrame> out;
  if (count_ == 0 || newest_ <= after_seq) return out;
  std::uint64_t oldest = newest_ - count_ + 1;
  std::uint64_t from = std::max(after_seq + 1, oldest);
  if (backlog > 0 && newest_ - from + 1 > backlog) from = newest_ - backlog + 1;
  out.reserve(newest_ - from + 1);
  for (std::uint64_t s = from; s <= newest_; ++s) out.push_back(slots_[s % slots_.size()]);
  return out;
}

std::optional<SourceFrame> FrameRing::latest() const {
  std::lock_guard lock(mu_);
  if (count_ == 0) return std::nullopt;
  return slots_[newest_ % slots_.size()];
}

std::optional<SourceFrame> FrameRing::find(std::uint64_t seq) const {
  std::lock_guard lock(mu_);
  if (count_ == 0 || seq > newest_ || seq + count_ <= newest_) return std::nullopt;
  return slots_[seq % slots_.size()];
}

std::vector<SourceFrame> FrameRing::snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<SourceFrame> out;
  for (std::uint64_t s = newest_ - count_ + 1; count_ > 0 && s <= newest_; ++s) out.push_back(slots_[s % slots_.size()]);
  return out;
}

std::uint64_t FrameRing::newest_seq() const {
  std::lock_guard lock(mu_);
  return count_ == 0 ? 0 : newest_;
}

void FrameRing::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool FrameRing::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

}  // namespace bora::stream
