#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bora/net/http_server.hpp"
#include "bora/stream/streamer.hpp"

namespace bora::stream {

// Latest-wins backlog bounds: how many undelivered frames a client may
// trail by before older ones are skipped.
inline constexpr std::size_t kPushBacklog = 8;
inline constexpr std::size_t kDirectBacklog = 2;
// An ANSWERed session must be claimed on its data channel within this.
inline constexpr std::chrono::milliseconds kDirectSessionTtl{5000};

/// The streams a server hosts, by id.
class StreamHub {
 public:
  void add(std::shared_ptr<Streamer> streamer);
  std::shared_ptr<Streamer> find(const std::string& id) const;
  std::vector<std::string> ids() const;
  void stop_all();

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Streamer>> streams_;
};

using FrameSend = std::function<bool(const SourceFrame&)>;

/// Feeds ring frames after `after_seq` to `send` in seq order, at most
/// `backlog` behind the newest (older undelivered frames are skipped).
/// Runs until `keep_going` turns false, `send` fails or the ring closes.
/// Returns the number of frames sent.
std::uint64_t pump_frames(const FrameRing& ring, std::uint64_t after_seq, std::size_t backlog,
                          const std::function<bool()>& keep_going, const FrameSend& send);

/// Sessions created by OFFER/ANSWER on the signaling channel, waiting to
/// be claimed by their data channel (once) before the TTL runs out.
class DirectSessions {
 public:
  explicit DirectSessions(std::chrono::milliseconds ttl = kDirectSessionTtl);

  std::string open(const std::string& stream_id);
  // Stream id for a live, unclaimed session; consumes it.
  std::optional<std::string> claim(const std::string& session_id);
  std::size_t pending() const;

 private:
  void expire_locked(std::chrono::steady_clock::time_point now);

  struct Pending {
    std::string stream_id;
    std::chrono::steady_clock::time_point expires;
  };
  std::chrono::milliseconds ttl_;
  mutable std::mutex mu_;
  std::map<std::string, Pending> sessions_;
  std::uint64_t counter_ = 0;
};

/// Registers the three transports on `server`:
///   GET /stream/{id}/playlist, GET /stream/{id}/segment/{n}   (segmented)
///   WS  /ws/stream/{id}                                      (push)
///   WS  /ws/signal, WS /ws/direct/{session}                  (direct)
void mount_stream_endpoints(net::HttpServer& server, std::shared_ptr<StreamHub> hub,
                            std::shared_ptr<DirectSessions> sessions = nullptr);

}  // namespace bora::stream
