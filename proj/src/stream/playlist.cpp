#include "bora/stream/playlist.hpp"

#include <charconv>

namespace bora::stream {

Playlist::Playlist(std::int64_t target_duration_ms, std::size_t wrap) : target_ms_(target_duration_ms), wrap_(wrap) {
  if (wrap_ == 0) throw PreconditionError("playlist wrap must be >= 1");
}

void Playlist::add(std::uint64_t index) {
  if (index != newest_ + 1) {
    throw NonMonotonicSegment("segment " + std::to_string(index) + " after " + std::to_string(newest_) +
                              " (expected " + std::to_string(newest_ + 1) + ")");
  }
  newest_ = index;
  entries_.push_back(index);
  while (entries_.size() > wrap_) entries_.pop_front();
}

bool Playlist::contains(std::uint64_t index) const {
  return !entries_.empty() && index >= entries_.front() && index <= entries_.back();
}

std::string Playlist::manifest() const {
  std::string out = "#BORAPL v1\n#TARGET:" + std::to_string(target_ms_) + "\n#MEDIA-SEQ:" +
                    std::to_string(media_sequence()) + "\n";
  for (auto i : entries_) out += "segment/" + std::to_string(i) + "\n";
  return out;
}

Playlist playlist_add(Playlist pl, const Segment& seg) {
  pl.add(seg.index);
  return pl;
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadManifest("bad " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

}  // namespace

ParsedPlaylist parse_manifest(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
  }
  if (lines.size() < 3 || lines[0] != "#BORAPL v1") throw BadManifest("missing #BORAPL v1 header");
  constexpr std::string_view kTarget = "#TARGET:", kSeq = "#MEDIA-SEQ:", kSeg = "segment/";
  if (!lines[1].starts_with(kTarget)) throw BadManifest("line 2 must be #TARGET");
  if (!lines[2].starts_with(kSeq)) throw BadManifest("line 3 must be #MEDIA-SEQ");
  ParsedPlaylist out;
  out.target_duration_ms = parse_number<std::int64_t>(lines[1].substr(kTarget.size()), "target");
  out.media_sequence = parse_number<std::uint64_t>(lines[2].substr(kSeq.size()), "media sequence");
  for (std::size_t i = 3; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    if (!lines[i].starts_with(kSeg)) throw BadManifest("unexpected line '" + std::string(lines[i]) + "'");
    std::uint64_t index = parse_number<std::uint64_t>(lines[i].substr(kSeg.size()), "segment index");
    if (out.indices.empty() ? index != out.media_sequence : index != out.indices.back() + 1)
      throw BadManifest("segment indices not consecutive from media sequence");
    out.indices.push_back(index);
    out.urls.emplace_back(lines[i]);
  }
  return out;
}

}  // namespace bora::stream
