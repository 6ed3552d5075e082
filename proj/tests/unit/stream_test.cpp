#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include "bora/stream/codec.hpp"
#include "bora/stream/frame_ring.hpp"
#include "bora/stream/pattern.hpp"
#include "bora/stream/playlist.hpp"
#include "bora/stream/segment.hpp"
#include "bora/stream/transports.hpp"
#include "support/stream_oracles.hpp"

using namespace bora::stream;
using bora::testing::expected_cut;
using bora::testing::lit_centroid;
using bora::testing::PlaylistOracle;

namespace {

Frame random_frame(std::mt19937_64& rng, std::uint32_t max_w, std::uint32_t max_h) {
  Frame f;
  f.width = 1 + static_cast<std::uint32_t>(rng() % max_w);
  f.height = 1 + static_cast<std::uint32_t>(rng() % max_h);
  f.seq = rng();
  f.capture_ts_us = static_cast<std::int64_t>(rng());
  f.pixels.resize(static_cast<std::size_t>(f.width) * f.height);
  // Mix of noise and runs so both token kinds appear.
  std::size_t i = 0;
  while (i < f.pixels.size()) {
    std::size_t len = 1 + rng() % 40;
    bool run = rng() % 2;
    std::uint8_t v = static_cast<std::uint8_t>(rng());
    for (std::size_t k = 0; k < len && i < f.pixels.size(); ++k, ++i)
      f.pixels[i] = run ? v : static_cast<std::uint8_t>(rng());
  }
  return f;
}

std::vector<EncodedFrame> frames_at(const std::vector<std::int64_t>& ts, std::uint64_t first_seq = 1) {
  std::vector<EncodedFrame> out;
  for (std::size_t i = 0; i < ts.size(); ++i) out.push_back({first_seq + i, ts[i], std::make_shared<const Bytes>()});
  return out;
}

}  // namespace

// ---------- pattern ----------

TEST(Pattern, CentroidAtPhaseZeroAndQuarter) {
  PatternParams p;  // 640x480, R=160, r=40, T=4000
  auto c0 = lit_centroid(generate_test_frame(1, 0, p));
  ASSERT_TRUE(c0);
  EXPECT_NEAR(c0->x, p.center_x + p.orbit_radius, 1.0);
  EXPECT_NEAR(c0->y, p.center_y, 1.0);
  auto c1 = lit_centroid(generate_test_frame(2, p.period_ms / 4, p));
  ASSERT_TRUE(c1);
  EXPECT_NEAR(c1->x, p.center_x, 1.0);
  EXPECT_NEAR(c1->y, p.center_y + p.orbit_radius, 1.0);
}

TEST(Pattern, DeterministicAndBinary) {
  PatternParams p = PatternParams::fit(320, 240);
  auto a = generate_test_frame(7, 1234, p);
  auto b = generate_test_frame(7, 1234, p);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.pixels.size(), 320u * 240u);
  for (auto px : a.pixels) ASSERT_TRUE(px == 0 || px == 255);
  // Disc area roughly pi r^2.
  auto lit = std::count(a.pixels.begin(), a.pixels.end(), 255);
  double area = M_PI * p.disc_radius * p.disc_radius;
  EXPECT_NEAR(static_cast<double>(lit), area, area * 0.1);
}

TEST(Pattern, OutOfBounds) {
  PatternParams p;
  p.orbit_radius = 210;  // 210 + 40 > 240
  EXPECT_THROW(generate_test_frame(1, 0, p), PatternOutOfBounds);
  p = PatternParams{};
  p.center_x = 100;  // R + r = 200 > cx
  EXPECT_THROW(generate_test_frame(1, 0, p), PatternOutOfBounds);
  p = PatternParams{};
  p.orbit_radius = 200;  // exactly touching is allowed
  EXPECT_NO_THROW(generate_test_frame(1, 0, p));
}

TEST(Pattern, FitIsValidForManySizes) {
  for (std::uint32_t w : {1u, 2u, 7u, 64u, 640u, 1280u})
    for (std::uint32_t h : {1u, 3u, 48u, 480u, 720u}) EXPECT_NO_THROW(check_pattern(PatternParams::fit(w, h))) << w << "x" << h;
}

// ---------- codec ----------

TEST(Codec, BlackFrameIsOneRun) {
  Frame f{3, 42, 64, 64, Bytes(64 * 64, 0)};
  Bytes e = encode_frame(f);
  // token (4095 << 1) as a two-byte varint, then the value byte.
  EXPECT_EQ(e.size(), kFrameHeaderSize + 3);
  EXPECT_EQ(peek_header(e).payload_len, 3u);
  EXPECT_EQ(decode_frame(e), f);
}

TEST(Codec, HeaderLayoutBigEndian) {
  Frame f{0x0102030405060708ull, 0x1112131415161718ll, 2, 1, Bytes{9, 9}};
  Bytes e = encode_frame(f);
  Bytes expect_head = {'B', 'F', 'R', '1', 1, 2, 3, 4, 5, 6, 7, 8, 0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18,
                       0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 3};
  EXPECT_EQ(Bytes(e.begin(), e.begin() + 32), expect_head);
  // Two equal bytes are below the run threshold: one literal of 2.
  EXPECT_EQ(Bytes(e.begin() + 32, e.end()), (Bytes{3, 9, 9}));
}

TEST(Codec, RandomRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Frame f = random_frame(rng, 300, 200);
    Bytes e = encode_frame(f);
    ASSERT_EQ(decode_frame(e), f) << "iteration " << i;
  }
}

TEST(Codec, NoiseWorstCaseOverheadIsSmall) {
  std::mt19937_64 rng(5);
  Frame f{1, 1, 640, 480, Bytes(640 * 480)};
  for (auto& px : f.pixels) px = static_cast<std::uint8_t>(rng());
  Bytes e = encode_frame(f);
  EXPECT_EQ(decode_frame(e), f);
  EXPECT_LT(e.size(), kFrameHeaderSize + f.pixels.size() + f.pixels.size() / 64);
}

TEST(Codec, TestPatternCompresses) {
  Frame f = generate_test_frame(1, 500, PatternParams{});
  Bytes e = encode_frame(f);
  EXPECT_LE(e.size(), f.pixels.size() + kFrameHeaderSize);
  EXPECT_LT(e.size(), f.pixels.size() / 50);
}

TEST(Codec, EveryTruncationIsCorrupt) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Frame f = random_frame(rng, 20, 20);
    Bytes e = encode_frame(f);
    for (std::size_t len = 0; len < e.size(); ++len) {
      ASSERT_THROW(decode_frame(bora::util::ByteView(e.data(), len)), CorruptFrame) << len;
    }
  }
}

TEST(Codec, BadMagicAndLengthMismatch) {
  Frame f{1, 2, 4, 4, Bytes(16, 7)};
  Bytes e = encode_frame(f);
  Bytes bad = e;
  bad[0] = 'X';
  EXPECT_THROW(decode_frame(bad), CorruptFrame);
  Bytes longer = e;
  longer.push_back(0);
  EXPECT_THROW(decode_frame(longer), CorruptFrame);
  // Header claims more pixels than the payload yields.
  Bytes wider = e;
  wider[23] = 5;
  EXPECT_THROW(decode_frame(wider), CorruptFrame);
}

// ---------- segments ----------

TEST(Segment, ThirtyFpsCutsAt90Or91) {
  for (bool exact : {true, false}) {
    std::vector<std::int64_t> ts;
    for (int k = 0; k < 200; ++k)
      ts.push_back(exact ? std::llround(k * 1e6 / 30.0) : std::int64_t{k} * 33333);  // integer-us jitter variant
    Segment s = build_segment(frames_at(ts), 3000, 1);
    EXPECT_EQ(s.frames.size(), expected_cut(ts, 3000));
    EXPECT_TRUE(s.frames.size() == 90 || s.frames.size() == 91) << s.frames.size();
    EXPECT_LE(std::abs(s.duration_ms - 3000), 34);
  }
}

TEST(Segment, CutMatchesOracleOnJitteredClocks) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::int64_t> ts{static_cast<std::int64_t>(rng() % 1000000)};
    std::size_t n = 1 + rng() % 150;
    for (std::size_t i = 1; i < n; ++i) ts.push_back(ts.back() + 1 + static_cast<std::int64_t>(rng() % 70000));
    std::int64_t target = static_cast<std::int64_t>(rng() % 4000);
    Segment s = build_segment(frames_at(ts), target);
    ASSERT_EQ(s.frames.size(), expected_cut(ts, target)) << trial;
  }
}

TEST(Segment, SingleFrameAndErrors) {
  auto one = build_segment(frames_at({100}), 0);
  EXPECT_EQ(one.frames.size(), 1u);
  EXPECT_THROW(build_segment({}, 3000), EmptyInput);
  auto gap = frames_at({0, 10, 20});
  gap[2].seq = 9;
  EXPECT_THROW(build_segment(gap, 3000), ContiguityError);
  try {
    build_segment(gap, 3000);
  } catch (const EmptyInput& e) {
    EXPECT_EQ(e.kind(), "ContiguityError");
  }
}

TEST(Segment, BlobSplitsBackIntoFrames) {
  std::vector<EncodedFrame> frames;
  PatternParams p = PatternParams::fit(64, 48);
  for (int i = 0; i < 5; ++i) frames.push_back(make_encoded(generate_test_frame(i + 1, i * 33, p)));
  Segment s = build_segment(frames, 10000, 4);
  Bytes blob = s.blob();
  EXPECT_EQ(blob[3], 5);
  auto parts = split_segment_blob(blob);
  ASSERT_EQ(parts.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(std::equal(parts[i].begin(), parts[i].end(), frames[i].bytes->begin()));
  blob.pop_back();
  EXPECT_THROW(split_segment_blob(blob), CorruptFrame);
}

// ---------- playlist ----------

TEST(Playlist, WrapAfter25) {
  Playlist pl(3000, 10);
  for (std::uint64_t i = 1; i <= 25; ++i) pl.add(i);
  EXPECT_EQ(std::vector<std::uint64_t>(pl.entries().begin(), pl.entries().end()),
            (std::vector<std::uint64_t>{16, 17, 18, 19, 20, 21, 22, 23, 24, 25}));
  EXPECT_EQ(pl.media_sequence(), 16u);
  EXPECT_TRUE(pl.wrapped_away(3));
  EXPECT_FALSE(pl.wrapped_away(16));
  auto parsed = parse_manifest(pl.manifest());
  EXPECT_EQ(parsed.urls.size(), 10u);
  EXPECT_EQ(parsed.urls.front(), "segment/16");
  EXPECT_EQ(parsed.media_sequence, 16u);
}

TEST(Playlist, SmallAndMonotonic) {
  Playlist pl;
  for (std::uint64_t i = 1; i <= 3; ++i) pl = playlist_add(pl, Segment{i, 3000, {}});
  EXPECT_EQ(pl.entries().size(), 3u);
  EXPECT_EQ(pl.media_sequence(), 1u);
  for (std::uint64_t i = 4; i <= 7; ++i) pl.add(i);
  EXPECT_THROW(pl.add(5), NonMonotonicSegment);
  EXPECT_THROW(pl.add(9), NonMonotonicSegment);
  EXPECT_EQ(pl.newest(), 7u);
}

TEST(Playlist, EmptyManifestIsValid) {
  Playlist pl;
  EXPECT_EQ(pl.manifest(), "#BORAPL v1\n#TARGET:3000\n#MEDIA-SEQ:1\n");
  auto parsed = parse_manifest(pl.manifest());
  EXPECT_TRUE(parsed.urls.empty());
  EXPECT_THROW(parse_manifest("#M3U\n"), BadManifest);
  EXPECT_THROW(parse_manifest("#BORAPL v1\n#TARGET:1\n#MEDIA-SEQ:4\nsegment/5\n"), BadManifest);
}

TEST(Playlist, RandomSequencesMatchOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t wrap = 1 + rng() % 12;
    Playlist pl(3000, wrap);
    PlaylistOracle oracle{wrap, {}};
    for (int op = 0; op < 60; ++op) {
      std::uint64_t idx = pl.newest() + 1;
      if (rng() % 5 == 0) idx = rng() % (pl.newest() + 3);  // sometimes wrong
      bool ok = oracle.add(idx);
      if (ok) {
        pl.add(idx);
      } else {
        EXPECT_THROW(pl.add(idx), NonMonotonicSegment);
      }
      ASSERT_EQ(pl.entries(), oracle.entries());
      ASSERT_EQ(pl.media_sequence(), oracle.media_sequence());
      ASSERT_LE(pl.entries().size(), wrap);
    }
  }
}

// ---------- ring + pump ----------

namespace {
SourceFrame tiny(std::uint64_t seq) {
  return {seq, static_cast<std::int64_t>(seq) * 1000, nullptr, std::make_shared<const Bytes>(Bytes{static_cast<std::uint8_t>(seq)})};
}
}  // namespace

TEST(FrameRing, OverwritesAndBacklog) {
  FrameRing ring(4);
  EXPECT_EQ(ring.newest_seq(), 0u);
  EXPECT_TRUE(ring.next_after(0, 0, std::chrono::milliseconds(1)).empty());
  for (std::uint64_t s = 1; s <= 6; ++s) ring.publish(tiny(s));
  auto all = ring.next_after(0, 0, std::chrono::milliseconds(1));
  ASSERT_EQ(all.size(), 4u);  // 3..6 retained
  EXPECT_EQ(all.front().seq, 3u);
  auto two = ring.next_after(0, 2, std::chrono::milliseconds(1));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.front().seq, 5u);
  EXPECT_EQ(ring.next_after(5, 8, std::chrono::milliseconds(1)).size(), 1u);
  EXPECT_FALSE(ring.find(2));
  EXPECT_EQ(ring.find(4)->seq, 4u);
  EXPECT_THROW(ring.publish(tiny(8)), bora::PreconditionError);
}

TEST(FrameRing, WriterNeverWaitsForReaders) {
  FrameRing ring(8);
  std::atomic<bool> stop{false};
  std::thread reader([&] {
    std::uint64_t cursor = 0;
    while (!stop) {
      auto b = ring.next_after(cursor, 2, std::chrono::milliseconds(10));
      if (!b.empty()) cursor = b.back().seq;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));  // slow reader
    }
  });
  auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t s = 1; s <= 20000; ++s) ring.publish(tiny(s));
  auto took = std::chrono::steady_clock::now() - t0;
  stop = true;
  reader.join();
  EXPECT_LT(took, std::chrono::seconds(1));
  EXPECT_EQ(ring.newest_seq(), 20000u);
}

TEST(Pump, ThrottledConsumerSkipsButNeverReorders) {
  FrameRing ring(64);
  std::atomic<bool> done{false};
  std::thread producer([&] {
    for (std::uint64_t s = 1; s <= 300; ++s) {
      ring.publish(tiny(s));
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    done = true;
  });
  std::vector<std::uint64_t> got;
  pump_frames(
      ring, 0, kPushBacklog, [&] { return !(done && !got.empty() && got.back() == 300); },
      [&](const SourceFrame& f) {
        got.push_back(f.seq);
        std::this_thread::sleep_for(std::chrono::milliseconds(10));  // 10x slower than the source
        return true;
      });
  producer.join();
  ASSERT_FALSE(got.empty());
  for (std::size_t i = 1; i < got.size(); ++i) ASSERT_GT(got[i], got[i - 1]);
  bool gap = false;
  for (std::size_t i = 1; i < got.size(); ++i) gap |= got[i] != got[i - 1] + 1;
  EXPECT_TRUE(gap);
  EXPECT_LT(got.size(), 300u);
}

TEST(DirectSessions, ClaimOnceAndExpire) {
  DirectSessions s(std::chrono::milliseconds(50));
  auto a = s.open("cam1");
  auto b = s.open("cam1");
  EXPECT_NE(a, b);
  EXPECT_EQ(s.claim(a), "cam1");
  EXPECT_FALSE(s.claim(a));
  std::this_thread::sleep_for(std::chrono::milliseconds(80));
  EXPECT_FALSE(s.claim(b));
  EXPECT_EQ(s.pending(), 0u);
}
