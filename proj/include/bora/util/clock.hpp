#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

namespace bora::util {

// Clocks are injected as plain callables so tests can freeze or step time.
using MillisClock = std::function<std::int64_t()>;
using MicrosClock = std::function<std::int64_t()>;

inline std::int64_t utc_now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

inline std::int64_t utc_now_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

inline std::int64_t steady_now_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
}

inline MillisClock system_millis_clock() { return &utc_now_ms; }
inline MicrosClock system_micros_clock() { return &utc_now_us; }

}  // namespace bora::util
