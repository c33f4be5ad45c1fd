#include "sfhmm/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace sfhmm {

namespace {
std::mutex sink_mutex;
WarningSink sink;
std::atomic<long> count{0};
}  // namespace

void warn(const std::string& message) {
  ++count;
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (sink)
    sink(message);
  else
    std::cerr << "warning: " << message << '\n';
}

void set_warning_sink(WarningSink s) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  sink = std::move(s);
}

long warning_count() { return count.load(); }

}  // namespace sfhmm
