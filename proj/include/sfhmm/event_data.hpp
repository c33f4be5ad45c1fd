#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sfhmm {

enum class EventFormat { csv, binary };

// One multivariate recording: T rows, one column per channel.
struct EventData {
  Eigen::MatrixXd y;
  std::vector<std::string> channel_ids;
  double sample_rate_hz = 1.0;

  int T() const { return static_cast<int>(y.rows()); }
  int N() const { return static_cast<int>(y.cols()); }
};

EventFormat format_from_path(const std::filesystem::path& path);

// Reads a CSV (optional header of channel ids) or the binary format. When
// ar_order > 0 the T >= ar_order + 1 precondition is enforced.
EventData load_event(const std::filesystem::path& path, EventFormat format, int ar_order = 0);
EventData load_event(const std::filesystem::path& path, int ar_order = 0);

void save_event(const std::filesystem::path& path, const EventData& event, EventFormat format);

// Binary layout, little-endian: "SFEV" magic, u32 version, u64 T, u64 N,
// f64 sample rate, N length-prefixed (u32) channel ids, then T*N f64 row-major.
void save_event_binary(const std::filesystem::path& path, const EventData& event);

// Low-pass, decimate by the integer ratio source/target, then scale jointly
// so the scale_q quantile of |y| equals 10.
EventData preprocess(const EventData& raw, double target_rate_hz, double scale_q);

// Zero-phase moving average with window `width`, edges renormalized.
Eigen::MatrixXd moving_average(const Eigen::MatrixXd& y, int width);

// Type-7 empirical quantile of the pooled absolute values.
double abs_quantile(const Eigen::MatrixXd& y, double q);

}  // namespace sfhmm
