#include "sfhmm/event_data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "sfhmm/csv.hpp"
#include "sfhmm/errors.hpp"
#include "sfhmm/log.hpp"

namespace sfhmm {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'E', 'V'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary format assumes little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError(path.string() + ": truncated binary event file");
  return v;
}

EventData load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError(path.string() + ": bad magic in binary event file");
  if (get<std::uint32_t>(in, path) != kVersion)
    throw FormatError(path.string() + ": unsupported binary event version");
  const auto T = get<std::uint64_t>(in, path);
  const auto N = get<std::uint64_t>(in, path);
  EventData ev;
  ev.sample_rate_hz = get<double>(in, path);
  for (std::uint64_t i = 0; i < N; ++i) {
    const auto len = get<std::uint32_t>(in, path);
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (!in) throw FormatError(path.string() + ": truncated channel id");
    ev.channel_ids.push_back(std::move(id));
  }
  ev.y.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(N));
  for (std::uint64_t t = 0; t < T; ++t)
    for (std::uint64_t i = 0; i < N; ++i) {
      double v = get<double>(in, path);
      if (!std::isfinite(v))
        throw DataError(path.string() + ": non-finite value at row " + std::to_string(t + 1) +
                        ", column " + std::to_string(i + 1));
      ev.y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = v;
    }
  return ev;
}

EventData load_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  EventData ev;
  const std::size_t N = table.rows.empty() ? table.header.size() : table.rows[0].size();
  if (!table.header.empty() && table.header.size() != N)
    throw FormatError(path.string() + ": header has " + std::to_string(table.header.size()) +
                      " columns, data has " + std::to_string(N));
  ev.y.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(N));
  for (std::size_t t = 0; t < table.rows.size(); ++t)
    for (std::size_t i = 0; i < N; ++i)
      ev.y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = table.rows[t][i];
  ev.channel_ids = table.header;
  if (ev.channel_ids.empty())
    for (std::size_t i = 0; i < N; ++i) ev.channel_ids.push_back("ch" + std::to_string(i));
  return ev;
}

}  // namespace

EventFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".bin" || ext == ".sfev") return EventFormat::binary;
  return EventFormat::csv;
}

EventData load_event(const std::filesystem::path& path, EventFormat format, int ar_order) {
  if (!std::filesystem::exists(path)) throw NotFoundError("event file not found: " + path.string());
  EventData ev = format == EventFormat::csv ? load_csv(path) : load_binary(path);
  if (ev.N() == 0) throw FormatError(path.string() + ": no channels");
  if (ar_order > 0 && ev.T() < ar_order + 1)
    throw PreconditionError(path.string() + ": T=" + std::to_string(ev.T()) +
                            " is below ar_order+1=" + std::to_string(ar_order + 1));
  return ev;
}

EventData load_event(const std::filesystem::path& path, int ar_order) {
  return load_event(path, format_from_path(path), ar_order);
}

void save_event_binary(const std::filesystem::path& path, const EventData& ev) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(ev.T()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(ev.N()));
  put<double>(out, ev.sample_rate_hz);
  for (int i = 0; i < ev.N(); ++i) {
    std::string id = i < static_cast<int>(ev.channel_ids.size()) ? ev.channel_ids[i]
                                                                   : "ch" + std::to_string(i);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (int t = 0; t < ev.T(); ++t)
    for (int i = 0; i < ev.N(); ++i) put<double>(out, ev.y(t, i));
  if (!out) throw IoError("write failed for " + path.string());
}

void save_event(const std::filesystem::path& path, const EventData& ev, EventFormat format) {
  if (format == EventFormat::binary) {
    save_event_binary(path, ev);
    return;
  }
  write_matrix_csv(path, ev.y, ev.channel_ids);
}

Eigen::MatrixXd moving_average(const Eigen::MatrixXd& y, int width) {
  if (width <= 1) return y;
  // Odd widths: centered box. Even widths: width+1 taps, half weight at the ends.
  std::vector<double> taps;
  if (width % 2 == 1) {
    taps.assign(width, 1.0);
  } else {
    taps.assign(width + 1, 1.0);
    taps.front() = taps.back() = 0.5;
  }
  const int half = static_cast<int>(taps.size()) / 2;
  const int T = static_cast<int>(y.rows());
  Eigen::MatrixXd out(y.rows(), y.cols());
  for (int t = 0; t < T; ++t) {
    double wsum = 0.0;
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(y.cols());
    for (int j = -half; j <= half; ++j) {
      int s = t + j;
      if (s < 0 || s >= T) continue;
      double w = taps[j + half];
      acc += w * y.row(s);
      wsum += w;
    }
    out.row(t) = acc / wsum;
  }
  return out;
}

double abs_quantile(const Eigen::MatrixXd& y, double q) {
  std::vector<double> v(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) v[k] = std::abs(y.data()[k]);
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

EventData preprocess(const EventData& raw, double target_rate_hz, double scale_q) {
  if (!(scale_q > 0.0 && scale_q < 1.0)) throw ConfigError("scale quantile must lie in (0, 1)");
  if (!(target_rate_hz > 0.0) || !(raw.sample_rate_hz > 0.0))
    throw ConfigError("sample rates must be positive");
  const double ratio = raw.sample_rate_hz / target_rate_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw ConfigError("source rate " + format_double(raw.sample_rate_hz) +
                      " Hz is not an integer multiple of target rate " +
                      format_double(target_rate_hz) + " Hz");
  const int q = static_cast<int>(rounded);

  Eigen::MatrixXd filtered = moving_average(raw.y, q);
  const int T_out = (raw.T() + q - 1) / q;
  EventData out;
  out.channel_ids = raw.channel_ids;
  out.sample_rate_hz = target_rate_hz;
  out.y.resize(T_out, raw.N());
  for (int t = 0; t < T_out; ++t) out.y.row(t) = filtered.row(t * q);

  const double qv = abs_quantile(out.y, scale_q);
  if (!(qv > 0.0)) {
    warn("preprocess: |y| quantile is zero, data left unscaled");
  } else {
    out.y *= 10.0 / qv;
  }
  for (Eigen::Index k = 0; k < out.y.size(); ++k)
    if (!std::isfinite(out.y.data()[k])) throw DataError("preprocess produced a non-finite value");
  return out;
}

}  // namespace sfhmm
