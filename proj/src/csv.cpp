#include "sfhmm/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool is_nonfinite_word(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (!lower.empty() && (lower[0] == '+' || lower[0] == '-')) lower.erase(0, 1);
  return lower == "nan" || lower == "inf" || lower == "infinity";
}

}  // namespace

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

CsvTable read_csv(const std::filesystem::path& path, bool allow_nonfinite) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  long row = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    auto fields = split(view);
    std::vector<double> values(fields.size());
    bool numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], values[c])) {
        if (is_nonfinite_word(fields[c])) {
          if (!allow_nonfinite)
            throw DataError(path.string() + ": non-finite value at row " + std::to_string(row) +
                            ", column " + std::to_string(c + 1));
          values[c] = fields[c].find("nan") != std::string_view::npos ||
                              fields[c].find("NaN") != std::string_view::npos
                          ? std::nan("")
                          : (fields[c].front() == '-' ? -INFINITY : INFINITY);
          continue;
        }
        numeric = false;
        bad_col = c + 1;
        break;
      }
      if (!allow_nonfinite && !std::isfinite(values[c]))
        throw DataError(path.string() + ": non-finite value at row " + std::to_string(row) +
                        ", column " + std::to_string(c + 1));
    }
    if (first) {
      first = false;
      width = fields.size();
      if (!numeric) {
        for (auto f : fields) table.header.emplace_back(f);
        continue;
      }
    }
    if (!numeric)
      throw FormatError(path.string() + ": cannot parse number at row " + std::to_string(row) +
                        ", column " + std::to_string(bad_col));
    if (fields.size() != width)
      throw FormatError(path.string() + ": ragged row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " columns, expected " +
                        std::to_string(width) + " (column " +
                        std::to_string(std::min(fields.size(), width) + 1) + ")");
    table.rows.push_back(std::move(values));
  }
  return table;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  CsvTable t = read_csv(path, true);
  const Eigen::Index rows = static_cast<Eigen::Index>(t.rows.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(t.rows[0].size())
                                 : static_cast<Eigen::Index>(t.header.size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = t.rows[r][c];
  return m;
}

Eigen::MatrixXi read_int_matrix_csv(const std::filesystem::path& path) {
  Eigen::MatrixXd d = read_matrix_csv(path);
  Eigen::MatrixXi m(d.rows(), d.cols());
  for (Eigen::Index r = 0; r < d.rows(); ++r)
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
      double v = d(r, c);
      if (v != std::floor(v))
        throw FormatError(path.string() + ": non-integer at row " + std::to_string(r + 1) +
                          ", column " + std::to_string(c + 1));
      m(r, c) = static_cast<int>(v);
    }
  return m;
}

namespace {

template <typename Writer>
void write_rows(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols,
                const std::vector<std::string>& header, Writer cell) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::string buf;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) buf += ',';
      buf += header[c];
    }
    buf += '\n';
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (c) buf += ',';
      buf += cell(r, c);
    }
    buf += '\n';
  }
  out << buf;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  write_rows(path, m.rows(), m.cols(), header,
             [&](Eigen::Index r, Eigen::Index c) { return format_double(m(r, c)); });
}

void write_int_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXi& m,
                          const std::vector<std::string>& header) {
  write_rows(path, m.rows(), m.cols(), header,
             [&](Eigen::Index r, Eigen::Index c) { return std::to_string(m(r, c)); });
}

}  // namespace sfhmm
