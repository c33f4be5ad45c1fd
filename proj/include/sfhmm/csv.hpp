#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sfhmm {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};

// Parses a numeric CSV. The first line is taken as a header when any of its
// fields is not a number. Ragged rows and bad tokens raise FormatError with
// 1-based row/column; non-finite values raise DataError.
CsvTable read_csv(const std::filesystem::path& path, bool allow_nonfinite = false);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
Eigen::MatrixXi read_int_matrix_csv(const std::filesystem::path& path);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
bool parse_double(std::string_view s, double& out);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});
void write_int_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXi& m,
                          const std::vector<std::string>& header = {});

}  // namespace sfhmm
