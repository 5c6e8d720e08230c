#pragma once
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>
#include <structnet/linalg.hpp>

namespace structnet::io {

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

/// Parses a full cell as a finite double; throws DataError otherwise.
double parse_double(std::string_view cell);

std::vector<std::string> split_csv_line(std::string_view line);

/// Numeric matrix CSV without header.
void write_matrix_csv(std::ostream& out, const Matrix<double>& m);
void write_matrix_csv(const std::string& path, const Matrix<double>& m);
Matrix<double> read_matrix_csv(std::istream& in);
Matrix<double> read_matrix_csv(const std::string& path);

/// p x p CSV read into a SymmetricMatrix (symmetry checked).
SymmetricMatrix<double> read_symmetric_csv(const std::string& path);

/// One integer label per line, optionally preceded by a "node,label" header.
std::vector<int> read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path, const std::vector<int>& labels);

void write_text(const std::string& path, const std::string& text);

} // namespace structnet::io
