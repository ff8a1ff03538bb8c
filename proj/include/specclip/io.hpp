#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "specclip/matrix.hpp"

namespace specclip::io {

enum class MatrixFormat { Csv, Binary };

/// Canonical decimal form used in every CSV the toolkit writes: 17 significant
/// digits, so a value survives a text round trip exactly.
std::string format_double(double x);

void write_csv(std::ostream& out, const Matrix& m);
Matrix read_csv(std::istream& in);

/// Magic "SPCMAT01", u64 rows, u64 cols, then row-major f64, all little-endian.
void write_binary(std::ostream& out, const Matrix& m);
Matrix read_binary(std::istream& in);

/// Picks the format from the leading magic bytes.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format);

/// Rows of already-formatted cells, joined with ',' and '\n'.
void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

}  // namespace specclip::io
