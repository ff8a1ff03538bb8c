#include "specclip/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "specclip/error.hpp"

namespace specclip::io {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'P', 'C', 'M', 'A', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary matrix I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) fail(Errc::ParseError, "truncated binary matrix");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // Shortest text that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == begin || *end != '\0') {
        fail(Errc::ParseError, "bad CSV cell '" + cell + "' on row " + std::to_string(rows + 1));
      }
      data.push_back(v);
      ++count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) cols = count;
    else if (count != cols) fail(Errc::ParseError, "ragged CSV row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows == 0) fail(Errc::ParseError, "empty CSV matrix");
  return Matrix(rows, cols, std::move(data));
}

void write_binary(std::ostream& out, const Matrix& m) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, m.rows());
  put<std::uint64_t>(out, m.cols());
  for (double v : m.values()) put<double>(out, v);
}

Matrix read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    fail(Errc::ParseError, "missing SPCMAT01 magic");
  }
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows == 0 || cols == 0 || rows > (1ull << 32) || cols > (1ull << 32)) {
    fail(Errc::ParseError, "implausible binary matrix dimensions");
  }
  std::vector<double> data(rows * cols);
  for (double& v : data) v = get<double>(in);
  return Matrix(rows, cols, std::move(data));
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 8 && head == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in) : read_csv(in);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  if (format == MatrixFormat::Binary) write_binary(out, m);
  else write_csv(out, m);
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << cells[k];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

}  // namespace specclip::io
