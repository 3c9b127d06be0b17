#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "godec/matrix.hpp"

namespace godec {

enum class MatrixFormat { csv, f64le };

// "csv" / "f64le"; throws ParameterError otherwise.
MatrixFormat parse_format(std::string_view name);
std::string_view format_extension(MatrixFormat f);
// Format implied by a file extension (.csv, .f64le or .bin); csv otherwise.
MatrixFormat format_for_path(const std::filesystem::path& p);

// Comma-separated rows. A first line that does not parse as numbers is a
// header and is skipped. Errors name the 1-based line.
DenseMatrix parse_csv(std::string_view text);
// One row per line, 17 significant digits.
std::string to_csv(const DenseMatrix& m);

// "GDMX", u64 rows, u64 cols, row-major doubles; all little-endian.
DenseMatrix parse_f64le(std::string_view bytes);
std::string to_f64le(const DenseMatrix& m);

DenseMatrix load_matrix(const std::filesystem::path& p, MatrixFormat f);
void save_matrix(const std::filesystem::path& p, const DenseMatrix& m, MatrixFormat f);

// Writes to a sibling temp file, then renames over `p`.
void write_file_atomic(const std::filesystem::path& p, std::string_view bytes);
std::string read_file(const std::filesystem::path& p);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

// Binary PGM (P5), maxval ≤ 255.
GrayImage read_pgm(const std::filesystem::path& p);
void write_pgm(const std::filesystem::path& p, const GrayImage& img);

// Every *.pgm in `dir`, sorted by file name; frame t becomes row t and pixel
// (i, j) column j + i·width, scaled by 1/255.
DenseMatrix load_frames(const std::filesystem::path& dir);

}  // namespace godec
