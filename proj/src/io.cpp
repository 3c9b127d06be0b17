#include "godec/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "godec/error.hpp"

namespace godec {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'G', 'D', 'M', 'X'};
constexpr std::size_t kHeaderBytes = 4 + 8 + 8;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::uint64_t load_u64(const char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

void store_u64(std::string& out, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

// Next whitespace-delimited header token of a PGM, skipping '#' comments.
std::string_view pgm_token(std::string_view data, std::size_t& pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') ++pos;
  return data.substr(start, pos - start);
}

std::size_t pgm_number(std::string_view data, std::size_t& pos, const fs::path& p, const char* what) {
  const std::string_view tok = pgm_token(data, pos);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError(p.string() + ": bad PGM " + what);
  }
  return v;
}

}  // namespace

MatrixFormat parse_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::csv;
  if (name == "f64le") return MatrixFormat::f64le;
  throw ParameterError("unknown matrix format '" + std::string(name) + "' (expected csv or f64le)");
}

std::string_view format_extension(MatrixFormat f) { return f == MatrixFormat::csv ? ".csv" : ".f64le"; }

MatrixFormat format_for_path(const fs::path& p) {
  const std::string ext = p.extension().string();
  return (ext == ".f64le" || ext == ".bin") ? MatrixFormat::f64le : MatrixFormat::csv;
}

DenseMatrix parse_csv(std::string_view text) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool first_content = true;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<double> row;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    row.clear();
    bool numeric = true;
    std::size_t fpos = 0;
    while (true) {
      const std::size_t comma = line.find(',', fpos);
      const std::string_view field = line.substr(fpos, comma == std::string_view::npos ? std::string_view::npos : comma - fpos);
      double v = 0.0;
      if (!parse_number(field, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      fpos = comma + 1;
    }
    if (!numeric) {
      if (first_content) {
        first_content = false;
        continue;  // header
      }
      throw FormatError("csv line " + std::to_string(line_no) + ": unparseable field");
    }
    first_content = false;
    for (double v : row) {
      if (!std::isfinite(v)) throw FormatError("csv line " + std::to_string(line_no) + ": non-finite value");
    }
    if (rows == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw FormatError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(cols) + " fields, got " +
                        std::to_string(row.size()));
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw FormatError("csv: no data rows");
  return {rows, cols, std::move(data)};
}

std::string to_csv(const DenseMatrix& m) {
  std::string out;
  out.reserve(m.size() * 24);
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j > 0) out += ',';
      out.append(buf, static_cast<std::size_t>(len));
    }
    out += '\n';
  }
  return out;
}

DenseMatrix parse_f64le(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw FormatError("f64le: truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("f64le: bad magic at byte 0");
  const std::uint64_t rows = load_u64(bytes.data() + 4);
  const std::uint64_t cols = load_u64(bytes.data() + 12);
  if (cols != 0 && rows > (bytes.size() - kHeaderBytes) / 8 / cols) {
    throw FormatError("f64le: " + std::to_string(rows) + "x" + std::to_string(cols) + " needs more than the " +
                      std::to_string(bytes.size()) + " bytes present");
  }
  const std::size_t count = rows * cols;
  if (bytes.size() != kHeaderBytes + 8 * count) {
    throw FormatError("f64le: expected " + std::to_string(kHeaderBytes + 8 * count) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t bits = load_u64(bytes.data() + kHeaderBytes + 8 * i);
    data[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(data[i])) {
      throw FormatError("f64le: non-finite value at byte " + std::to_string(kHeaderBytes + 8 * i));
    }
  }
  return {rows, cols, std::move(data)};
}

std::string to_f64le(const DenseMatrix& m) {
  std::string out(kMagic, 4);
  out.reserve(kHeaderBytes + 8 * m.size());
  store_u64(out, m.rows());
  store_u64(out, m.cols());
  for (double v : m.data()) store_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError(p.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& p, std::string_view bytes) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(tmp.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw FormatError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, p);
}

DenseMatrix load_matrix(const fs::path& p, MatrixFormat f) {
  const std::string bytes = read_file(p);
  try {
    return f == MatrixFormat::csv ? parse_csv(bytes) : parse_f64le(bytes);
  } catch (const FormatError& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

void save_matrix(const fs::path& p, const DenseMatrix& m, MatrixFormat f) {
  write_file_atomic(p, f == MatrixFormat::csv ? to_csv(m) : to_f64le(m));
}

GrayImage read_pgm(const fs::path& p) {
  const std::string data = read_file(p);
  std::size_t pos = 0;
  if (pgm_token(data, pos) != "P5") throw FormatError(p.string() + ": not a binary PGM (P5)");
  GrayImage img;
  img.width = pgm_number(data, pos, p, "width");
  img.height = pgm_number(data, pos, p, "height");
  const std::size_t maxval = pgm_number(data, pos, p, "maxval");
  if (maxval == 0 || maxval > 255) throw FormatError(p.string() + ": maxval must be in [1, 255]");
  if (img.width == 0 || img.height == 0) throw FormatError(p.string() + ": zero-sized image");
  ++pos;  // single whitespace before the raster
  const std::size_t count = img.width * img.height;
  if (pos > data.size() || data.size() - pos < count) throw FormatError(p.string() + ": truncated raster");
  img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                    data.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

void write_pgm(const fs::path& p, const GrayImage& img) {
  if (img.pixels.size() != img.width * img.height) throw DimensionError("write_pgm: pixel count mismatch");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(img.pixels.begin(), img.pixels.end());
  write_file_atomic(p, out);
}

DenseMatrix load_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  if (files.empty()) throw FormatError(dir.string() + ": no .pgm frames");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> data;
  for (std::size_t t = 0; t < files.size(); ++t) {
    const GrayImage img = read_pgm(files[t]);
    if (t == 0) {
      width = img.width;
      height = img.height;
      data.reserve(files.size() * width * height);
    } else if (img.width != width || img.height != height) {
      throw FormatError(files[t].string() + ": frame is " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + ", expected " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    for (std::uint8_t px : img.pixels) data.push_back(static_cast<double>(px) / 255.0);
  }
  return {files.size(), width * height, std::move(data)};
}

}  // namespace godec
