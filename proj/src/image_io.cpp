#include "pd/image_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pd/io_util.hpp"

namespace pd {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

struct PgmScanner {
  const std::string& data;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < data.size()) {
      unsigned char c = static_cast<unsigned char>(data[pos]);
      if (std::isspace(c)) {
        ++pos;
      } else if (c == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  // Next whitespace-delimited token; returns false at end of input.
  bool next_token(std::string_view& token, std::size_t& offset) {
    skip_space_and_comments();
    if (pos >= data.size()) return false;
    offset = pos;
    std::size_t end = pos;
    while (end < data.size() && !std::isspace(static_cast<unsigned char>(data[end]))) ++end;
    token = std::string_view(data).substr(pos, end - pos);
    pos = end;
    return true;
  }
};

long parse_pgm_int(const std::filesystem::path& path, PgmScanner& scan, const char* what) {
  std::string_view token;
  std::size_t offset = 0;
  if (!scan.next_token(token, offset))
    fail(path, std::string("unexpected end of header, missing ") + what);
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(path, std::string("bad ") + what + " at byte offset " + std::to_string(offset));
  return value;
}

GrayImage read_pgm(const std::filesystem::path& path, bool invert) {
  std::string data = detail::read_file_bytes(path);
  PgmScanner scan{data};
  std::string_view magic;
  std::size_t offset = 0;
  if (!scan.next_token(magic, offset) || (magic != "P2" && magic != "P5"))
    fail(path, "not a PGM file (expected P2 or P5 magic)");
  bool ascii = magic == "P2";

  long width = parse_pgm_int(path, scan, "width");
  long height = parse_pgm_int(path, scan, "height");
  long maxval = parse_pgm_int(path, scan, "maxval");
  if (width < 1 || height < 1) fail(path, "width and height must be positive");
  if (maxval < 1 || maxval > 65535) fail(path, "maxval must lie in [1, 65535]");

  GrayImage img(static_cast<int>(width), static_cast<int>(height));
  const double scale = static_cast<double>(maxval);
  const std::size_t count = img.pixel_count();

  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      std::string_view token;
      std::size_t at = 0;
      if (!scan.next_token(token, at))
        fail(path, "truncated pixel data: got " + std::to_string(i) + " of " +
                       std::to_string(count) + " samples");
      long s = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), s);
      if (ec != std::errc() || ptr != token.data() + token.size() || s < 0)
        fail(path, "bad sample at byte offset " + std::to_string(at));
      if (s > maxval)
        fail(path, "sample exceeds maxval at byte offset " + std::to_string(at));
      double v = static_cast<double>(s) / scale;
      img.values[i] = invert ? 1.0 - v : v;
    }
    return img;
  }

  // P5: a single whitespace byte separates the maxval from the raster.
  if (scan.pos >= data.size() ||
      !std::isspace(static_cast<unsigned char>(data[scan.pos])))
    fail(path, "missing whitespace before binary pixel data");
  std::size_t start = scan.pos + 1;
  const int bytes_per = maxval < 256 ? 1 : 2;
  std::size_t need = count * static_cast<std::size_t>(bytes_per);
  if (data.size() - start < need)
    fail(path, "truncated pixel data at byte offset " + std::to_string(data.size()) +
                   ": need " + std::to_string(need) + " bytes after offset " +
                   std::to_string(start) + ", found " + std::to_string(data.size() - start));
  for (std::size_t i = 0; i < count; ++i) {
    long s;
    if (bytes_per == 1) {
      s = static_cast<unsigned char>(data[start + i]);
    } else {
      s = static_cast<long>(static_cast<unsigned char>(data[start + 2 * i])) * 256 +
          static_cast<unsigned char>(data[start + 2 * i + 1]);
    }
    if (s > maxval)
      fail(path, "sample exceeds maxval at byte offset " +
                     std::to_string(start + i * static_cast<std::size_t>(bytes_per)));
    double v = static_cast<double>(s) / scale;
    img.values[i] = invert ? 1.0 - v : v;
  }
  return img;
}

GrayImage read_float_csv(const std::filesystem::path& path, bool invert) {
  std::string data = detail::read_file_bytes(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_start = 0;
  int lineno = 0;
  while (line_start <= data.size()) {
    if (line_start == data.size()) break;
    std::size_t line_end = data.find('\n', line_start);
    if (line_end == std::string::npos) line_end = data.size();
    ++lineno;
    std::size_t end = line_end;
    if (end > line_start && data[end - 1] == '\r') --end;
    if (end == line_start) {  // blank lines carry no data; skip them
      line_start = line_end + 1;
      continue;
    }
    std::vector<double> row;
    std::size_t field_start = line_start;
    int field = 0;
    while (field_start <= end) {
      std::size_t comma = data.find(',', field_start);
      std::size_t field_end = (comma == std::string::npos || comma > end) ? end : comma;
      ++field;
      std::size_t a = field_start, b = field_end;
      while (a < b && (data[a] == ' ' || data[a] == '\t')) ++a;
      while (b > a && (data[b - 1] == ' ' || data[b - 1] == '\t')) --b;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(data.data() + a, data.data() + b, v);
      if (ec != std::errc() || ptr != data.data() + b)
        fail(path, "line " + std::to_string(lineno) + ", field " + std::to_string(field) +
                       ": not a number");
      if (!std::isfinite(v))
        fail(path, "line " + std::to_string(lineno) + ", field " + std::to_string(field) +
                       ": non-finite value");
      row.push_back(invert ? 1.0 - v : v);
      if (field_end == end) break;
      field_start = field_end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, "line " + std::to_string(lineno) + ": expected " +
                     std::to_string(rows.front().size()) + " fields, found " +
                     std::to_string(row.size()));
    rows.push_back(std::move(row));
    line_start = line_end + 1;
  }
  if (rows.empty() || rows.front().empty()) fail(path, "no data");

  GrayImage img(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  std::size_t i = 0;
  for (const auto& row : rows)
    for (double v : row) img.values[i++] = v;
  return img;
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path, ImageFormat format, bool invert) {
  return format == ImageFormat::kPgm ? read_pgm(path, invert) : read_float_csv(path, invert);
}

void write_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format,
                 int maxval) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("write_image: image must be non-empty");
  std::string out;
  if (format == ImageFormat::kPgm) {
    if (maxval < 1 || maxval > 65535)
      throw std::invalid_argument("write_image: maxval must lie in [1, 65535]");
    out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
          std::to_string(maxval) + "\n";
    for (double v : img.values) {
      double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      long s = std::lround(clamped * maxval);
      if (maxval < 256) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(s)));
      } else {
        out.push_back(static_cast<char>(static_cast<unsigned char>(s / 256)));
        out.push_back(static_cast<char>(static_cast<unsigned char>(s % 256)));
      }
    }
  } else {
    char buf[64];
    for (int row = 0; row < img.height; ++row) {
      for (int col = 0; col < img.width; ++col) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, img.at(row, col));
        if (ec != std::errc()) throw std::runtime_error("write_image: formatting failed");
        if (col) out.push_back(',');
        out.append(buf, ptr);
      }
      out.push_back('\n');
    }
  }
  detail::atomic_write_file(path, out);
}

}  // namespace pd
