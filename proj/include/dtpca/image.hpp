#pragma once

// 8-bit grayscale PGM ingestion (P5 binary and P2 ASCII, maxval 255).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "dtpca/detail/atomic_file.hpp"
#include "dtpca/error.hpp"

namespace dtpca {

/// Grayscale image flattened row-major, each pixel divided by 255.
struct ImageVector {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool same_shape(const ImageVector& other) const noexcept {
    return width == other.width && height == other.height;
  }
};

namespace detail {

class PgmReader {
 public:
  PgmReader(const std::vector<unsigned char>& bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  ImageVector read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || (bytes_[1] != '5' && bytes_[1] != '2')) {
      fail(ErrorCategory::data, name_ + ": unsupported magic number (expected P5 or P2)");
    }
    const bool binary = bytes_[1] == '5';
    pos_ = 2;
    const std::size_t width = header_number("width");
    const std::size_t height = header_number("height");
    const std::size_t maxval = header_number("maxval");
    if (width == 0 || height == 0) fail(ErrorCategory::data, name_ + ": zero image dimension");
    if (maxval != 255) {
      fail(ErrorCategory::data, name_ + ": maxval " + std::to_string(maxval) + " is not 255");
    }

    ImageVector img;
    img.width = width;
    img.height = height;
    const std::size_t count = width * height;
    img.values.reserve(count);

    if (binary) {
      // exactly one whitespace byte separates maxval from the raster
      if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
        fail(ErrorCategory::data, name_ + ": truncated pixel data");
      }
      ++pos_;
      if (bytes_.size() - pos_ < count) {
        fail(ErrorCategory::data, name_ + ": truncated pixel data (expected " +
                                      std::to_string(count) + " bytes, found " +
                                      std::to_string(bytes_.size() - pos_) + ")");
      }
      for (std::size_t i = 0; i < count; ++i) img.values.push_back(bytes_[pos_ + i] / 255.0);
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) fail(ErrorCategory::data, name_ + ": truncated pixel data");
        const std::size_t v = digits("pixel");
        if (v > 255) fail(ErrorCategory::data, name_ + ": pixel value exceeds maxval");
        img.values.push_back(static_cast<double>(v) / 255.0);
      }
    }
    return img;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t header_number(const char* what) {
    skip_space_and_comments();
    return digits(what);
  }

  std::size_t digits(const char* what) {
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorCategory::data, name_ + ": malformed header field '" + what + "'");
    }
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (v > (std::size_t{1} << 31)) fail(ErrorCategory::data, name_ + ": header value too large");
      ++pos_;
    }
    return v;
  }

  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

inline std::vector<unsigned char> read_all_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::data, path.string() + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Parses an in-memory PGM; `name` is used in error messages only.
inline ImageVector parse_pgm(const std::vector<unsigned char>& bytes, const std::string& name = "<memory>") {
  return detail::PgmReader(bytes, name).read();
}

inline ImageVector load_image(const std::filesystem::path& path) {
  return parse_pgm(detail::read_all_bytes(path), path.string());
}

/// Encodes as binary P5. Values are clamped to [0,1] and rounded to the nearest level.
inline std::string encode_pgm(const ImageVector& img) {
  std::ostringstream out;
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  std::string raster(img.values.size(), '\0');
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    const double level = std::round(std::clamp(img.values[i], 0.0, 1.0) * 255.0);
    raster[i] = static_cast<char>(static_cast<unsigned char>(level));
  }
  out << raster;
  return out.str();
}

inline void write_pgm(const ImageVector& img, const std::filesystem::path& path) {
  detail::write_file_atomically(path, encode_pgm(img));
}

}  // namespace dtpca
