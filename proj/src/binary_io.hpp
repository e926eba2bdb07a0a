#pragma once

// Little-endian byte encoding shared by the feature and model containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "s3a/error.hpp"
#include "s3a/matrix.hpp"

namespace s3a::detail {

class ByteWriter {
 public:
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }

  /// Two u32 dims then the row-major payload.
  void matrix(const Matrix& m) {
    u32(checked_dim(m.rows()));
    u32(checked_dim(m.cols()));
    for (double v : m.data()) f64(v);
  }

  static std::uint32_t checked_dim(std::size_t d) {
    if (d > UINT32_MAX) {
      throw Error(Errc::DimOverflow, "dimension " + std::to_string(d) + " does not fit in u32");
    }
    return static_cast<std::uint32_t>(d);
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  /// Reads a payload of rows x cols doubles after the dims have been read.
  Matrix payload(std::uint32_t rows, std::uint32_t cols) {
    const auto count = static_cast<std::uint64_t>(rows) * cols;
    if (count > (UINT64_MAX / 8) || count > SIZE_MAX / sizeof(double)) {
      throw Error(Errc::DimOverflow, "payload " + std::to_string(rows) + "x" +
                                         std::to_string(cols) + " overflows the address space");
    }
    need(static_cast<std::size_t>(count * 8));
    std::vector<double> values(static_cast<std::size_t>(count));
    for (auto& v : values) v = f64();
    return Matrix(rows, cols, std::move(values));
  }

  Matrix matrix() {
    const auto rows = u32();
    const auto cols = u32();
    return payload(rows, cols);
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw TruncatedFileError(data_.size(), "file truncated at byte " +
                                                 std::to_string(data_.size()) + " while reading " +
                                                 std::to_string(n) + " bytes at offset " +
                                                 std::to_string(pos_));
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace s3a::detail
