#pragma once

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "s3a/error.hpp"
#include "s3a/matrix.hpp"
#include "s3a/rng.hpp"

namespace s3a::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double scale = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = scale * rng.normal();
  return m;
}

inline double rel_close(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("s3a_test_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace s3a::test

#define CHECK_ERRC(expr, errc)                                    \
  do {                                                            \
    bool thrown_ = false;                                         \
    try {                                                         \
      (void)(expr);                                               \
    } catch (const ::s3a::Error& e_) {                            \
      thrown_ = true;                                             \
      CHECK_MESSAGE(e_.code() == (errc), ::s3a::errc_name(e_.code())); \
    }                                                             \
    CHECK_MESSAGE(thrown_, "expected " #errc);                    \
  } while (0)
