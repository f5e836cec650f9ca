#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace prs {

// Base of every error thrown by the library. `kind()` is a stable short tag
// used by the CLI for machine-parseable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed or invalid input data (files, labels, lengths).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error("data", what) {}
};

// Input for which a quantity is mathematically undefined.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error("degenerate", what) {}
};

// Dimension / width mismatch between arguments.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

// Violated precondition on an argument value.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

// Fixed-size dense row-major grid. Rows are depth (row 0 = surface), columns
// are sorted feature positions.
template <typename T, std::size_t Rows, std::size_t Cols>
struct Grid {
  static constexpr std::size_t rows = Rows;
  static constexpr std::size_t cols = Cols;

  std::array<T, Rows * Cols> cells{};

  constexpr T& operator()(std::size_t r, std::size_t c) { return cells[r * Cols + c]; }
  constexpr const T& operator()(std::size_t r, std::size_t c) const { return cells[r * Cols + c]; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

// splitmix64 finalizer; used to derive independent seeds for columns and
// repetitions from one user seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace prs
