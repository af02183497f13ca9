#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fsp {

enum class ErrorKind {
  SchemaError,
  InvalidStructure,
  UnknownName,
  SizeCapExceeded,
  LengthMismatch,
  EmptyInterior,
  NotSymmetric,
  NonpositiveMass,
  IndexOutOfRange,
  SolverFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Limits that keep the dense O(|V|^3) solves tractable.
struct SizeCaps {
  std::size_t max_vertices = 20000;
  std::size_t max_words = 100000;
  std::size_t max_dense = 4000;

  /// Defaults, with FRACTAL_SPECTRA_CAP (if set) overriding the vertex and
  /// dense caps.
  static SizeCaps from_environment();
};

}  // namespace fsp
