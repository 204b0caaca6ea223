#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sparsity {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
/// 1-based port index into a vertex's incidence list.
using Port = std::uint32_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegreeExceeded : public Error {
 public:
  explicit DegreeExceeded(VertexId v)
      : Error("degree bound exceeded at vertex " + std::to_string(v)), vertex(v) {}
  VertexId vertex;
};

class BadEndpoint : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
  std::size_t line;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

class BallTooLarge : public Error {
 public:
  using Error::Error;
};

class SearchBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class FormulationMismatch : public Error {
 public:
  using Error::Error;
};

class CharacterizationMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleParams : public Error {
 public:
  using Error::Error;
};

/// The pair (k, l) of a sparsity count f(F) = k|V(F)| - l.
struct SparsityParams {
  int k = 1;
  int l = 0;

  /// True when the count induces a matroid with loop-free singletons (2k - l >= 1).
  [[nodiscard]] constexpr bool matroidal() const { return k >= 1 && l >= 0 && 2 * k - l >= 1; }

  /// Throws InvalidParams unless 2k - l >= 1.
  void require_matroidal() const {
    if (!matroidal()) {
      throw InvalidParams("sparsity parameters require k >= 1, l >= 0 and 2k - l >= 1 (got k=" +
                          std::to_string(k) + ", l=" + std::to_string(l) + ")");
    }
  }

  /// Throws InvalidParams unless k >= 1 and l >= 0.
  void require_orientable_range() const {
    if (k < 1 || l < 0) {
      throw InvalidParams("orientability parameters require k >= 1 and l >= 0");
    }
  }

  friend constexpr bool operator==(const SparsityParams&, const SparsityParams&) = default;
};

}  // namespace sparsity
