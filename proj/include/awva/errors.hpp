#pragma once

#include <stdexcept>
#include <string>

namespace awva {

/// Broad failure categories, mapped to CLI exit codes (0 ok, 2 config,
/// 3 numeric, 4 io).
enum class ErrorKind { config, numeric, io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Pre- and post-selection are (numerically) orthogonal; the weak value
/// diverges and the post-selected ensemble is empty.
struct OrthogonalStatesError : Error {
  explicit OrthogonalStatesError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct SingularDenominator : Error {
  explicit SingularDenominator(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct ZeroCoupling : Error {
  explicit ZeroCoupling(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct ZeroDelay : Error {
  explicit ZeroDelay(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct NonpositiveInformation : Error {
  explicit NonpositiveInformation(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct DegenerateModel : Error {
  explicit DegenerateModel(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct InsufficientStatistics : Error {
  explicit InsufficientStatistics(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct FlatLikelihood : Error {
  explicit FlatLikelihood(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct IoFailure : Error {
  explicit IoFailure(const std::string& what) : Error(ErrorKind::io, what) {}
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::numeric: return 3;
    case ErrorKind::io: return 4;
  }
  return 3;
}

}  // namespace awva
