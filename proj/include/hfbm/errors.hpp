#pragma once

#include <stdexcept>
#include <string>

namespace hfbm {

// Root of every error raised by the library. The CLI maps subclasses onto
// stable exit codes (see tools/hfbm_cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural problems: mismatched matrix sizes, empty inputs, bad arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Parameters are well-formed but violate a model constraint.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class EmbeddingNotPsd : public Error {
 public:
  EmbeddingNotPsd(double min_eigenvalue, std::size_t frequency_index)
      : Error("circulant embedding is not positive semidefinite: eigenvalue " +
              std::to_string(min_eigenvalue) + " at frequency index " +
              std::to_string(frequency_index)),
        min_eigenvalue_(min_eigenvalue),
        frequency_index_(frequency_index) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }
  std::size_t frequency_index() const noexcept { return frequency_index_; }

 private:
  double min_eigenvalue_;
  std::size_t frequency_index_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_tolerance)
      : Error(what + " (achieved tolerance " + std::to_string(achieved_tolerance) + ")"),
        achieved_(achieved_tolerance) {}
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class UnsupportedWavelet : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SeriesTooShort : public Error {
 public:
  using Error::Error;
};

// Wavelet variance or difference series that is (numerically) zero.
class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// First-order or plug-in variance that diverges because a correlation is ~0.
class InfiniteVariance : public Error {
 public:
  using Error::Error;
};

class InvalidVariance : public Error {
 public:
  using Error::Error;
};

class DegenerateCoherence : public Error {
 public:
  using Error::Error;
};

class StudyAborted : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfbm
