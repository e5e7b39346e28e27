#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace broadcastlab {

enum class ErrorKind {
  invalid_input,        // malformed arguments or schema violations
  dimension_mismatch,
  invariant_violation,  // a constructor rejected its input
  cap_exceeded,
  not_commuting,
  no_spectral_gap,
  axiom_violation,
  numerical_failure,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class NotCommutingError : public Error {
 public:
  NotCommutingError(std::size_t first, std::size_t second, double norm);
  std::pair<std::size_t, std::size_t> pair() const noexcept { return pair_; }
  double commutator_norm() const noexcept { return norm_; }

 private:
  std::pair<std::size_t, std::size_t> pair_;
  double norm_;
};

class NoSpectralGapError : public Error {
 public:
  NoSpectralGapError(std::vector<double> ladder, double threshold);
  const std::vector<double>& singular_values() const noexcept { return ladder_; }
  double threshold() const noexcept { return threshold_; }

 private:
  std::vector<double> ladder_;
  double threshold_;
};

class AxiomViolationError : public Error {
 public:
  AxiomViolationError(std::string axiom, std::string where, double deviation);
  const std::string& axiom() const noexcept { return axiom_; }
  const std::string& where() const noexcept { return where_; }
  double deviation() const noexcept { return deviation_; }

 private:
  std::string axiom_;
  std::string where_;
  double deviation_;
};

}  // namespace broadcastlab
