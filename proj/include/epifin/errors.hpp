#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace epifin {

// Base of every model and I/O error. kind() is the stable, machine-parseable
// name printed by the CLI on a single stderr line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept = 0;
};

#define EPIFIN_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                             \
   public:                                                                \
    using Error::Error;                                                   \
    std::string_view kind() const noexcept override { return #Name; }    \
  }

// network
EPIFIN_DEFINE_ERROR(DimensionError);
EPIFIN_DEFINE_ERROR(EntryRangeError);
EPIFIN_DEFINE_ERROR(ZeroMatrixError);
EPIFIN_DEFINE_ERROR(HorizonError);
EPIFIN_DEFINE_ERROR(OverflowError);

// gossip
EPIFIN_DEFINE_ERROR(ParamRangeError);

// sir
EPIFIN_DEFINE_ERROR(StepSizeError);
EPIFIN_DEFINE_ERROR(ConservationError);
EPIFIN_DEFINE_ERROR(DegenerateParamsError);
EPIFIN_DEFINE_ERROR(EndemicUndefinedError);
EPIFIN_DEFINE_ERROR(BracketError);

// reaction-diffusion
EPIFIN_DEFINE_ERROR(StabilityError);
EPIFIN_DEFINE_ERROR(NonFiniteError);
EPIFIN_DEFINE_ERROR(NoCrossingError);
EPIFIN_DEFINE_ERROR(StiffnessError);

// fund data
EPIFIN_DEFINE_ERROR(SchemaError);
EPIFIN_DEFINE_ERROR(UnknownFieldError);

// front end
EPIFIN_DEFINE_ERROR(UsageError);
EPIFIN_DEFINE_ERROR(IoError);

#undef EPIFIN_DEFINE_ERROR

// Power iteration gave up. Carries the best iterate seen so callers can
// still inspect it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double eigenvalue, std::vector<double> vector,
                   double residual, std::size_t iterations)
      : Error(what),
        best_eigenvalue(eigenvalue),
        best_vector(std::move(vector)),
        best_residual(residual),
        iterations(iterations) {}
  std::string_view kind() const noexcept override { return "ConvergenceError"; }

  double best_eigenvalue;
  std::vector<double> best_vector;
  double best_residual;
  std::size_t iterations;
};

// The chain has more than one closed communicating class.
class ReducibleChainError : public Error {
 public:
  ReducibleChainError(const std::string& what, std::vector<std::vector<int>> classes)
      : Error(what), closed_classes(std::move(classes)) {}
  std::string_view kind() const noexcept override { return "ReducibleChainError"; }

  std::vector<std::vector<int>> closed_classes;
};

// A fund CSV row failed validation. row is 1-based over data rows (the
// header is row 0).
class RowError : public Error {
 public:
  RowError(const std::string& what, std::size_t row) : Error(what), row(row) {}
  std::string_view kind() const noexcept override { return "RowError"; }

  std::size_t row;
};

}  // namespace epifin
