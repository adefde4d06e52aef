#pragma once

#include <stdexcept>
#include <string>

namespace leviprobe {

// All failures surface as typed exceptions rooted here so callers can map
// them onto verdicts / exit codes without string matching.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched variable count or truncation degree between operands.
struct ShapeError : Error {
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Operation applied outside its mathematical domain (e.g. composing at a
// point that is not the base point).
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Degenerate linear data: singular matrix, vanishing gradient, vanishing
// linear part in an implicit solve.
struct SingularityError : Error {
  explicit SingularityError(const std::string& msg) : Error(msg) {}
};

// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Requested check cannot run with the data at hand (e.g. no numeric
// evaluator available for sampling).
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// An integrand sample landed on the branch cut of log.
struct BranchError : Error {
  explicit BranchError(const std::string& msg) : Error(msg) {}
};

// Jet degree too low for the requested order test.
struct InsufficientDegreeError : Error {
  explicit InsufficientDegreeError(const std::string& msg) : Error(msg) {}
};

// A flow or sample left the validated chart neighborhood.
struct DomainExceededError : Error {
  explicit DomainExceededError(const std::string& msg) : Error(msg) {}
};

// Subgroup data violating the reality condition of the Heisenberg model.
struct InvalidSubgroupError : Error {
  explicit InvalidSubgroupError(const std::string& msg) : Error(msg) {}
};

}  // namespace leviprobe
