#pragma once

#include <stdexcept>
#include <string>

namespace ttlab {

enum class Err {
  MalformedTrack,
  ForbiddenFace,
  ExceptionalSurface,
  TypeSumMismatch,
  NotLargeBranch,
  IncompleteChoices,
  NoLargeBranches,
  ZeroMass,
  NonPositiveBase,
  NotNormalized,
  BranchMismatch,
  InadmissibleStep,
  DepthZero,
  NotPositive,
  NoMarkedSequences,
  EmptyClass,
  CorpusTooSmall,
  NotPrimitive,
  AnchorMissing,
  EmptyRestriction,
  NoSignChange,
  NoConvergence,
  DegenerateCell,
  DimensionTooHigh,
  GridTooFine,
  NotMeanZero,
  NonPositiveSeries,
  Overflow,
  IoError,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

}  // namespace ttlab
