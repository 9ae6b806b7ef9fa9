#include "ttlab/error.hpp"

namespace ttlab {

const char* err_name(Err e) {
  switch (e) {
    case Err::MalformedTrack: return "MalformedTrack";
    case Err::ForbiddenFace: return "ForbiddenFace";
    case Err::ExceptionalSurface: return "ExceptionalSurface";
    case Err::TypeSumMismatch: return "TypeSumMismatch";
    case Err::NotLargeBranch: return "NotLargeBranch";
    case Err::IncompleteChoices: return "IncompleteChoices";
    case Err::NoLargeBranches: return "NoLargeBranches";
    case Err::ZeroMass: return "ZeroMass";
    case Err::NonPositiveBase: return "NonPositiveBase";
    case Err::NotNormalized: return "NotNormalized";
    case Err::BranchMismatch: return "BranchMismatch";
    case Err::InadmissibleStep: return "InadmissibleStep";
    case Err::DepthZero: return "DepthZero";
    case Err::NotPositive: return "NotPositive";
    case Err::NoMarkedSequences: return "NoMarkedSequences";
    case Err::EmptyClass: return "EmptyClass";
    case Err::CorpusTooSmall: return "CorpusTooSmall";
    case Err::NotPrimitive: return "NotPrimitive";
    case Err::AnchorMissing: return "AnchorMissing";
    case Err::EmptyRestriction: return "EmptyRestriction";
    case Err::NoSignChange: return "NoSignChange";
    case Err::NoConvergence: return "NoConvergence";
    case Err::DegenerateCell: return "DegenerateCell";
    case Err::DimensionTooHigh: return "DimensionTooHigh";
    case Err::GridTooFine: return "GridTooFine";
    case Err::NotMeanZero: return "NotMeanZero";
    case Err::NonPositiveSeries: return "NonPositiveSeries";
    case Err::Overflow: return "Overflow";
    case Err::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ttlab
