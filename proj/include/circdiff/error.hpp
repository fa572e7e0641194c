#pragma once

#include <stdexcept>
#include <string>

namespace circdiff {

enum class Errc {
  InvalidInput,
  TwoSidedAtBreakpoint,
  NoConvergence,
  NotBracketed,
  TieBreak,
  NearCollision,
  LengthMismatch,
  RatioMismatch,
  OrderMismatch,
  CertificateFailed,
  WindowsOverlap,
  PreconditionFailed,
  EpsTooLarge,
  Infeasible,
  ImageMismatch,
  IteratesOverlap,
  NotAdapted,
  TailNotSmall,
  NotWandering,
  InfeasibleProfile,
  MassOverflow,
  NoWanderingDetected,
  RotationMismatch,
  BudgetExhausted,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// plan_ratio_path / perturb_to_ratios failure carrying the minimal wandering
// time that would make the request attainable.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, long needed_w)
      : Error(Errc::Infeasible, what), needed_w_(needed_w) {}
  long needed_w() const { return needed_w_; }

 private:
  long needed_w_;
};

}  // namespace circdiff
