#include "circdiff/error.hpp"

namespace circdiff {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::TwoSidedAtBreakpoint: return "TwoSidedAtBreakpoint";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NotBracketed: return "NotBracketed";
    case Errc::TieBreak: return "TieBreak";
    case Errc::NearCollision: return "NearCollision";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::RatioMismatch: return "RatioMismatch";
    case Errc::OrderMismatch: return "OrderMismatch";
    case Errc::CertificateFailed: return "CertificateFailed";
    case Errc::WindowsOverlap: return "WindowsOverlap";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::EpsTooLarge: return "EpsTooLarge";
    case Errc::Infeasible: return "Infeasible";
    case Errc::ImageMismatch: return "ImageMismatch";
    case Errc::IteratesOverlap: return "IteratesOverlap";
    case Errc::NotAdapted: return "NotAdapted";
    case Errc::TailNotSmall: return "TailNotSmall";
    case Errc::NotWandering: return "NotWandering";
    case Errc::InfeasibleProfile: return "InfeasibleProfile";
    case Errc::MassOverflow: return "MassOverflow";
    case Errc::NoWanderingDetected: return "NoWanderingDetected";
    case Errc::RotationMismatch: return "RotationMismatch";
    case Errc::BudgetExhausted: return "BudgetExhausted";
  }
  return "UnknownError";
}

}  // namespace circdiff
