#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgeo {

enum class Errc {
  NotHermitian,
  NotUnitTrace,
  NotPSD,
  DomainError,
  OutOfBall,
  WrongLevel,
  WrongLength,
  NotFaithful,
  SecondArgNotFaithful,
  SiteIsPure,
  NotPure,
  DimMismatch,
  NotOnSphere,
  NotTracePreserving,
  NotCompletable,
  EmptyMesh,
  SubsolverFailed,
  TooManyBoundary,
  Degenerate,
  DimTooSmall,
  InvalidArgument,
  Unsupported,
  Parse,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotUnitTrace: return "NotUnitTrace";
    case Errc::NotPSD: return "NotPSD";
    case Errc::DomainError: return "DomainError";
    case Errc::OutOfBall: return "OutOfBall";
    case Errc::WrongLevel: return "WrongLevel";
    case Errc::WrongLength: return "WrongLength";
    case Errc::NotFaithful: return "NotFaithful";
    case Errc::SecondArgNotFaithful: return "SecondArgNotFaithful";
    case Errc::SiteIsPure: return "SiteIsPure";
    case Errc::NotPure: return "NotPure";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::NotOnSphere: return "NotOnSphere";
    case Errc::NotTracePreserving: return "NotTracePreserving";
    case Errc::NotCompletable: return "NotCompletable";
    case Errc::EmptyMesh: return "EmptyMesh";
    case Errc::SubsolverFailed: return "SubsolverFailed";
    case Errc::TooManyBoundary: return "TooManyBoundary";
    case Errc::Degenerate: return "Degenerate";
    case Errc::DimTooSmall: return "DimTooSmall";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Unsupported: return "Unsupported";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qgeo
