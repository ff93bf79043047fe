#pragma once

#include <stdexcept>
#include <string>

namespace prhf {

/// Base of every error raised by the library. Each derived type names one
/// failure condition so callers (and the CLI exit-code mapping) can dispatch
/// on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PRHF_DEFINE_ERROR(Name, Base)        \
  class Name : public Base {                 \
   public:                                   \
    using Base::Base;                        \
  }

PRHF_DEFINE_ERROR(InvalidSystem, Error);
PRHF_DEFINE_ERROR(SubcriticalityViolated, InvalidSystem);
PRHF_DEFINE_ERROR(BadCount, InvalidSystem);
PRHF_DEFINE_ERROR(BadOptions, Error);
PRHF_DEFINE_ERROR(BadGrid, Error);
PRHF_DEFINE_ERROR(LengthMismatch, Error);
PRHF_DEFINE_ERROR(EigFailure, Error);
PRHF_DEFINE_ERROR(NonFiniteEnergy, Error);
PRHF_DEFINE_ERROR(LowerBoundViolated, Error);
PRHF_DEFINE_ERROR(NotAdmissible, Error);
PRHF_DEFINE_ERROR(TraceMismatch, Error);
PRHF_DEFINE_ERROR(LineSearchFailure, Error);
PRHF_DEFINE_ERROR(NotConverged, Error);
PRHF_DEFINE_ERROR(DomainError, Error);
PRHF_DEFINE_ERROR(WindowTooNoisy, Error);
PRHF_DEFINE_ERROR(CertificateFailure, Error);
PRHF_DEFINE_ERROR(BoundViolated, Error);
PRHF_DEFINE_ERROR(ConfigError, Error);

#undef PRHF_DEFINE_ERROR

}  // namespace prhf
