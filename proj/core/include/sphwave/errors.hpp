#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sphwave {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPHWAVE_DEFINE_ERROR(Name)      \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  };

SPHWAVE_DEFINE_ERROR(DomainError)
SPHWAVE_DEFINE_ERROR(ValidationError)
SPHWAVE_DEFINE_ERROR(LandmarkNotFound)
SPHWAVE_DEFINE_ERROR(RootNotBracketed)
SPHWAVE_DEFINE_ERROR(SonicSingularity)
SPHWAVE_DEFINE_ERROR(DegenerateParametrization)
SPHWAVE_DEFINE_ERROR(StepFailure)
SPHWAVE_DEFINE_ERROR(NoExit)
SPHWAVE_DEFINE_ERROR(InvalidChord)
SPHWAVE_DEFINE_ERROR(NoRoot)
SPHWAVE_DEFINE_ERROR(EmptyFamily)
SPHWAVE_DEFINE_ERROR(NoSignChange)
SPHWAVE_DEFINE_ERROR(WindowEmpty)
SPHWAVE_DEFINE_ERROR(BracketInvalid)
SPHWAVE_DEFINE_ERROR(ConfigError)

#undef SPHWAVE_DEFINE_ERROR

// Construction failure; carries the trace of terminal events and decisions.
class ConstructionFailed : public Error {
 public:
  ConstructionFailed(const std::string& what, std::vector<std::string> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

}  // namespace sphwave
