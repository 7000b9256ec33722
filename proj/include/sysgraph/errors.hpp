#pragma once

#include <stdexcept>
#include <string>

namespace sysgraph {

// Root of everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be read or decoded. CLI maps these to exit code 1.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Input decoded fine but violates an operation's domain. CLI exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

#define SYSGRAPH_DEFINE_ERROR(NAME, BASE)  \
  class NAME : public BASE {               \
   public:                                 \
    using BASE::BASE;                      \
  }

SYSGRAPH_DEFINE_ERROR(EmptyTraceError, ParseError);
SYSGRAPH_DEFINE_ERROR(MalformedLineError, ParseError);

SYSGRAPH_DEFINE_ERROR(UnknownClassError, DomainError);
SYSGRAPH_DEFINE_ERROR(EmptyDictionaryError, DomainError);
SYSGRAPH_DEFINE_ERROR(EmptyGraphError, DomainError);
SYSGRAPH_DEFINE_ERROR(DegenerateNormalizationError, DomainError);
SYSGRAPH_DEFINE_ERROR(NoFinitePairsError, DomainError);
SYSGRAPH_DEFINE_ERROR(TooSmallError, DomainError);
SYSGRAPH_DEFINE_ERROR(InsufficientTailError, DomainError);
SYSGRAPH_DEFINE_ERROR(DegenerateSampleError, DomainError);
SYSGRAPH_DEFINE_ERROR(MissingMetricError, DomainError);
SYSGRAPH_DEFINE_ERROR(DatasetError, DomainError);
SYSGRAPH_DEFINE_ERROR(AllSamplesDroppedError, DomainError);
SYSGRAPH_DEFINE_ERROR(DegenerateClassError, DomainError);
SYSGRAPH_DEFINE_ERROR(ClassTooSmallError, DomainError);
SYSGRAPH_DEFINE_ERROR(NoValidClassError, DomainError);
SYSGRAPH_DEFINE_ERROR(AllRoundsDiscardedError, DomainError);

#undef SYSGRAPH_DEFINE_ERROR

}  // namespace sysgraph
