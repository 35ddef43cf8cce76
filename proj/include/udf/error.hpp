#pragma once

#include <stdexcept>
#include <string>

namespace udf {

enum class Errc {
  NonFinite,
  ZeroVector,
  NotOnBoundary,
  NotStrictlyConvex,
  OutOfRange,
  BisectionFailure,
  SeedExhausted,
  NoConvergence,
  ApSearchFailed,
  UnitCertificateFailed,
  Overflow,
  TooLarge,
  OffsetExhausted,
  SegmentTooShort,
  HUnderflow,
  RootLost,
  InvalidArgument,
  ParseError,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc c, const std::string& what);

}  // namespace udf
