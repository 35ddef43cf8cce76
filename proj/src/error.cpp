#include "udf/error.hpp"

namespace udf {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NotOnBoundary: return "NotOnBoundary";
    case Errc::NotStrictlyConvex: return "NotStrictlyConvex";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::BisectionFailure: return "BisectionFailure";
    case Errc::SeedExhausted: return "SeedExhausted";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ApSearchFailed: return "ApSearchFailed";
    case Errc::UnitCertificateFailed: return "UnitCertificateFailed";
    case Errc::Overflow: return "Overflow";
    case Errc::TooLarge: return "TooLarge";
    case Errc::OffsetExhausted: return "OffsetExhausted";
    case Errc::SegmentTooShort: return "SegmentTooShort";
    case Errc::HUnderflow: return "HUnderflow";
    case Errc::RootLost: return "RootLost";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc c, const std::string& what)
    : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}

void fail(Errc c, const std::string& what) { throw Error(c, what); }

}  // namespace udf
