#include "rotolab/error.hpp"

namespace rotolab {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::NumericBlowup: return "numeric-blowup";
    case ErrorKind::NotPeriodic: return "not-periodic";
    case ErrorKind::NonIsolated: return "non-isolated";
    case ErrorKind::InvalidBracket: return "invalid-bracket";
    case ErrorKind::NoSupport: return "no-support";
    case ErrorKind::RadiusTooSmall: return "radius-too-small";
    case ErrorKind::IncompleteCensus: return "incomplete-census";
    case ErrorKind::DegenerateOverlap: return "degenerate-overlap";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::ScanAborted: return "scan-aborted";
    case ErrorKind::Hypothesis: return "hypothesis-violation";
    case ErrorKind::Schema: return "schema";
    }
    return "unknown";
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidBracket:
    case ErrorKind::Schema:
        return 2;
    case ErrorKind::Hypothesis:
    case ErrorKind::IncompleteCensus:
    case ErrorKind::NonIsolated:
        return 4;
    default:
        return 3;
    }
}

} // namespace rotolab
