#pragma once

#include <stdexcept>
#include <string>

namespace rotolab {

/// Failure categories. Each maps to one CLI exit code.
enum class ErrorKind {
    Config,            // unknown family/param, bad bracket, unreadable input
    NumericBlowup,     // NaN/inf while iterating
    NotPeriodic,       // residual of a claimed periodic point too large
    NonIsolated,       // continuum of fixed points (identity-like maps)
    InvalidBracket,    // same membership state at both ends
    NoSupport,         // query point deep inside the hull
    RadiusTooSmall,    // index circle touches a zero of F
    IncompleteCensus,  // root count unstable under grid refinement
    DegenerateOverlap, // collinear overlap between polylines
    Mismatch,          // event not lying on the supplied arcs
    NotFound,          // requested event/translate not present in scan window
    ScanAborted,       // tangency scan could not rebuild objects or exceeded budget
    Hypothesis,        // hypothesis violated (lefschetz, lemma 0, translate bound)
    Schema             // artifact file with unexpected layout
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

/// 0 success, 2 config error, 3 numeric error, 4 hypothesis violation.
int exit_code(ErrorKind kind);

} // namespace rotolab
