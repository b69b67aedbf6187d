#pragma once

#include <stdexcept>
#include <string>

namespace relnorm {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A point-local degeneracy: the sample violates a standing hypothesis
// (nondegenerate metric, nonvanishing curvature, nonvanishing support) or
// the jet arithmetic broke down there.  The sampling harness catches these,
// skips the point, and records the reason string.
struct SkipPoint : Error {
    SkipPoint(std::string reason_, const std::string& msg) : Error(msg), reason(std::move(reason_)) {}
    std::string reason;
};

struct DivisionByZeroJet : SkipPoint {
    DivisionByZeroJet() : SkipPoint("division_by_zero", "jet division by a zero-valued jet") {}
};

struct DomainErrorJet : SkipPoint {
    explicit DomainErrorJet(const std::string& fn_)
        : SkipPoint("domain_error_" + fn_, "argument outside the domain of " + fn_), fn(fn_) {}
    std::string fn;
};

struct DegeneratePoint : SkipPoint {
    explicit DegeneratePoint(double det_first_)
        : SkipPoint("degenerate_point",
                    "first fundamental form is degenerate (det = " + std::to_string(det_first_) + ")"),
          det_first(det_first_) {}
    double det_first;
};

struct FlatPoint : SkipPoint {
    explicit FlatPoint(double ratio_)
        : SkipPoint("flat_point",
                    "Gauss-Kronecker curvature vanishes (|det II|/det I = " + std::to_string(ratio_) + ")"),
          ratio(ratio_) {}
    double ratio;
};

struct SingularMetric : SkipPoint {
    SingularMetric() : SkipPoint("singular_metric", "matrix is not invertible at the point") {}
};

struct IllConditioned : SkipPoint {
    explicit IllConditioned(double residual_)
        : SkipPoint("ill_conditioned",
                    "matrix inverse residual exceeds the guard (" + std::to_string(residual_) + ")"),
          residual(residual_) {}
    double residual;
};

struct ZeroSupport : SkipPoint {
    explicit ZeroSupport(double value_)
        : SkipPoint("zero_support", "support function vanishes at the point (" + std::to_string(value_) + ")"),
          value(value_) {}
    double value;
};

struct TangentSolveFailed : SkipPoint {
    explicit TangentSolveFailed(double residual_)
        : SkipPoint("tangent_solve_failed",
                    "derivative of the normalization has a non-tangential part (" + std::to_string(residual_) + ")"),
          residual(residual_) {}
    double residual;
};

struct NotANormalization : SkipPoint {
    NotANormalization() : SkipPoint("not_a_normalization", "combined support function vanishes at the point") {}
};

// K referenced in an expression but no curvature jet was supplied.
struct MissingBuiltin : Error {
    MissingBuiltin() : Error("expression references K but no curvature jet was supplied") {}
};

// Source-located diagnostics from the surface-description front end.
struct ParseError : Error {
    ParseError(int line_, int col_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ", col " + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
    int line, col;
};

struct IllegalCharacter : ParseError {
    IllegalCharacter(int line_, int col_, char c)
        : ParseError(line_, col_, std::string("illegal character '") + c + "'") {}
};

struct SyntaxError : ParseError {
    SyntaxError(int line_, int col_, const std::string& expected_)
        : ParseError(line_, col_, "expected " + expected_), expected(expected_) {}
    std::string expected;
};

struct DuplicateKey : ParseError {
    DuplicateKey(int line_, int col_, const std::string& key_)
        : ParseError(line_, col_, "duplicate key '" + key_ + "'"), key(key_) {}
    std::string key;
};

struct MissingKey : Error {
    explicit MissingKey(const std::string& key_) : Error("missing key '" + key_ + "'"), key(key_) {}
    std::string key;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& rule_) : Error("validation failed: " + rule_), rule(rule_) {}
    std::string rule;
};

// Finite-difference stencil would step outside the declared domain.
struct MarginError : Error {
    MarginError() : Error("point is too close to the domain boundary for the finite-difference stencil") {}
};

struct AllSamplesSkipped : Error {
    AllSamplesSkipped() : Error("every sample point was skipped by a degeneracy guard") {}
};

struct IoError : Error {
    explicit IoError(const std::string& path_) : Error("cannot write report to '" + path_ + "'"), path(path_) {}
    std::string path;
};

} // namespace relnorm
