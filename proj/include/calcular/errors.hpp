#pragma once

#include <stdexcept>
#include <string>

namespace calcular {

// Coarse failure category; the CLI maps these onto process exit codes.
enum class ErrorKind {
    schema,       // malformed input documents
    math_domain,  // precondition violations on mathematical objects
    solver,       // iteration failed to converge / problem infeasible
    internal,     // should-not-happen
};

enum class Err {
    // matrix-core
    NotHermitian,
    NoConvergence,
    NotPSD,
    DimensionMismatch,
    SingularMatrix,
    InvalidMatrix,
    // function-space
    OutsideDomain,
    SingularResolvent,
    UnsupportedVariant,
    WrongDimension,
    // tuple-calculus
    NotCommuting,
    SpectrumOutsideDomain,
    SingularGram,
    DuplicatePoints,
    // kernel / realization
    CertificateInvalid,
    RankDeficiencyUnresolvable,
    NotInClass,
    UnsupportedDimension,
    // sdp / oracle
    Infeasible,
    Diverged,
    NoFeasibleSample,
    // cli
    SchemaError,
    ValueError,
    Internal,
};

inline const char* err_name(Err e) {
    switch (e) {
        case Err::NotHermitian: return "NotHermitian";
        case Err::NoConvergence: return "NoConvergence";
        case Err::NotPSD: return "NotPSD";
        case Err::DimensionMismatch: return "DimensionMismatch";
        case Err::SingularMatrix: return "SingularMatrix";
        case Err::InvalidMatrix: return "InvalidMatrix";
        case Err::OutsideDomain: return "OutsideDomain";
        case Err::SingularResolvent: return "SingularResolvent";
        case Err::UnsupportedVariant: return "UnsupportedVariant";
        case Err::WrongDimension: return "WrongDimension";
        case Err::NotCommuting: return "NotCommuting";
        case Err::SpectrumOutsideDomain: return "SpectrumOutsideDomain";
        case Err::SingularGram: return "SingularGram";
        case Err::DuplicatePoints: return "DuplicatePoints";
        case Err::CertificateInvalid: return "CertificateInvalid";
        case Err::RankDeficiencyUnresolvable: return "RankDeficiencyUnresolvable";
        case Err::NotInClass: return "NotInClass";
        case Err::UnsupportedDimension: return "UnsupportedDimension";
        case Err::Infeasible: return "Infeasible";
        case Err::Diverged: return "Diverged";
        case Err::NoFeasibleSample: return "NoFeasibleSample";
        case Err::SchemaError: return "SchemaError";
        case Err::ValueError: return "ValueError";
        case Err::Internal: return "Internal";
    }
    return "Unknown";
}

inline ErrorKind err_kind(Err e) {
    switch (e) {
        case Err::SchemaError:
        case Err::ValueError:
            return ErrorKind::schema;
        case Err::NoConvergence:
        case Err::Infeasible:
        case Err::Diverged:
        case Err::NoFeasibleSample:
            return ErrorKind::solver;
        case Err::Internal:
            return ErrorKind::internal;
        default:
            return ErrorKind::math_domain;
    }
}

class Error : public std::runtime_error {
public:
    Error(Err code, std::string message)
        : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}

    Err code() const { return code_; }
    ErrorKind kind() const { return err_kind(code_); }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool cond, Err code, const std::string& message) {
    if (!cond) fail(code, message);
}

}  // namespace calcular
