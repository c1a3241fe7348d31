#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace anideg {

/// Base class of all library errors. `code()` is a stable machine-parsable
/// identifier; the CLI prints "<code>: <message>" on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("DimensionMismatch", msg) {}
};

struct NotStronglyMonotone : Error {
    explicit NotStronglyMonotone(const std::string& msg) : Error("NotStronglyMonotone", msg) {}
};

struct NotPositive : Error {
    explicit NotPositive(const std::string& msg) : Error("NotPositive", msg) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg) : Error("QuadratureFailure", msg) {}
};

struct InitialDatumOutOfRange : Error {
    explicit InitialDatumOutOfRange(const std::string& msg) : Error("InitialDatumOutOfRange", msg) {}
};

struct SingularMode : Error {
    explicit SingularMode(const std::string& msg) : Error("SingularMode", msg) {}
};

struct NonFiniteField : Error {
    explicit NonFiniteField(const std::string& msg) : Error("NonFiniteField", msg) {}
};

struct EnergySafeguardExhausted : Error {
    explicit EnergySafeguardExhausted(const std::string& msg) : Error("EnergySafeguardExhausted", msg) {}
};

struct EstimateViolated : Error {
    explicit EstimateViolated(const std::string& msg) : Error("EstimateViolated", msg) {}
};

struct SlopeUndefined : Error {
    explicit SlopeUndefined(const std::string& msg) : Error("SlopeUndefined", msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("ParseError", msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error("ValidationError", msg) {}
};

struct MissingArtifact : Error {
    explicit MissingArtifact(const std::string& msg) : Error("MissingArtifact", msg) {}
};

} // namespace anideg
