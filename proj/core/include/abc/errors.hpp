#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abc {

// Every error raised by the library derives from abc::Error; `kind()` is the
// stable machine-readable tag the CLI reports.
class Error : public std::runtime_error {
public:
    Error(std::string_view kind, const std::string& what);
    const char* kind() const noexcept { return kind_.c_str(); }

private:
    std::string kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

struct ConfigurationError : Error {
    explicit ConfigurationError(const std::string& what) : Error("configuration_error", what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension_mismatch", what) {}
};

struct UnsupportedModel : Error {
    explicit UnsupportedModel(const std::string& what) : Error("unsupported_model", what) {}
};

struct EmptyAcceptedSet : Error {
    explicit EmptyAcceptedSet(const std::string& what) : Error("empty_accepted_set", what) {}
};

struct InfeasibleRadius : Error {
    explicit InfeasibleRadius(const std::string& what) : Error("infeasible_radius", what) {}
};

struct DegenerateScale : Error {
    explicit DegenerateScale(const std::string& what) : Error("degenerate_scale", what) {}
};

struct InsufficientSample : Error {
    explicit InsufficientSample(const std::string& what) : Error("insufficient_sample", what) {}
};

struct UndefinedEstimate : Error {
    explicit UndefinedEstimate(const std::string& what) : Error("undefined_estimate", what) {}
};

// Throws DimensionMismatch unless `got == expected`.
void require_dim(std::size_t got, std::size_t expected, std::string_view what);

}  // namespace abc
