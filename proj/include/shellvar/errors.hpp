#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace shellvar {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGridError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

/// |d1 psi ^ d2 psi| fell below the degeneracy threshold somewhere.
struct DegenerateSurfaceError : Error {
    std::vector<int> nodes;  // flat node indices
    DegenerateSurfaceError(const std::string& msg, std::vector<int> where)
        : Error(msg), nodes(std::move(where)) {}
};

struct DegenerateMetricError : Error {
    using Error::Error;
};

struct ReferenceDegeneracyError : Error {
    using Error::Error;
};

struct NumericDomainError : Error {
    using Error::Error;
};

struct UnsupportedSpecError : Error {
    using Error::Error;
};

struct SamplingError : Error {
    using Error::Error;
};

struct PathError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

}  // namespace shellvar
