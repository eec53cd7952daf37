#pragma once

#include <stdexcept>
#include <string>

namespace shapeflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
    using Error::Error;
};
struct MetricMismatch : Error {
    using Error::Error;
};
struct OriginNotInterior : Error {
    using Error::Error;
};
struct TargetTooCoarse : Error {
    using Error::Error;
};
struct DegenerateTriangle : Error {
    using Error::Error;
};
struct IterationDivergence : Error {
    using Error::Error;
};
struct BracketFailure : Error {
    using Error::Error;
};
struct ZeroVector : Error {
    using Error::Error;
};
struct AdmissibilityLost : Error {
    using Error::Error;
};
struct InvalidSigma : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace shapeflow
