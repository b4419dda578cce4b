#pragma once

#include <stdexcept>
#include <string>

namespace cmaflow {

struct MeshTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotStrictlyPsh : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StencilOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RootBracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FormMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositiveTwist : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindowEmpty : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MeshMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotAdmissible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CertificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cmaflow
