#pragma once

#include <stdexcept>
#include <string>

namespace specflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Continued-fraction expansion terminated before depth 3.
struct AlphaRational : Error {
    explicit AlphaRational(const std::string& what) : Error(what) {}
};

// Requested CF depth not reachable at fixed-point resolution.
struct DepthUnreachable : Error {
    int achieved_depth;
    explicit DepthUnreachable(int achieved)
        : Error("continued-fraction depth unreachable, achieved " + std::to_string(achieved)),
          achieved_depth(achieved) {}
};

struct ROutOfRange : Error {
    explicit ROutOfRange(const std::string& what) : Error(what) {}
};

// Evaluation at a point inside the singularity clip window.
struct AtSingularity : Error {
    explicit AtSingularity(const std::string& what) : Error(what) {}
};

// A Birkhoff orbit entered the clip window; carries the offending step.
struct OrbitHitsSingularity : Error {
    long long offending_step;
    explicit OrbitHitsSingularity(long long j)
        : Error("orbit point at step " + std::to_string(j) + " inside singularity clip window"),
          offending_step(j) {}
};

// A lemma hypothesis failed before measurement; carries the offending step.
struct HypothesisViolated : Error {
    long long offending_step;
    explicit HypothesisViolated(long long i)
        : Error("hypothesis violated at orbit step " + std::to_string(i)), offending_step(i) {}
};

struct CodeMismatch : Error {
    explicit CodeMismatch(const std::string& what) : Error(what) {}
};

struct NotClose : Error {
    explicit NotClose(const std::string& what) : Error(what) {}
};

struct Infeasible : Error {
    explicit Infeasible(const std::string& what) : Error(what) {}
};

struct DegenerateGrid : Error {
    explicit DegenerateGrid(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace specflow
