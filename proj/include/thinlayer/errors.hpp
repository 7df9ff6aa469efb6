#pragma once

#include <stdexcept>
#include <string>

namespace thinlayer {

// Every failure mode the toolkit reports deliberately. Callers that want to
// distinguish cases catch the concrete type; everything derives from
// std::runtime_error so a CLI-level catch can still produce a sane message.

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NoRootInRange : std::runtime_error {
    explicit NoRootInRange(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidWidth : std::runtime_error {
    explicit InvalidWidth(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidGrid : std::runtime_error {
    explicit InvalidGrid(const std::string& what) : std::runtime_error(what) {}
};

struct ConvergenceFailure : std::runtime_error {
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientBoundStates : std::runtime_error {
    explicit InsufficientBoundStates(const std::string& what) : std::runtime_error(what) {}
};

struct SingularShift : std::runtime_error {
    explicit SingularShift(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateFit : std::runtime_error {
    explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

struct SingularOverlap : std::runtime_error {
    explicit SingularOverlap(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct ComputationFailed : std::runtime_error {
    ComputationFailed(const std::string& module_error, const std::string& what)
        : std::runtime_error(what), module_error_type(module_error) {}
    std::string module_error_type;
};

} // namespace thinlayer
