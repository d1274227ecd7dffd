#pragma once

#include <stdexcept>
#include <string>

namespace mcube {

/// Bad input files, failed structural checks, failed compatibility checks.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments or configuration (resolution caps, unknown names).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside a numerical stage; stage() names it.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string stage, const std::string& what);
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace mcube
