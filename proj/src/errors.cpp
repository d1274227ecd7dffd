#include "mcube/errors.hpp"

namespace mcube {

NumericalError::NumericalError(std::string stage, const std::string& what)
    : std::runtime_error(stage + ": " + what), stage_(std::move(stage))
{
}

}  // namespace mcube
