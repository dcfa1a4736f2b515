#include "beurling/quadrature.hpp"

namespace beurling {

QuadratureError::QuadratureError(const std::string& what, double achieved)
    : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
      achieved_(achieved) {}

}  // namespace beurling
