#pragma once

#include <stdexcept>

namespace persuasion {

/// Raised when a request falls outside the parameter region for which the
/// model has a characterized answer (distinct from malformed input).
struct out_of_region_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace persuasion
