//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace igafwi {

/// Base class of numerical failures (CLI exit code 2).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssemblyError : NumericalError {
    using NumericalError::NumericalError;
};

struct LumpingError : NumericalError {
    using NumericalError::NumericalError;
};

struct InstabilityError : NumericalError {
    InstabilityError(const std::string& what, int step_index)
        : NumericalError(what), step(step_index) {}
    int step;
};

struct EstimationError : NumericalError {
    EstimationError(const std::string& what, double last)
        : NumericalError(what), last_estimate(last) {}
    double last_estimate;
};

} // namespace igafwi
