#pragma once

#include "twave/pdesim.hpp"

namespace twave {

struct StepStats {
    double min_density = 0.0;  // smallest u_r or u_l after the step
    long min_cell = -1;
};

/// Reference single-threaded update of `in` into `out` (same size, distinct storage).
StepStats step_serial(const FieldPair& in, FieldPair& out, const StepCoefficients& c);

/// OpenMP update; bitwise identical to step_serial.
StepStats step_parallel(const FieldPair& in, FieldPair& out, const StepCoefficients& c);

}  // namespace twave
