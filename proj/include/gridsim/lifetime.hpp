#pragma once

namespace gridsim {

// Asset lifetime solved from a per-day wear rate. When the observed wear is
// exactly zero the inversion is degenerate; `degenerate` is set and `years`
// carries the documented fallback instead (rated insulation life for the
// transformer, infinity for a non-operating tap changer).
struct LifetimeEstimate {
    double years = 0.0;
    bool degenerate = false;
};

}  // namespace gridsim
