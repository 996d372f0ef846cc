#ifndef MINACT_VERIFY_HPP
#define MINACT_VERIFY_HPP

#include "minact/io.hpp"
#include "minact/scenario.hpp"

namespace minact {

struct VerifyOutcome {
    bool pass = false;
    Json report;  // scenario name, seed, tolerances, per-suite results
};

/// Runs the scenario's configured property suites (flowline zero cost, drift
/// lower bound, key estimate, descent direction, hitting report,
/// admissibility). Deterministic for a fixed seed.
VerifyOutcome run_verify(const Scenario& sc);

} // namespace minact

#endif
