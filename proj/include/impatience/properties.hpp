#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "impatience/marks.hpp"

namespace impatience {

struct PropertyCount {
    std::string name;
    std::size_t checked = 0;
    std::size_t violations = 0;
};

struct PropertySuiteResult {
    std::vector<PropertyCount> counts;

    std::size_t total_violations() const noexcept;
    const PropertyCount* find(const std::string& name) const noexcept;
};

// Random state/mark tuples (x, sigma, D, xi). Components mix continuous
// draws with a coarse grid so that ties (x == D, sigma == D, ...) occur;
// every third tuple puts x on a boundary 0, D or D + sigma.
struct TupleGenerator {
    std::uint64_t seed = 1;

    struct Tuple {
        double x;
        MarkTriple mark;
    };

    Tuple at(std::int64_t i) const;
};

// One-step inequalities, `tuples` random tuples each:
//   x + sigma 1{x<=D} <= x v (D+sigma)
//   x + (sigma - (x+sigma-D)^+)^+ <= (x v D) ^ (x + sigma 1{x<=D})
//   x v (D ^ sigma) <= x + (sigma - (x+sigma-D)^+)^+
//   step(x, sigma^D) <= fifo_step(x) <= step(x, sigma+D)
//   step(x, sigma^D) <= end_step(x) <= step(x, D)
//   end_step(x) <= fifo_step(x)
//   monotonicity of step and end_step, 1-Lipschitz end_step
// reported as ineq, ineq2, ineq3, begin_sandwich, end_sandwich, end_le_fifo,
// monotone and lipschitz.
PropertySuiteResult run_pointwise_suite(std::size_t tuples, std::uint64_t seed);

// DES double inclusion, sojourn bounds, idle-with-queue and event balance
// for both impatience models and s in {1, 2, 4}, until at least
// `min_events` events have been simulated per configuration. Counts are named
// <check>/<model>/s=<servers>.
PropertySuiteResult run_inclusion_suite(const MarkSource& src, std::size_t min_events);

}  // namespace impatience
