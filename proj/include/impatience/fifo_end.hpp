#pragma once

#include <cstdint>
#include <span>

#include "impatience/estimation.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/marks.hpp"
#include "impatience/sampling.hpp"

namespace impatience {

// Single FIFO server, customers impatient until the end of service: a
// customer still in the system at T_n + D_n leaves, aborting any service in
// progress. The work brought by C_n is sigma_n if W_n <= D_n - sigma_n,
// D_n - W_n if D_n - sigma_n < W_n <= D_n, and 0 if W_n > D_n.

// W + added work, evaluated as ((W + sigma) ^ D) 1{W <= D} + W 1{W > D}.
double end_level(double s, const MarkTriple& mark) noexcept;

// [s + (sigma - (s + sigma - D)^+)^+ - xi]^+; nondecreasing, 1-Lipschitz.
double end_step(double s, const MarkTriple& mark);

// Exact mode replays end_step from 0 at the nearest certified zero of
// Y_{D,xi} (needs a declared bound on D); approximate mode as sample_stationary_w.
StationarySample sample_stationary_s(const MarkSource& src, const SamplingOptions& opts = {});

struct LoynesResult {
    double value = 0.0;
    std::int64_t depth = 0;
    bool converged = false;
};

// Minimal stationary S as the limit of backward iterates from 0. With a
// declared bound c on D, depths double until the iterates started from 0 and
// from c at -depth agree at 0 (every start in [0, c] then gives the same
// value, and S <= Y_{D,xi} <= c). Without a bound, or if max_depth is hit
// first, the iterate from -max_depth is returned with converged = false.
LoynesResult loynes_stationary_s(const MarkSource& src, std::int64_t max_depth);

// Y_{sigma^D,xi} <= S <= Y_{D,xi} per epoch, replayed from the zero of Y_{D,xi}.
SandwichReport sandwich_check_end(const MarkSource& src, std::span<const std::int64_t> epochs,
                                  const SamplingOptions& opts = {});

// loss = pi(e) = P(S > D - sigma), unreached = P(S > D), bracket
// P(Y_{sigma^D,xi} > D - sigma) <= pi(e) <= P(Y_{D,xi} > D - sigma).
LossReport loss_metrics_end(const MarkSource& src, const LossOptions& opts = {});

struct DisciplineComparison {
    std::size_t violations = 0;  // n with S_n > W_n
    std::int64_t horizon = 0;
};

// Both workloads from 0 at index 0 on the same marks.
DisciplineComparison compare_disciplines(const MarkSource& src, std::int64_t horizon);

}  // namespace impatience
