#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "impatience/estimation.hpp"
#include "impatience/marks.hpp"
#include "impatience/sampling.hpp"

namespace impatience {

// Single FIFO server, customers impatient until the beginning of service.
// Workload seen by an arrival: W_{n+1} = [W_n + sigma_n 1{W_n <= D_n} - xi_n]^+.

inline bool served_begin(double w, const MarkTriple& m) noexcept { return w <= m.dpat; }

double fifo_step(double w, const MarkTriple& mark);

// Nearest certified zero of Y_{sigma+D,xi} before index 0; the stationary
// workload vanishes there.
Renovation find_renovation_epoch(const MarkSource& src, std::int64_t max_epochs, std::int64_t max_depth);

// Exact mode replays fifo_step from 0 at the renovation epoch through the
// marks -m..-1; approximate mode runs from 0 over `warmup` marks.
StationarySample sample_stationary_w(const MarkSource& src, const SamplingOptions& opts = {});

// Stationary triple at one epoch. All three come from one forward replay,
// started at 0 at the renovation epoch of Y_{sigma+D,xi} (where all three
// vanish).
struct SandwichRow {
    std::int64_t epoch = 0;
    double lower = 0.0;  // Y_{sigma^D,xi}
    double value = 0.0;  // W
    double upper = 0.0;  // Y_{sigma+D,xi}
    // |replayed bound - backward_supremum| over both bounds.
    double route_discrepancy = 0.0;
};

struct SandwichReport {
    std::size_t violations = 0;
    std::size_t route_mismatches = 0;  // discrepancy above kRouteTolerance
    std::vector<SandwichRow> rows;
};

inline constexpr double kRouteTolerance = 1e-9;

SandwichReport sandwich_check(const MarkSource& src, std::span<const std::int64_t> epochs,
                              const SamplingOptions& opts = {});

struct LossOptions {
    SamplingOptions sampling;
    std::size_t samples = 10'000;
    // Forward-approximate mode only: independent trajectories the samples
    // are split over (each with its own warm-up).
    std::size_t replicas = 20;
    unsigned workers = 1;
    double se_slack = 3.0;
};

// pi(b) = P(W > D) paired with the patience of the same customer, with the
// bracket P(Y_{sigma^D,xi} > D) <= pi(b) <= P(Y_{sigma+D,xi} > D).
LossReport loss_probability_begin(const MarkSource& src, const LossOptions& opts = {});

}  // namespace impatience
