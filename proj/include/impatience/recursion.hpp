#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "impatience/estimation.hpp"
#include "impatience/marks.hpp"

namespace impatience {

// Which mark plays alpha in y -> [max(y, alpha) - beta]^+. beta is always xi.
class RecursionSpec {
public:
    using Extractor = std::function<double(const MarkTriple&)>;

    static RecursionSpec of(AlphaKind kind) { return RecursionSpec(kind); }
    static RecursionSpec sigma_plus_d() { return RecursionSpec(AlphaKind::sigma_plus_d); }
    static RecursionSpec sigma_min_d() { return RecursionSpec(AlphaKind::sigma_min_d); }
    static RecursionSpec d_only() { return RecursionSpec(AlphaKind::d_only); }
    // `bound`, when given, is an a.s. upper bound on the extractor's output.
    static RecursionSpec custom(Extractor alpha, std::optional<double> bound = std::nullopt,
                                std::string name = "custom");

    // Throws ArgumentError if the extractor yields a negative or non-finite value.
    double alpha(const MarkTriple& m) const;
    double beta(const MarkTriple& m) const noexcept { return m.xi; }

    std::optional<double> alpha_bound(const MarkSource& src) const;
    std::optional<AlphaKind> kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    explicit RecursionSpec(AlphaKind kind) : kind_(kind), name_(to_string(kind)) {}
    RecursionSpec() = default;

    std::optional<AlphaKind> kind_;
    Extractor custom_;
    std::optional<double> custom_bound_;
    std::string name_;
};

// Finite witness that the backward supremum at `epoch` is <= 0: every term up
// to `depth` is <= 0, and the cumulative beta over those lags already exceeds
// the alpha bound, so every later term is <= residual_bound <= 0.
struct ZeroCertificate {
    std::int64_t epoch = 0;
    std::int64_t depth = 0;
    double residual_bound = 0.0;
};

struct RecursionValue {
    double value = 0.0;
    bool exact = false;
    // Lags examined: the certified depth in exact mode, max_depth otherwise.
    std::int64_t depth = 0;
    std::optional<std::int64_t> truncation_depth;
    std::optional<ZeroCertificate> certificate;
};

enum class Exactness { exact, approximate };

// [max(y, alpha) - beta]^+
inline double step(double y, double alpha, double beta) {
    const double v = (y > alpha ? y : alpha) - beta;
    return v > 0.0 ? v : 0.0;
}

double step(double y, const MarkTriple& mark, const RecursionSpec& spec);

// Element k-1 is the value at `epoch` of the recursion started from 0 at
// index epoch - k, k = 1..depth. Nondecreasing in k.
std::vector<double> loynes_backward(const RecursionSpec& spec, const MarkSource& src, std::int64_t epoch,
                                    std::int64_t depth);

// [sup_{j>=1} (alpha_{epoch-j} - sum_{i=1..j} beta_{epoch-i})]^+.
// Exact mode stops at the first lag J whose cumulative beta reaches the
// declared alpha bound and throws CapabilityError without a bound,
// DepthExhausted if J > max_depth. Approximate mode truncates at max_depth and
// underestimates the value.
RecursionValue backward_supremum(const RecursionSpec& spec, const MarkSource& src, std::int64_t epoch,
                                 std::int64_t max_depth, Exactness mode = Exactness::exact);

struct ProbZeroEstimate {
    Estimate estimate;
    bool exact = false;
    std::size_t replicas = 0;
};

// Fraction of replicas with backward_supremum == 0, each replica read through
// replica_view with spacing 2 max_depth. Exact whenever the source declares a
// bound for the spec's alpha.
ProbZeroEstimate prob_zero_estimate(const RecursionSpec& spec, const MarkSource& src, std::size_t replicas,
                                    std::int64_t max_depth, unsigned workers = 1);

// Replica r of `src`, arranged so that its epoch of interest is index 0.
// Random sources (iid and Markov-modulated) get an independent stream, which
// is an independent stationary realization; deterministic sequences are
// shifted back by r * spacing.
MarkSource replica_view(const MarkSource& src, std::size_t replica, std::int64_t spacing);

// First n in [0, horizon] at which the forward iterates from z1 and z2
// (marks at indices 0..n-1) coincide, or nullopt. Throws ContractViolation if
// the iterates separate again before the horizon.
std::optional<std::int64_t> coupling_time(const RecursionSpec& spec, const MarkSource& src, double z1, double z2,
                                          std::int64_t horizon);

}  // namespace impatience
