#include "impatience/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impatience/errors.hpp"
#include "impatience/parallel.hpp"

namespace impatience {

RecursionSpec RecursionSpec::custom(Extractor alpha, std::optional<double> bound, std::string name) {
    if (!alpha) throw ArgumentError("custom recursion needs an alpha extractor");
    if (bound && (!std::isfinite(*bound) || *bound < 0.0)) {
        throw ArgumentError("custom alpha bound must be finite and nonnegative");
    }
    RecursionSpec spec;
    spec.custom_ = std::move(alpha);
    spec.custom_bound_ = bound;
    spec.name_ = std::move(name);
    return spec;
}

double RecursionSpec::alpha(const MarkTriple& m) const {
    if (kind_) return alpha_of(*kind_, m);
    const double a = custom_(m);
    if (!std::isfinite(a) || a < 0.0) throw ArgumentError("alpha extractor returned a negative or non-finite value");
    return a;
}

std::optional<double> RecursionSpec::alpha_bound(const MarkSource& src) const {
    if (kind_) return src.alpha_bound(*kind_);
    return custom_bound_;
}

double step(double y, const MarkTriple& mark, const RecursionSpec& spec) {
    if (!(y >= 0.0)) throw ArgumentError("recursion state must be nonnegative");
    return step(y, spec.alpha(mark), spec.beta(mark));
}

std::vector<double> loynes_backward(const RecursionSpec& spec, const MarkSource& src, std::int64_t epoch,
                                    std::int64_t depth) {
    if (depth < 1) throw ArgumentError("loynes_backward needs depth >= 1");
    // Started from 0 at epoch - k, the value at epoch is the positive part of
    // the largest of the first k backward terms.
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(depth));
    double cum = 0.0;
    double best = 0.0;
    for (std::int64_t j = 1; j <= depth; ++j) {
        const MarkTriple m = src.mark_at(epoch - j);
        cum += spec.beta(m);
        best = std::max(best, spec.alpha(m) - cum);
        out.push_back(best);
    }
    return out;
}

RecursionValue backward_supremum(const RecursionSpec& spec, const MarkSource& src, std::int64_t epoch,
                                 std::int64_t max_depth, Exactness mode) {
    if (max_depth < 1) throw ArgumentError("backward_supremum needs max_depth >= 1");
    std::optional<double> bound;
    if (mode == Exactness::exact) {
        bound = spec.alpha_bound(src);
        if (!bound) {
            throw CapabilityError("exact backward supremum for alpha=" + spec.name() +
                                  " needs a declared alpha_bound on the source");
        }
    }
    double cum = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t j = 1;
    bool certified = false;
    for (; j <= max_depth; ++j) {
        const MarkTriple m = src.mark_at(epoch - j);
        cum += spec.beta(m);
        best = std::max(best, spec.alpha(m) - cum);
        if (bound && cum >= *bound) {
            certified = true;
            break;
        }
    }
    RecursionValue out;
    out.value = best > 0.0 ? best : 0.0;
    if (mode == Exactness::exact) {
        if (!certified) {
            throw DepthExhausted("cumulative interarrivals did not reach alpha_bound " + std::to_string(*bound) +
                                 " within max_depth " + std::to_string(max_depth) + " at epoch " +
                                 std::to_string(epoch));
        }
        out.exact = true;
        out.depth = j;
        if (out.value == 0.0) out.certificate = ZeroCertificate{epoch, j, *bound - cum};
    } else {
        out.exact = false;
        out.depth = max_depth;
        out.truncation_depth = max_depth;
    }
    return out;
}

MarkSource replica_view(const MarkSource& src, std::size_t replica, std::int64_t spacing) {
    if (src.kind() != MarkSource::Kind::deterministic) {
        return src.with_stream(derive_stream(src.stream_id(), replica));
    }
    return src.shift(-static_cast<std::int64_t>(replica) * spacing);
}

ProbZeroEstimate prob_zero_estimate(const RecursionSpec& spec, const MarkSource& src, std::size_t replicas,
                                    std::int64_t max_depth, unsigned workers) {
    if (replicas == 0) throw ArgumentError("prob_zero_estimate needs replicas >= 1");
    if (max_depth < 1) throw ArgumentError("prob_zero_estimate needs max_depth >= 1");
    const Exactness mode = spec.alpha_bound(src) ? Exactness::exact : Exactness::approximate;
    std::vector<double> zero(replicas, 0.0);
    parallel_for(replicas, workers, [&](std::size_t r) {
        const MarkSource view = replica_view(src, r, 2 * max_depth);
        zero[r] = backward_supremum(spec, view, 0, max_depth, mode).value == 0.0 ? 1.0 : 0.0;
    });
    ProbZeroEstimate out;
    out.estimate = mc_aggregate(zero);
    out.exact = mode == Exactness::exact;
    out.replicas = replicas;
    return out;
}

std::optional<std::int64_t> coupling_time(const RecursionSpec& spec, const MarkSource& src, double z1, double z2,
                                          std::int64_t horizon) {
    if (!(z1 >= 0.0) || !(z2 >= 0.0)) throw ArgumentError("coupling_time needs nonnegative initial values");
    if (horizon < 1) throw ArgumentError("coupling_time needs horizon >= 1");
    double a = z1;
    double b = z2;
    std::optional<std::int64_t> met;
    if (a == b) met = 0;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const MarkTriple m = src.mark_at(n - 1);
        const double alpha = spec.alpha(m);
        const double beta = spec.beta(m);
        a = step(a, alpha, beta);
        b = step(b, alpha, beta);
        if (a == b) {
            if (!met) met = n;
        } else if (met) {
            throw ContractViolation("forward iterates separated at step " + std::to_string(n) +
                                    " after coupling at " + std::to_string(*met));
        }
    }
    return met;
}

}  // namespace impatience
