#include "impatience/estimation.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "impatience/errors.hpp"

namespace impatience {

namespace {

double pairwise(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise(x, half) + pairwise(x + half, n - half);
}

}  // namespace

double stable_sum(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return pairwise(sorted.data(), sorted.size());
}

Estimate wilson_estimate(std::size_t successes, std::size_t trials) {
    if (trials == 0) throw ArgumentError("proportion estimate needs at least one trial");
    if (successes > trials) throw ArgumentError("successes exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ975 * kZ975;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ975 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    Estimate e;
    e.point = p;
    e.lower = std::max(0.0, centre - half);
    e.upper = std::min(1.0, centre + half);
    e.std_error = std::sqrt(p * (1.0 - p) / n);
    e.n = trials;
    e.interval = Estimate::Interval::wilson;
    return e;
}

Estimate student_t_estimate(std::span<const double> values) {
    if (values.empty()) throw ArgumentError("mean estimate needs at least one value");
    const double n = static_cast<double>(values.size());
    const double mean = stable_sum(values) / n;
    Estimate e;
    e.point = mean;
    e.n = values.size();
    e.interval = Estimate::Interval::student_t;
    if (values.size() < 2) {
        e.lower = e.upper = mean;
        return e;
    }
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
    const double var = stable_sum(sq) / (n - 1.0);
    e.std_error = std::sqrt(var / n);
    const boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    e.lower = mean - t * e.std_error;
    e.upper = mean + t * e.std_error;
    return e;
}

Estimate mc_aggregate(std::span<const double> outcomes) {
    if (outcomes.empty()) throw ArgumentError("mc_aggregate needs a nonempty list");
    const bool binary = std::all_of(outcomes.begin(), outcomes.end(), [](double v) { return v == 0.0 || v == 1.0; });
    if (binary) {
        const auto ones = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), 1.0));
        return wilson_estimate(ones, outcomes.size());
    }
    return student_t_estimate(outcomes);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("ks_two_sample needs two nonempty samples");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    // Step both CDFs past every copy of the next threshold before comparing.
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

bool bracket_within(const Estimate& lower, const Estimate& value, const Estimate& upper, double se_slack) {
    const double low_slack = se_slack * std::hypot(lower.std_error, value.std_error);
    const double high_slack = se_slack * std::hypot(upper.std_error, value.std_error);
    return lower.point <= value.point + low_slack && value.point <= upper.point + high_slack;
}

OracleResult birth_death_abandonment(const OracleSpec& spec) {
    if (!(spec.lambda > 0.0) || !(spec.mu > 0.0) || !(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) {
        throw ArgumentError("oracle needs lambda > 0, mu > 0, gamma >= 0");
    }
    constexpr double kTailTarget = 1e-12;
    constexpr std::size_t kMaxLevel = std::size_t{1} << 24;

    OracleResult out;
    // Two-state chain {0, 1}: rate lambda up, mu down.
    out.blocking = spec.lambda / (spec.lambda + spec.mu);
    if (spec.gamma == 0.0 && spec.lambda >= spec.mu) {
        // Nobody abandons, and the plain M/M/1 queue has no stationary law.
        out.tail_bound = std::numeric_limits<double>::infinity();
        return out;
    }
    for (std::size_t level = std::max<std::size_t>(spec.truncation, 2); level <= kMaxLevel; level *= 2) {
        // Unnormalized weights w_n = prod_{k=1..n} lambda / (mu + (k-1) gamma).
        std::vector<double> w(level + 1);
        w[0] = 1.0;
        for (std::size_t n = 1; n <= level; ++n) {
            w[n] = w[n - 1] * spec.lambda / (spec.mu + static_cast<double>(n - 1) * spec.gamma);
        }
        // Successive ratios lambda / (mu + n gamma) are nonincreasing, so the
        // neglected tail is at most geometric with the last ratio.
        const double r = spec.lambda / (spec.mu + static_cast<double>(level) * spec.gamma);
        if (r >= 1.0) continue;
        const double total = stable_sum(w);
        const double tail = w[level] * r / (1.0 - r) / total;
        if (tail >= kTailTarget) continue;

        out.distribution.resize(level + 1);
        for (std::size_t n = 0; n <= level; ++n) out.distribution[n] = w[n] / total;
        std::vector<double> flux(level + 1, 0.0);
        for (std::size_t n = 1; n <= level; ++n) {
            flux[n] = out.distribution[n] * static_cast<double>(n - 1) * spec.gamma;
        }
        out.abandonment = stable_sum(flux) / spec.lambda;
        out.truncation = level;
        out.tail_bound = tail;
        return out;
    }
    throw ArgumentError("oracle truncation insufficient: tail mass stays above 1e-12 (unstable without abandonment?)");
}

}  // namespace impatience
