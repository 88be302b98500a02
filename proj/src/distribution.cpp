#include "impatience/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "impatience/errors.hpp"

namespace impatience {

namespace {

void require_finite_nonnegative(double x, const char* what) {
    if (!std::isfinite(x) || x < 0.0) {
        throw ArgumentError(std::string(what) + " must be finite and nonnegative");
    }
}

}  // namespace

Distribution Distribution::deterministic(double value) {
    require_finite_nonnegative(value, "deterministic value");
    Distribution d;
    d.family_ = Family::deterministic;
    d.a_ = value;
    return d;
}

Distribution Distribution::uniform(double low, double high) {
    require_finite_nonnegative(low, "uniform low");
    require_finite_nonnegative(high, "uniform high");
    if (high < low) throw ArgumentError("uniform requires low <= high");
    Distribution d;
    d.family_ = Family::uniform;
    d.a_ = low;
    d.b_ = high;
    return d;
}

Distribution Distribution::exponential(double rate) {
    if (!std::isfinite(rate) || rate <= 0.0) throw ArgumentError("exponential rate must be positive");
    Distribution d;
    d.family_ = Family::exponential;
    d.a_ = rate;
    return d;
}

Distribution Distribution::truncated_exponential(double rate, double cap) {
    if (!std::isfinite(rate) || rate <= 0.0) throw ArgumentError("truncated exponential rate must be positive");
    if (!std::isfinite(cap) || cap <= 0.0) throw ArgumentError("truncated exponential cap must be positive");
    Distribution d;
    d.family_ = Family::truncated_exponential;
    d.a_ = rate;
    d.b_ = cap;
    d.norm_ = -std::expm1(-rate * cap);
    return d;
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probabilities) {
    if (values.empty() || values.size() != probabilities.size()) {
        throw ArgumentError("discrete distribution needs matching nonempty values and probabilities");
    }
    for (double v : values) require_finite_nonnegative(v, "discrete value");
    for (double p : probabilities) require_finite_nonnegative(p, "discrete probability");
    const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("discrete probabilities must sum to 1");
    Distribution d;
    d.family_ = Family::discrete;
    d.values_ = std::move(values);
    d.cumulative_.resize(probabilities.size());
    std::partial_sum(probabilities.begin(), probabilities.end(), d.cumulative_.begin());
    for (double& c : d.cumulative_) c /= total;
    d.cumulative_.back() = 1.0;
    return d;
}

std::string Distribution::name() const {
    switch (family_) {
        case Family::deterministic: return "deterministic";
        case Family::uniform: return "uniform";
        case Family::exponential: return "exponential";
        case Family::truncated_exponential: return "truncated_exponential";
        case Family::discrete: return "discrete";
    }
    return "unknown";
}

double Distribution::sample(double u) const noexcept {
    switch (family_) {
        case Family::deterministic: return a_;
        case Family::uniform: return a_ + (b_ - a_) * u;
        case Family::exponential: return -std::log1p(-u) / a_;
        case Family::truncated_exponential: return std::min(b_, -std::log1p(-u * norm_) / a_);
        case Family::discrete: {
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                                   values_.size() - 1);
            return values_[idx];
        }
    }
    return 0.0;
}

double Distribution::mean() const noexcept {
    switch (family_) {
        case Family::deterministic: return a_;
        case Family::uniform: return 0.5 * (a_ + b_);
        case Family::exponential: return 1.0 / a_;
        case Family::truncated_exponential:
            // E[X | X <= c] for X ~ Exp(r): 1/r - c e^{-rc} / (1 - e^{-rc})
            return 1.0 / a_ - b_ * std::exp(-a_ * b_) / norm_;
        case Family::discrete: {
            double m = 0.0;
            double prev = 0.0;
            for (std::size_t i = 0; i < values_.size(); ++i) {
                m += values_[i] * (cumulative_[i] - prev);
                prev = cumulative_[i];
            }
            return m;
        }
    }
    return 0.0;
}

std::optional<double> Distribution::upper_bound() const noexcept {
    switch (family_) {
        case Family::deterministic: return a_;
        case Family::uniform: return b_;
        case Family::exponential: return std::nullopt;
        case Family::truncated_exponential: return b_;
        case Family::discrete: {
            double hi = 0.0;
            double prev = 0.0;
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (cumulative_[i] > prev) hi = std::max(hi, values_[i]);
                prev = cumulative_[i];
            }
            return hi;
        }
    }
    return std::nullopt;
}

double Distribution::lower_bound() const noexcept {
    switch (family_) {
        case Family::deterministic: return a_;
        case Family::uniform: return a_;
        case Family::exponential:
        case Family::truncated_exponential: return 0.0;
        case Family::discrete: {
            double lo = values_.front();
            double prev = 0.0;
            bool first = true;
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (cumulative_[i] > prev) {
                    lo = first ? values_[i] : std::min(lo, values_[i]);
                    first = false;
                }
                prev = cumulative_[i];
            }
            return lo;
        }
    }
    return 0.0;
}

}  // namespace impatience
