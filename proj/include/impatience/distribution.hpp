#pragma once

#include <optional>
#include <string>
#include <vector>

namespace impatience {

// Nonnegative one-dimensional law sampled by inversion of a single uniform.
class Distribution {
public:
    enum class Family { deterministic, uniform, exponential, truncated_exponential, discrete };

    static Distribution deterministic(double value);
    static Distribution uniform(double low, double high);
    static Distribution exponential(double rate);
    // Exponential(rate) conditioned on [0, cap].
    static Distribution truncated_exponential(double rate, double cap);
    static Distribution discrete(std::vector<double> values, std::vector<double> probabilities);

    Family family() const noexcept { return family_; }
    std::string name() const;

    // u in [0, 1).
    double sample(double u) const noexcept;
    double mean() const noexcept;
    // Essential supremum of the support; empty for unbounded families.
    std::optional<double> upper_bound() const noexcept;
    double lower_bound() const noexcept;

private:
    Distribution() = default;

    Family family_ = Family::deterministic;
    double a_ = 0.0;     // value / low / rate
    double b_ = 0.0;     // high / cap
    double norm_ = 1.0;  // 1 - exp(-rate * cap)
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

}  // namespace impatience
