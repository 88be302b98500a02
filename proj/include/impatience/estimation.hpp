#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace impatience {

// Point estimate with a two-sided 95% confidence interval.
struct Estimate {
    enum class Interval { wilson, student_t };

    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    Interval interval = Interval::wilson;
};

inline constexpr double kZ975 = 1.959963984540054;

Estimate wilson_estimate(std::size_t successes, std::size_t trials);
Estimate student_t_estimate(std::span<const double> values);

// Mean of replica outcomes. All-0/1 input gets a Wilson interval, anything
// else a t-interval. Values are summed in sorted order, so the result is
// bit-identical under any permutation of the input.
Estimate mc_aggregate(std::span<const double> outcomes);

// Order-independent sum: sort, then pairwise summation.
double stable_sum(std::span<const double> values);

// sup_x |F_a(x) - F_b(x)| for the two empirical CDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Stationary-loss summary produced by the FIFO engines. For the begin model
// `loss` is pi(b) = P(W > D); for the end model `loss` is pi(e) = P(S > D - sigma)
// and `unreached` is P(S > D). Bounds come from the dominating and dominated
// recursions evaluated on the same customers.
struct LossReport {
    std::string model;
    std::string method;
    Estimate loss;
    std::optional<Estimate> unreached;
    Estimate lower_bound;
    Estimate upper_bound;
    std::size_t samples = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    bool bracketing_holds = true;
};

// lower <= loss <= upper up to `se_slack` standard errors.
bool bracket_within(const Estimate& lower, const Estimate& value, const Estimate& upper, double se_slack);

struct OracleSpec {
    double lambda = 1.0;
    double mu = 1.0;
    double gamma = 0.0;  // 0: no abandonment
    std::size_t truncation = 64;  // initial level, doubled as needed
};

struct OracleResult {
    double abandonment = 0.0;  // sum_{n>=1} pi_n (n-1) gamma / lambda
    double blocking = 0.0;     // M/M/1/1 rho / (1 + rho), from its own two-state chain
    std::vector<double> distribution;  // pi_0..pi_N of the number in system
    std::size_t truncation = 0;
    double tail_bound = 0.0;
};

// Birth-death chain of M/M/1+M: birth lambda, death mu + (n-1) gamma in
// state n >= 1. Throws ArgumentError when the tail cannot be made < 1e-12.
// With gamma = 0 and lambda >= mu only the blocking value is meaningful: the
// distribution is left empty and abandonment is 0.
OracleResult birth_death_abandonment(const OracleSpec& spec);

}  // namespace impatience
