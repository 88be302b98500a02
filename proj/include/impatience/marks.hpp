#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "impatience/counter_rng.hpp"
#include "impatience/distribution.hpp"

namespace impatience {

// One customer's marks under the Palm probability: interarrival to the next
// customer, requested service, initial patience.
struct MarkTriple {
    double xi = 0.0;
    double sigma = 0.0;
    double dpat = 0.0;

    friend bool operator==(const MarkTriple&, const MarkTriple&) = default;
};

// The alpha marks the dominating recursions are built on.
enum class AlphaKind { sigma_plus_d, sigma_min_d, d_only };

std::string to_string(AlphaKind kind);
double alpha_of(AlphaKind kind, const MarkTriple& m) noexcept;

// Joint law of one MarkTriple with independent components.
struct MarkLaw {
    Distribution xi;
    Distribution sigma;
    Distribution dpat;
};

namespace detail {
struct MarkovState;
}

// Two-sided stationary sequence {(xi_n, sigma_n, D_n)}, n in Z, read by
// index. mark_at is a pure function of (seed, stream, index + offset), so
// shifting the sequence is an index offset and backward schemes can address
// arbitrary negative indices without storing history.
class MarkSource {
public:
    enum class Kind { deterministic, iid, markov_modulated };

    static MarkSource constant(MarkTriple m);
    // Deterministic periodic sequence: mark_at(n) = cycle[n mod cycle.size()].
    static MarkSource pattern(std::vector<MarkTriple> cycle);
    static MarkSource iid(MarkLaw law, std::uint64_t seed, std::uint64_t stream = 0);
    // Marks drawn from laws[state_n], where state_n is a stationary two-sided
    // Markov chain with the given row-stochastic transition matrix.
    static MarkSource markov_modulated(std::vector<std::vector<double>> transition, std::vector<MarkLaw> laws,
                                       std::uint64_t seed, std::uint64_t stream = 0);

    // Declares c as an a.s. upper bound on alpha_of(kind, mark). Throws
    // CapabilityError when the alpha mark has unbounded support and
    // ArgumentError when c is below the support's supremum.
    MarkSource with_alpha_bound(AlphaKind kind, double c) const;
    // Same law on an independent stream; deterministic sources are unchanged.
    MarkSource with_stream(std::uint64_t stream) const;
    MarkSource shift(std::int64_t k) const;

    MarkTriple mark_at(std::int64_t n) const;
    std::vector<MarkTriple> window(std::int64_t from, std::int64_t to) const;

    // Declared bound for kind, falling back on declared bounds of pointwise
    // larger alpha marks (sigma^D <= D <= sigma+D).
    std::optional<double> alpha_bound(AlphaKind kind) const;
    std::optional<double> declared_alpha_bound(AlphaKind kind) const;

    double mean_xi() const;
    double mean_sigma() const;
    double mean_dpat() const;

    Kind kind() const noexcept { return kind_; }
    std::string kind_name() const;
    // True when marks at distinct indices are independent and identically
    // distributed (constant sequences count).
    bool independent_marks() const noexcept;
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }
    std::int64_t offset() const noexcept { return offset_; }

private:
    MarkSource() = default;
    void validate_mean_xi() const;
    std::optional<double> support_sup(AlphaKind kind) const;

    Kind kind_ = Kind::deterministic;
    std::vector<MarkTriple> cycle_;
    std::vector<MarkLaw> laws_;
    std::shared_ptr<detail::MarkovState> markov_;
    std::vector<std::vector<double>> transition_;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::int64_t offset_ = 0;
    std::array<std::optional<double>, 3> bounds_{};
    CounterUniforms uniforms_{0, 0};
};

}  // namespace impatience
