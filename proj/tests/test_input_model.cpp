#include <doctest.h>

#include <cmath>
#include <numeric>

#include "impatience/errors.hpp"
#include "impatience/marks.hpp"

using namespace impatience;

namespace {

MarkSource bounded_iid(std::uint64_t seed = 11) {
    return MarkSource::iid({Distribution::uniform(0.5, 1.5), Distribution::uniform(0.0, 0.8),
                            Distribution::uniform(0.0, 0.4)},
                           seed);
}

MarkSource two_state_markov(std::uint64_t seed = 5) {
    return MarkSource::markov_modulated(
        {{0.9, 0.1}, {0.3, 0.7}},
        {{Distribution::exponential(2.0), Distribution::deterministic(0.2), Distribution::uniform(0.0, 1.0)},
         {Distribution::exponential(0.5), Distribution::deterministic(1.0), Distribution::uniform(0.0, 0.1)}},
        seed);
}

}  // namespace

TEST_CASE("deterministic source returns its triple at negative indices") {
    const auto src = MarkSource::constant({1.0, 0.6, 0.3});
    CHECK(src.mark_at(-5) == MarkTriple{1.0, 0.6, 0.3});
}

TEST_CASE("mark_at is pure") {
    for (const auto& src : {bounded_iid(), two_state_markov()}) {
        CHECK(src.mark_at(7) == src.mark_at(7));
        const auto first = src.window(-300, 300);
        CHECK(src.window(-300, 300) == first);
        // Access order must not matter.
        const auto fresh = src.with_stream(src.stream_id());
        CHECK(fresh.mark_at(250) == first[550]);
        CHECK(fresh.mark_at(-280) == first[20]);
    }
}

TEST_CASE("alpha bound on unbounded support is rejected at construction") {
    const auto src = MarkSource::iid(
        {Distribution::exponential(1.0), Distribution::exponential(1.0), Distribution::exponential(1.0)}, 3);
    CHECK_THROWS_AS(src.with_alpha_bound(AlphaKind::sigma_plus_d, 10.0), CapabilityError);
    CHECK_THROWS_AS(bounded_iid().with_alpha_bound(AlphaKind::sigma_plus_d, 1.0), ArgumentError);
    CHECK_NOTHROW(bounded_iid().with_alpha_bound(AlphaKind::sigma_plus_d, 1.2));
}

TEST_CASE("shift is an index offset and composes") {
    for (const auto& src : {bounded_iid(), two_state_markov()}) {
        CHECK(src.shift(0).window(-20, 20) == src.window(-20, 20));
        CHECK(src.shift(3).mark_at(2) == src.mark_at(5));
        CHECK(src.shift(4).shift(-9).window(-10, 10) == src.shift(-5).window(-10, 10));
        for (std::int64_t k : {-17, -1, 1, 40}) {
            for (std::int64_t n : {-30, 0, 12}) CHECK(src.shift(k).mark_at(n) == src.mark_at(n + k));
        }
    }
}

TEST_CASE("window singleton, constant, and concatenation") {
    const auto src = bounded_iid();
    CHECK(src.window(0, 0) == std::vector<MarkTriple>{src.mark_at(0)});
    const auto c = MarkSource::constant({1.0, 0.6, 0.3});
    const auto w = c.window(-2, 1);
    REQUIRE(w.size() == 4);
    for (const auto& m : w) CHECK(m == MarkTriple{1.0, 0.6, 0.3});
    auto left = src.window(-8, 3);
    const auto right = src.window(4, 15);
    left.insert(left.end(), right.begin(), right.end());
    CHECK(left == src.window(-8, 15));
    CHECK_THROWS_AS(src.window(2, 1), ArgumentError);
}

TEST_CASE("pattern source cycles in both directions") {
    const auto src = MarkSource::pattern({{1, 3, 0}, {1, 5, 0}, {1, 1, 0}});
    CHECK(src.mark_at(0).sigma == 3);
    CHECK(src.mark_at(4).sigma == 5);
    CHECK(src.mark_at(-1).sigma == 1);
    CHECK(src.mark_at(-3).sigma == 3);
}

TEST_CASE("marks are nonnegative, finite and respect declared bounds") {
    const auto src = bounded_iid(17)
                         .with_alpha_bound(AlphaKind::sigma_plus_d, 1.2)
                         .with_alpha_bound(AlphaKind::d_only, 0.4);
    double max_spd = 0.0;
    double max_d = 0.0;
    for (const auto& m : src.window(-50000, 50000)) {
        CHECK((m.xi >= 0 && m.sigma >= 0 && m.dpat >= 0));
        CHECK((std::isfinite(m.xi) && std::isfinite(m.sigma) && std::isfinite(m.dpat)));
        max_spd = std::max(max_spd, m.sigma + m.dpat);
        max_d = std::max(max_d, m.dpat);
    }
    CHECK(max_spd <= *src.alpha_bound(AlphaKind::sigma_plus_d));
    CHECK(max_d <= *src.alpha_bound(AlphaKind::d_only));
    // sigma^D <= D, so the D bound covers it.
    CHECK(*src.alpha_bound(AlphaKind::sigma_min_d) == doctest::Approx(0.4));
    CHECK_FALSE(src.declared_alpha_bound(AlphaKind::sigma_min_d).has_value());
}

TEST_CASE("iid xi means agree across disjoint windows") {
    const auto src = bounded_iid(23);
    auto window_mean = [&](std::int64_t from) {
        const auto w = src.window(from, from + 99999);
        double s = 0.0;
        for (const auto& m : w) s += m.xi;
        return s / 1e5;
    };
    // Var of U(0.5, 1.5) is 1/12; the difference of two means has SE sqrt(2/12e5).
    const double se = std::sqrt(2.0 / 12.0 / 1e5);
    CHECK(std::abs(window_mean(-200000) - window_mean(500000)) < 5 * se);
    CHECK(std::abs(window_mean(0) - 1.0) < 5 * std::sqrt(1.0 / 12.0 / 1e5));
}

TEST_CASE("streams are independent") {
    const auto a = bounded_iid(1);
    const auto b = a.with_stream(9);
    int equal = 0;
    for (std::int64_t i = 0; i < 1000; ++i) equal += a.mark_at(i) == b.mark_at(i) ? 1 : 0;
    CHECK(equal == 0);
}

TEST_CASE("markov-modulated source is stationary on both sides of 0") {
    // Stationary law of [[0.9,0.1],[0.3,0.7]] is (0.75, 0.25); in state 0
    // sigma = 0.2, in state 1 sigma = 1.0.
    const auto src = two_state_markov(99);
    auto frac_state1 = [&](std::int64_t from, std::int64_t to) {
        std::int64_t c = 0;
        for (const auto& m : src.window(from, to)) c += m.sigma == 1.0 ? 1 : 0;
        return static_cast<double>(c) / static_cast<double>(to - from + 1);
    };
    // Chain autocorrelation 0.6 inflates the variance by (1+0.6)/(1-0.6) = 4.
    const double se = std::sqrt(0.25 * 0.75 * 4.0 / 2e5);
    CHECK(std::abs(frac_state1(-200000, -1) - 0.25) < 5 * se);
    CHECK(std::abs(frac_state1(0, 199999) - 0.25) < 5 * se);
    // Time reversal: pairs (state_n, state_{n+1}) have the forward kernel
    // on the negative side too.
    std::int64_t from0 = 0;
    std::int64_t stay0 = 0;
    const auto w = src.window(-200000, 0);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i].sigma == 0.2) {
            ++from0;
            stay0 += w[i + 1].sigma == 0.2 ? 1 : 0;
        }
    }
    CHECK(static_cast<double>(stay0) / static_cast<double>(from0) == doctest::Approx(0.9).epsilon(0.01));
}

TEST_CASE("invalid sources are rejected") {
    CHECK_THROWS_AS(MarkSource::constant({0.0, 1.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(MarkSource::constant({1.0, -1.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(Distribution::uniform(2.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(Distribution::discrete({1.0, 2.0}, {0.5, 0.6}), ArgumentError);
    CHECK_THROWS_AS(MarkSource::markov_modulated({{0.5, 0.4}, {0.5, 0.5}},
                                                 {{Distribution::deterministic(1), Distribution::deterministic(1),
                                                   Distribution::deterministic(1)},
                                                  {Distribution::deterministic(1), Distribution::deterministic(1),
                                                   Distribution::deterministic(1)}},
                                                 1),
                    ArgumentError);
    // Batches (xi = 0 with positive probability) are fine as long as E[xi] > 0.
    CHECK_NOTHROW(MarkSource::iid({Distribution::discrete({0.0, 2.0}, {0.5, 0.5}), Distribution::deterministic(1),
                                   Distribution::deterministic(1)},
                                  1));
}

TEST_CASE("distribution samples stay in support and match means") {
    const Distribution te = Distribution::truncated_exponential(2.0, 1.0);
    CHECK(te.upper_bound() == 1.0);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = te.sample((i + 0.5) / 100000.0);
        CHECK((x >= 0.0 && x <= 1.0));
        s += x;
    }
    CHECK(s / 100000.0 == doctest::Approx(te.mean()).epsilon(1e-4));
    const Distribution d = Distribution::discrete({1.0, 3.0}, {0.25, 0.75});
    CHECK(d.mean() == doctest::Approx(2.5));
    CHECK(d.sample(0.1) == 1.0);
    CHECK(d.sample(0.3) == 3.0);
    CHECK_FALSE(Distribution::exponential(1.0).upper_bound().has_value());
}
