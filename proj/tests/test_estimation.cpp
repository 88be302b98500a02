#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "impatience/counter_rng.hpp"
#include "impatience/errors.hpp"
#include "impatience/estimation.hpp"
#include "oracles.hpp"

using namespace impatience;

TEST_CASE("aggregates of constant outcomes") {
    const std::vector<double> zeros(4, 0.0);
    const auto z = mc_aggregate(zeros);
    CHECK(z.point == 0.0);
    CHECK(z.lower == 0.0);
    CHECK(z.upper > 0.0);
    CHECK(z.interval == Estimate::Interval::wilson);
    const std::vector<double> ones(4, 1.0);
    const auto o = mc_aggregate(ones);
    CHECK(o.point == 1.0);
    CHECK(o.upper == doctest::Approx(1.0));
    CHECK_THROWS_AS(mc_aggregate(std::vector<double>{}), ArgumentError);
}

TEST_CASE("wilson interval against the closed form") {
    // 30 successes out of 100.
    const auto e = wilson_estimate(30, 100);
    const double z = 1.959963984540054;
    const double n = 100.0;
    const double p = 0.3;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    CHECK(e.lower == doctest::Approx(centre - half).epsilon(1e-12));
    CHECK(e.upper == doctest::Approx(centre + half).epsilon(1e-12));
}

TEST_CASE("student t interval") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
    const auto e = student_t_estimate(v);
    CHECK(e.point == 3.0);
    CHECK(e.std_error == doctest::Approx(std::sqrt(2.5 / 5)));
    // t_{0.975, 4} = 2.7764451051977987
    CHECK(e.upper - e.point == doctest::Approx(2.7764451051977987 * e.std_error).epsilon(1e-10));
    const auto mixed = mc_aggregate(v);
    CHECK(mixed.interval == Estimate::Interval::student_t);
}

TEST_CASE("fair coin") {
    CounterUniforms u(2718, 0);
    std::vector<double> flips;
    for (std::int64_t i = 0; i < 10000; ++i) flips.push_back(u.at(i, 0)[0] < 0.5 ? 1.0 : 0.0);
    const auto e = mc_aggregate(flips);
    CHECK(e.point >= 0.47);
    CHECK(e.point <= 0.53);
    CHECK(e.lower <= 0.5);
    CHECK(e.upper >= 0.5);
}

TEST_CASE("aggregation is permutation invariant") {
    std::mt19937_64 gen(1);
    std::lognormal_distribution<double> ln(0.0, 3.0);
    std::vector<double> v;
    for (int i = 0; i < 5000; ++i) v.push_back(ln(gen));
    const auto a = mc_aggregate(v);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(v.begin(), v.end(), gen);
        const auto b = mc_aggregate(v);
        CHECK(a.point == b.point);
        CHECK(a.std_error == b.std_error);
        CHECK(stable_sum(v) == stable_sum(std::vector<double>(v.rbegin(), v.rend())));
    }
}

TEST_CASE("ks statistic") {
    const std::vector<double> a{0.3, 1.0, 2.5, 2.5};
    CHECK(ks_two_sample(a, a) == 0.0);
    CHECK(ks_two_sample(std::vector<double>{0.0}, std::vector<double>{1.0}) == 1.0);
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, a), ArgumentError);
    // Ties across samples: {0,1} vs {1,1}: F_a(0)=.5, F_b(0)=0.
    CHECK(ks_two_sample(std::vector<double>{0, 1}, std::vector<double>{1, 1}) == 0.5);

    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 10000; ++i) {
        x.push_back(nd(gen));
        y.push_back(nd(gen));
    }
    const double d = ks_two_sample(x, y);
    // Critical value at 1% for 10^4 vs 10^4 is 1.628 * sqrt(2e-4) = 0.023.
    CHECK(d < 0.023);
    CHECK(ks_two_sample(y, x) == d);
    auto tx = x;
    auto ty = y;
    for (auto& v : tx) v = std::exp(v);
    for (auto& v : ty) v = std::exp(v);
    CHECK(ks_two_sample(tx, ty) == d);
}

TEST_CASE("bracketing with slack") {
    Estimate lo{0.10, 0, 0, 0.01, 100};
    Estimate mid{0.08, 0, 0, 0.01, 100};
    Estimate hi{0.5, 0, 0, 0.01, 100};
    CHECK(bracket_within(lo, mid, hi, 3.0));
    mid.point = 0.0;
    CHECK_FALSE(bracket_within(lo, mid, hi, 3.0));
}

TEST_CASE("birth-death oracle") {
    const auto mm11 = birth_death_abandonment({1.0, 1.0, 0.0});
    CHECK(mm11.blocking == doctest::Approx(0.5).epsilon(1e-14));

    for (const auto& [l, m, g] : {std::tuple{0.8, 1.0, 0.5}, std::tuple{1.2, 1.0, 1.0}, std::tuple{3.0, 0.5, 0.1}}) {
        const auto r = birth_death_abandonment({l, m, g});
        const auto ref = oracle::mm1m(l, m, g);
        CHECK(r.abandonment == doctest::Approx(ref.abandonment).epsilon(1e-10));
        double total = 0.0;
        for (double p : r.distribution) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(r.tail_bound < 1e-12);
        // Flow balance: abandonments + completions = arrivals.
        CHECK(r.abandonment + m * (1.0 - r.distribution[0]) / l == doctest::Approx(1.0).epsilon(1e-10));
    }

    // Larger patience rates approach M/M/1/1 blocking monotonically.
    double prev = 0.0;
    for (double g : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
        const auto r = birth_death_abandonment({0.9, 1.0, g});
        CHECK(r.abandonment >= prev);
        prev = r.abandonment;
    }
    CHECK(prev == doctest::Approx(0.9 / 1.9).epsilon(1e-3));

    CHECK(birth_death_abandonment({1e-6, 1.0, 1.0}).abandonment < 1e-6);
    CHECK_THROWS_AS(birth_death_abandonment({-1.0, 1.0, 1.0}), ArgumentError);
}

TEST_CASE("counter rng is reproducible and uniform") {
    CounterUniforms a(1, 2);
    CounterUniforms b(1, 2);
    double s = 0.0;
    for (std::int64_t i = -5000; i < 5000; ++i) {
        const auto x = a.at(i, 0);
        CHECK(x == b.at(i, 0));
        CHECK((x[0] >= 0.0 && x[0] < 1.0));
        s += x[0] + x[1];
    }
    CHECK(s / 20000 == doctest::Approx(0.5).epsilon(0.02));
    CHECK(a.at(0, 0) != CounterUniforms(1, 3).at(0, 0));
    CHECK(a.at(0, 0) != a.at(0, 1));
}
