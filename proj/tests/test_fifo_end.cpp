#include <doctest.h>

#include <random>

#include "impatience/errors.hpp"
#include "impatience/estimation.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/fifo_end.hpp"
#include "impatience/sampling.hpp"
#include "oracles.hpp"

using namespace impatience;

namespace {

MarkSource bounded_iid(std::uint64_t seed) {
    return MarkSource::iid({Distribution::uniform(0.5, 1.5), Distribution::uniform(0.0, 0.8),
                            Distribution::uniform(0.0, 0.4)},
                           seed)
        .with_alpha_bound(AlphaKind::sigma_plus_d, 1.2)
        .with_alpha_bound(AlphaKind::d_only, 0.4);
}

}  // namespace

TEST_CASE("end_step substitutions") {
    CHECK(end_step(3.0, {1.0, 4.0, 5.0}) == 4.0);
    CHECK(end_step(6.0, {2.0, 1.0, 5.0}) == 4.0);
    CHECK(end_step(0.0, {1.0, 0.8, 0.9}) == 0.0);
    CHECK(end_step(0.0, {1.0, 3.0, 0.5}) == 0.0);
    CHECK_THROWS_AS(end_step(-1.0, {1.0, 3.0, 0.5}), ArgumentError);
}

TEST_CASE("end_step agrees with the three-case table and the compact form") {
    std::mt19937_64 gen(42);
    std::exponential_distribution<double> e(1.0);
    std::uniform_int_distribution<int> grid(0, 12);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const bool coarse = i % 3 == 0;
        const double s = coarse ? grid(gen) * 0.25 : e(gen);
        const double sigma = coarse ? grid(gen) * 0.25 : e(gen);
        const double d = coarse ? grid(gen) * 0.25 : e(gen);
        const double xi = coarse ? grid(gen) * 0.25 : e(gen);
        const double v = end_step(s, {xi, sigma, d});
        const double scale = 1.0 + s + sigma + d + xi;
        worst = std::max(worst, std::abs(v - oracle::end_three_case(s, sigma, d, xi)) / scale);
        worst = std::max(worst, std::abs(v - oracle::end_compact(s, sigma, d, xi)) / scale);
        if (coarse) {
            // Quarter-grid inputs are exact in binary, so all forms agree exactly.
            CHECK(v == oracle::end_three_case(s, sigma, d, xi));
            CHECK(v == oracle::end_compact(s, sigma, d, xi));
        }
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("end_step is monotone and 1-Lipschitz") {
    std::mt19937_64 gen(7);
    std::exponential_distribution<double> e(1.0);
    for (int i = 0; i < 100000; ++i) {
        const MarkTriple m{e(gen), e(gen), e(gen)};
        const double x = e(gen);
        const double y = x + e(gen) * 0.3;
        const double fx = end_step(x, m);
        const double fy = end_step(y, m);
        CHECK_UNARY(fx <= fy);
        CHECK_UNARY(fy - fx <= (y - x) + 1e-15 * (1.0 + y + m.sigma + m.dpat));
    }
}

TEST_CASE("stationary S on deterministic sources") {
    for (const MarkTriple m : {MarkTriple{1.0, 1.5, 0.2}, MarkTriple{1.0, 0.6, 0.3}}) {
        const auto src = MarkSource::constant(m).with_alpha_bound(AlphaKind::d_only, m.dpat);
        const auto s = sample_stationary_s(src);
        CHECK(s.value == 0.0);
        CHECK(s.method == SampleMethod::renovation_exact);
        const auto l = loynes_stationary_s(src, 1000);
        CHECK(l.converged);
        CHECK(l.value == 0.0);
    }
    CHECK_THROWS_AS(sample_stationary_s(MarkSource::constant({1.0, 0.6, 0.3})), CapabilityError);
}

TEST_CASE("loynes and renovation give the same stationary S") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto src = bounded_iid(seed);
        const auto r = sample_stationary_s(src);
        const auto l = loynes_stationary_s(src, 1 << 20);
        REQUIRE(l.converged);
        CHECK(l.value == r.value);
        // Literal forward oracle from the renovation epoch.
        double s = 0.0;
        for (std::int64_t i = *r.renovation_epoch; i < 0; ++i) {
            const auto mk = src.mark_at(i);
            s = oracle::end_three_case(s, mk.sigma, mk.dpat, mk.xi);
        }
        CHECK(r.value == doctest::Approx(s).epsilon(1e-12));
    }
    // Without a bound the Loynes iterate is flagged.
    const auto unbounded = MarkSource::iid(
        {Distribution::exponential(1.0), Distribution::exponential(1.0), Distribution::exponential(1.0)}, 2);
    CHECK_FALSE(loynes_stationary_s(unbounded, 512).converged);
}

TEST_CASE("end-model sandwich") {
    std::vector<std::int64_t> epochs;
    for (std::int64_t e = -300; e < 300; e += 6) epochs.push_back(e);
    const auto rep = sandwich_check_end(bounded_iid(4), epochs);
    CHECK(rep.violations == 0);
    CHECK(rep.route_mismatches == 0);
    for (const auto& row : rep.rows) {
        CHECK(row.lower <= row.value);
        CHECK(row.value <= row.upper);
    }
}

TEST_CASE("end-model losses on deterministic sources") {
    LossOptions opts;
    opts.samples = 30;
    const auto a = loss_metrics_end(MarkSource::constant({1.0, 1.5, 0.2}).with_alpha_bound(AlphaKind::d_only, 0.2), opts);
    CHECK(a.loss.point == 1.0);
    REQUIRE(a.unreached.has_value());
    CHECK(a.unreached->point == 0.0);
    const auto b = loss_metrics_end(MarkSource::constant({1.0, 0.6, 0.3}).with_alpha_bound(AlphaKind::d_only, 0.3), opts);
    CHECK(b.loss.point == 1.0);
    CHECK(b.unreached->point == 0.0);
    CHECK(b.bracketing_holds);
    const auto c = loss_metrics_end(MarkSource::constant({1.0, 0.2, 0.3}).with_alpha_bound(AlphaKind::d_only, 0.3), opts);
    CHECK(c.loss.point == 0.0);
}

TEST_CASE("never reaching the server is rarer than begin-model loss") {
    const auto src = bounded_iid(8);
    LossOptions opts;
    opts.samples = 4000;
    const auto b = loss_probability_begin(src, opts);
    const auto e = loss_metrics_end(src, opts);
    REQUIRE(e.unreached.has_value());
    CHECK(e.unreached->point <= b.loss.point + 3 * std::hypot(e.unreached->std_error, b.loss.std_error));
    CHECK(e.bracketing_holds);
}

TEST_CASE("pathwise S <= W") {
    for (const MarkTriple m : {MarkTriple{1.0, 1.5, 0.2}, MarkTriple{1.0, 0.6, 0.3}, MarkTriple{0.5, 0.7, 2.0}}) {
        CHECK(compare_disciplines(MarkSource::constant(m), 100).violations == 0);
    }
    const auto expo = MarkSource::iid(
        {Distribution::exponential(1.0), Distribution::exponential(1.1), Distribution::exponential(0.5)}, 12);
    const auto c = compare_disciplines(expo, 100000);
    CHECK(c.violations == 0);
    CHECK(c.horizon == 100000);
    // Independent check on a shorter stretch.
    double s = 0.0;
    double w = 0.0;
    for (std::int64_t i = 0; i < 20000; ++i) {
        const auto mk = expo.mark_at(i);
        s = oracle::end_three_case(s, mk.sigma, mk.dpat, mk.xi);
        w = oracle::fifo(w, mk.sigma, mk.dpat, mk.xi);
        CHECK_UNARY(s <= w);
    }
}

TEST_CASE("exact and forward draws of S have the same law") {
    const auto src = bounded_iid(99);
    std::vector<double> exact;
    std::vector<double> forward;
    SamplingOptions fwd;
    fwd.mode = Exactness::approximate;
    fwd.warmup = 2000;
    for (std::size_t k = 0; k < 2000; ++k) {
        exact.push_back(sample_stationary_s(replica_view(src, k, 2'000'000)).value);
        forward.push_back(sample_stationary_s(src.with_stream(derive_stream(4242, k)), fwd).value);
    }
    CHECK(ks_two_sample(exact, forward) < 0.062);
}
