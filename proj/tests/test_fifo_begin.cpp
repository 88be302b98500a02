#include <doctest.h>

#include "impatience/errors.hpp"
#include "impatience/estimation.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/sampling.hpp"
#include "oracles.hpp"

using namespace impatience;

namespace {

MarkSource bounded_iid(std::uint64_t seed) {
    return MarkSource::iid({Distribution::uniform(0.5, 1.5), Distribution::uniform(0.0, 0.8),
                            Distribution::uniform(0.0, 0.4)},
                           seed)
        .with_alpha_bound(AlphaKind::sigma_plus_d, 1.2);
}

const MarkSource kLight = MarkSource::constant({1.0, 0.6, 0.3});

}  // namespace

TEST_CASE("fifo_step substitutions") {
    CHECK(fifo_step(3.0, {1.0, 2.0, 5.0}) == 4.0);
    CHECK(fifo_step(3.0, {4.0, 2.0, 2.0}) == 0.0);
    CHECK(fifo_step(0.0, {1.0, 0.7, 0.0}) == 0.0);
    CHECK(fifo_step(0.0, {1.0, 1.0, 3.0}) == 0.0);
    // W exactly equal to D is served.
    CHECK(fifo_step(2.0, {1.0, 1.0, 2.0}) == 2.0);
    CHECK_THROWS_AS(fifo_step(-0.5, {1.0, 1.0, 2.0}), ArgumentError);
}

TEST_CASE("fifo_step is not monotone in the workload") {
    // x = D is served, x = D + eps is not.
    const MarkTriple m{1.0, 1.0, 0.5};
    const double x = 0.5;
    const double y = 0.5 + 0.1;
    CHECK(x <= y);
    CHECK(fifo_step(x, m) > fifo_step(y, m));
    CHECK(fifo_step(x, m) == doctest::Approx(0.5));
    CHECK(fifo_step(y, m) == 0.0);
}

TEST_CASE("renovation epochs on simple sources") {
    const auto r = find_renovation_epoch(
        MarkSource::constant({1.0, 0.5, 0.4}).with_alpha_bound(AlphaKind::sigma_plus_d, 0.9), 100, 100);
    CHECK(r.epoch == -1);
    CHECK(r.certificate.depth == 1);
    CHECK(r.certificate.epoch == -1);

    const auto over = MarkSource::constant({1.0, 1.5, 0.2}).with_alpha_bound(AlphaKind::sigma_plus_d, 1.7);
    CHECK_THROWS_AS(find_renovation_epoch(over, 1000, 1000), RenovationNotFound);

    const auto dominated = MarkSource::iid({Distribution::deterministic(1.0), Distribution::uniform(0.0, 0.25),
                                            Distribution::uniform(0.0, 0.25)},
                                           2)
                               .with_alpha_bound(AlphaKind::sigma_plus_d, 0.5);
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(find_renovation_epoch(dominated.with_stream(s), 10, 10).epoch == -1);

    const auto unbounded = MarkSource::iid(
        {Distribution::exponential(1.0), Distribution::exponential(2.0), Distribution::exponential(2.0)}, 1);
    CHECK_THROWS_AS(find_renovation_epoch(unbounded, 10, 10), CapabilityError);
}

TEST_CASE("stationary W on deterministic sources") {
    const auto exact = sample_stationary_w(kLight.with_alpha_bound(AlphaKind::sigma_plus_d, 0.9));
    CHECK(exact.value == 0.0);
    CHECK(exact.method == SampleMethod::renovation_exact);
    REQUIRE(exact.certificate.has_value());
    CHECK(exact.certificate->epoch == *exact.renovation_epoch);

    SamplingOptions approx;
    approx.mode = Exactness::approximate;
    approx.warmup = 1;
    const auto a = sample_stationary_w(MarkSource::constant({1.0, 0.4, 2.0}), approx);
    CHECK(a.value == 0.0);
    CHECK(a.method == SampleMethod::forward_approximate);
    CHECK_FALSE(a.certificate.has_value());

    CHECK_THROWS_AS(sample_stationary_w(kLight), CapabilityError);
}

TEST_CASE("exact sample equals the forward replay from any deeper zero") {
    const auto spec = RecursionSpec::sigma_plus_d();
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto src = bounded_iid(seed).shift(1000);
        const auto s = sample_stationary_w(src);
        const std::int64_t m = *s.renovation_epoch;
        // Replay oracle from the renovation epoch.
        double w = 0.0;
        for (std::int64_t i = m; i < 0; ++i) {
            const auto mk = src.mark_at(i);
            w = oracle::fifo(w, mk.sigma, mk.dpat, mk.xi);
        }
        CHECK(s.value == w);
        // Deeper zeros give the same value, and so does any start in
        // [0, Y] at an earlier epoch.
        int deeper = 0;
        for (std::int64_t e = m - 1; e > m - 200 && deeper < 3; --e) {
            const double y = backward_supremum(spec, src, e, 100000).value;
            double z = e % 2 == 0 ? 0.0 : y * 0.5;
            if (y == 0.0) ++deeper;
            for (std::int64_t i = e; i < 0; ++i) {
                if (i == m) CHECK(z == 0.0);
                z = fifo_step(z, src.mark_at(i));
            }
            CHECK(z == s.value);
        }
    }
}

TEST_CASE("sandwich rows") {
    const auto light = kLight.with_alpha_bound(AlphaKind::sigma_plus_d, 0.9);
    const std::int64_t e0 = 0;
    const auto r = sandwich_check(light, std::span(&e0, 1));
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].lower == 0.0);
    CHECK(r.rows[0].value == 0.0);
    CHECK(r.rows[0].upper == 0.0);

    std::vector<std::int64_t> epochs;
    for (std::int64_t e = -500; e < 500; e += 10) epochs.push_back(e);
    const auto rep = sandwich_check(bounded_iid(9), epochs);
    CHECK(rep.violations == 0);
    CHECK(rep.route_mismatches == 0);
    std::size_t positive = 0;
    for (const auto& row : rep.rows) {
        CHECK(row.lower <= row.value);
        CHECK(row.value <= row.upper);
        positive += row.upper > 0.0 ? 1 : 0;
    }
    CHECK(positive > 0);
}

TEST_CASE("loss on the light deterministic source is zero") {
    LossOptions opts;
    opts.samples = 50;
    const auto rep = loss_probability_begin(kLight.with_alpha_bound(AlphaKind::sigma_plus_d, 0.9), opts);
    CHECK(rep.loss.point == 0.0);
    CHECK(rep.lower_bound.point == 0.0);
    CHECK(rep.upper_bound.point == 0.0);
    CHECK(rep.method == "renovation-exact");
    CHECK(rep.bracketing_holds);
}

TEST_CASE("exact and forward draws of W have the same law") {
    const auto src = bounded_iid(2024);
    std::vector<double> exact;
    std::vector<double> forward;
    SamplingOptions fwd;
    fwd.mode = Exactness::approximate;
    fwd.warmup = 2000;
    std::size_t served = 0;
    for (std::size_t k = 0; k < 2000; ++k) {
        const MarkSource view = replica_view(src, k, 2'000'000);
        exact.push_back(sample_stationary_w(view).value);
        served += exact.back() <= view.mark_at(0).dpat ? 1 : 0;
        forward.push_back(sample_stationary_w(src.with_stream(derive_stream(777, k)), fwd).value);
    }
    // 99.9% two-sample KS critical value for 2000 vs 2000 is about 0.062.
    CHECK(ks_two_sample(exact, forward) < 0.062);
    CHECK(served > 0);
}

TEST_CASE("M/M/1/1 corner of the begin model") {
    const auto src = MarkSource::iid(
        {Distribution::exponential(1.0), Distribution::exponential(1.0), Distribution::deterministic(0.0)}, 61);
    LossOptions opts;
    opts.sampling.mode = Exactness::approximate;
    opts.sampling.warmup = 1000;
    opts.samples = 200000;
    opts.replicas = 10;
    const auto rep = loss_probability_begin(src, opts);
    CHECK(rep.method == "forward-approximate");
    CHECK(std::abs(rep.loss.point - 0.5) < std::max(3 * rep.loss.std_error, 0.005));
    CHECK(rep.bracketing_holds);
}

TEST_CASE("loss estimates are independent of the worker count") {
    LossOptions opts;
    opts.samples = 400;
    opts.workers = 1;
    const auto a = loss_probability_begin(bounded_iid(3), opts);
    opts.workers = 3;
    const auto b = loss_probability_begin(bounded_iid(3), opts);
    CHECK(a.loss.point == b.loss.point);
    CHECK(a.upper_bound.upper == b.upper_bound.upper);
}
