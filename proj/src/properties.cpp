#include "impatience/properties.hpp"

#include <algorithm>
#include <cmath>

#include "impatience/counter_rng.hpp"
#include "impatience/des.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/fifo_end.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

std::size_t PropertySuiteResult::total_violations() const noexcept {
    std::size_t t = 0;
    for (const auto& c : counts) t += c.violations;
    return t;
}

const PropertyCount* PropertySuiteResult::find(const std::string& name) const noexcept {
    for (const auto& c : counts) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

TupleGenerator::Tuple TupleGenerator::at(std::int64_t i) const {
    const CounterUniforms u(seed, 0x70C0FFEEull);
    const auto a = u.at(i, 0);
    const auto b = u.at(i, 1);
    const auto c = u.at(i, 2);
    auto draw = [](double u1, double u2) {
        // Grid values in {0, 0.25, ..., 3} a quarter of the time, else
        // exponential with mean 1.
        if (u1 < 0.25) return std::floor(u2 * 13.0) * 0.25;
        return -std::log1p(-u2);
    };
    MarkTriple m{draw(a[0], a[1]), draw(b[0], b[1]), draw(c[0], c[1])};
    double x;
    const auto d = u.at(i, 3);
    switch (i % 6) {
        case 0: x = 0.0; break;
        case 2: x = m.dpat; break;
        case 4: x = m.dpat + m.sigma; break;
        default: x = draw(d[0], d[1]) * 2.0; break;
    }
    return {x, m};
}

PropertySuiteResult run_pointwise_suite(std::size_t tuples, std::uint64_t seed) {
    PropertyCount ineq{"ineq"};
    PropertyCount ineq2{"ineq2"};
    PropertyCount ineq3{"ineq3"};
    PropertyCount begin_sandwich{"begin_sandwich"};
    PropertyCount end_sandwich{"end_sandwich"};
    PropertyCount end_below_begin{"end_le_fifo"};
    PropertyCount monotone{"monotone"};
    PropertyCount lipschitz{"lipschitz"};

    const TupleGenerator gen{seed};
    const TupleGenerator partner{seed ^ 0xABCDEF12345ull};
    const auto plus = RecursionSpec::sigma_plus_d();
    const auto minimum = RecursionSpec::sigma_min_d();
    const auto donly = RecursionSpec::d_only();
    auto tally = [](PropertyCount& c, bool ok) {
        ++c.checked;
        if (!ok) ++c.violations;
    };

    for (std::size_t k = 0; k < tuples; ++k) {
        const auto [x, m] = gen.at(static_cast<std::int64_t>(k));
        const double begin_level = x <= m.dpat ? x + m.sigma : x;
        const double level = end_level(x, m);
        tally(ineq, begin_level <= std::max(x, m.dpat + m.sigma));
        tally(ineq2, level <= std::min(std::max(x, m.dpat), begin_level));
        tally(ineq3, std::max(x, std::min(m.dpat, m.sigma)) <= level);

        const double f = fifo_step(x, m);
        const double e = end_step(x, m);
        tally(begin_sandwich, step(x, m, minimum) <= f && f <= step(x, m, plus));
        tally(end_sandwich, step(x, m, minimum) <= e && e <= step(x, m, donly));
        tally(end_below_begin, e <= f);

        const double other = partner.at(static_cast<std::int64_t>(k)).x;
        const double lo = std::min(x, other);
        const double hi = std::max(x, other);
        tally(monotone, step(lo, m, plus) <= step(hi, m, plus) && step(lo, m, minimum) <= step(hi, m, minimum) &&
                            end_step(lo, m) <= end_step(hi, m));
        // One rounding of slack per operation on each side.
        const double scale = std::max({hi, m.sigma, m.dpat, m.xi, 1.0});
        tally(lipschitz, end_step(hi, m) - end_step(lo, m) <= (hi - lo) + 8.0 * scale * 0x1.0p-52);
    }
    return {{ineq, ineq2, ineq3, begin_sandwich, end_sandwich, end_below_begin, monotone, lipschitz}};
}

PropertySuiteResult run_inclusion_suite(const MarkSource& src, std::size_t min_events) {
    PropertySuiteResult out;
    for (const auto model : {ImpatienceModel::begin, ImpatienceModel::end}) {
        for (const unsigned servers : {1u, 2u, 4u}) {
            const std::string tag = to_string(model) + "/s=" + std::to_string(servers);
            PropertyCount inclusion{"inclusions/" + tag};
            PropertyCount sojourn{"sojourn/" + tag};
            PropertyCount idle{"non_idling/" + tag};
            PropertyCount balance{"balance/" + tag};
            // Each customer produces between two and three events.
            Scenario scn{servers, model, src, static_cast<std::int64_t>(min_events / 2 + 1)};
            const SimulationResult run = simulate(scn);
            const PathStatistics& st = run.stats;
            inclusion.checked = st.events;
            inclusion.violations = st.inclusion_violations;
            sojourn.checked = st.arrivals;
            sojourn.violations = st.sojourn_violations;
            idle.checked = st.events;
            idle.violations = st.idle_with_queue;
            balance.checked = 1;
            balance.violations = st.arrivals == st.served + st.abandoned + st.aborted + st.in_system_at_end ? 0 : 1;
            out.counts.insert(out.counts.end(), {inclusion, sojourn, idle, balance});
        }
    }
    return out;
}

}  // namespace impatience
