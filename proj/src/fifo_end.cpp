#include "impatience/fifo_end.hpp"

#include <algorithm>
#include <cmath>

#include "impatience/errors.hpp"
#include "impatience/parallel.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

double end_level(double s, const MarkTriple& mark) noexcept {
    if (s > mark.dpat) return s;
    return std::min(s + mark.sigma, mark.dpat);
}

double end_step(double s, const MarkTriple& mark) {
    if (!(s >= 0.0)) throw ArgumentError("workload must be nonnegative");
    const double v = end_level(s, mark) - mark.xi;
    return v > 0.0 ? v : 0.0;
}

StationarySample sample_stationary_s(const MarkSource& src, const SamplingOptions& opts) {
    StationarySample out;
    if (opts.mode == Exactness::exact) {
        const Renovation r = find_zero_epoch(RecursionSpec::d_only(), src, opts.max_epochs, opts.max_depth);
        double s = 0.0;
        for (std::int64_t i = r.epoch; i < 0; ++i) s = end_step(s, src.mark_at(i));
        out.value = s;
        out.method = SampleMethod::renovation_exact;
        out.renovation_epoch = r.epoch;
        out.certificate = r.certificate;
        return out;
    }
    if (opts.warmup < 0) throw ArgumentError("warm-up length must be nonnegative");
    double s = 0.0;
    for (std::int64_t i = -opts.warmup; i < 0; ++i) s = end_step(s, src.mark_at(i));
    out.value = s;
    out.method = SampleMethod::forward_approximate;
    return out;
}

LoynesResult loynes_stationary_s(const MarkSource& src, std::int64_t max_depth) {
    if (max_depth < 1) throw ArgumentError("loynes_stationary_s needs max_depth >= 1");
    const auto ceiling = src.alpha_bound(AlphaKind::d_only);
    if (ceiling) {
        for (std::int64_t k = 1; k <= max_depth; k *= 2) {
            double low = 0.0;
            double high = *ceiling;
            for (std::int64_t i = -k; i < 0; ++i) {
                const MarkTriple m = src.mark_at(i);
                low = end_step(low, m);
                high = end_step(high, m);
            }
            if (low == high) return {low, k, true};
            if (k > max_depth / 2) break;
        }
    }
    double s = 0.0;
    for (std::int64_t i = -max_depth; i < 0; ++i) s = end_step(s, src.mark_at(i));
    return {s, max_depth, false};
}

SandwichReport sandwich_check_end(const MarkSource& src, std::span<const std::int64_t> epochs,
                                  const SamplingOptions& opts) {
    const auto upper_spec = RecursionSpec::d_only();
    const auto lower_spec = RecursionSpec::sigma_min_d();
    SandwichReport report;
    for (const std::int64_t e : epochs) {
        const MarkSource view = src.shift(e);
        const Renovation r = find_zero_epoch(upper_spec, view, opts.max_epochs, opts.max_depth);
        SandwichRow row;
        row.epoch = e;
        for (std::int64_t i = r.epoch; i < 0; ++i) {
            const MarkTriple m = view.mark_at(i);
            row.lower = step(row.lower, m, lower_spec);
            row.value = end_step(row.value, m);
            row.upper = step(row.upper, m, upper_spec);
        }
        const double lower_direct = backward_supremum(lower_spec, view, 0, opts.max_depth).value;
        const double upper_direct = backward_supremum(upper_spec, view, 0, opts.max_depth).value;
        row.route_discrepancy = std::max(std::abs(lower_direct - row.lower), std::abs(upper_direct - row.upper));
        if (row.route_discrepancy > kRouteTolerance) ++report.route_mismatches;
        if (row.lower > row.value || row.value > row.upper) ++report.violations;
        report.rows.push_back(row);
    }
    return report;
}

namespace {

struct EndIndicators {
    std::size_t loss = 0;
    std::size_t unreached = 0;
    std::size_t lower = 0;
    std::size_t upper = 0;
    std::size_t count = 0;

    void add(double s, double m, double u, const MarkTriple& mk) {
        const double slack = mk.dpat - mk.sigma;
        loss += s > slack ? 1 : 0;
        unreached += s > mk.dpat ? 1 : 0;
        lower += m > slack ? 1 : 0;
        upper += u > slack ? 1 : 0;
        ++count;
    }
};

}  // namespace

LossReport loss_metrics_end(const MarkSource& src, const LossOptions& opts) {
    if (opts.samples == 0) throw ArgumentError("loss estimation needs samples >= 1");
    const auto upper_spec = RecursionSpec::d_only();
    const auto lower_spec = RecursionSpec::sigma_min_d();

    LossReport report;
    report.model = "end";
    report.samples = opts.samples;
    report.seed = src.seed();
    report.stream = src.stream_id();

    if (opts.sampling.mode == Exactness::exact) {
        std::vector<EndIndicators> per(opts.samples);
        const std::int64_t spacing = 2 * std::max<std::int64_t>(opts.sampling.max_depth, 1);
        parallel_for(opts.samples, opts.workers, [&](std::size_t k) {
            const MarkSource view = replica_view(src, k, spacing);
            const std::int64_t epoch = 0;
            const SandwichReport s = sandwich_check_end(view, std::span(&epoch, 1), opts.sampling);
            if (s.violations != 0) throw ContractViolation("sandwich violated at replica " + std::to_string(k));
            const SandwichRow& row = s.rows.front();
            per[k].add(row.value, row.lower, row.upper, view.mark_at(0));
        });
        EndIndicators total;
        for (const auto& p : per) {
            total.loss += p.loss;
            total.unreached += p.unreached;
            total.lower += p.lower;
            total.upper += p.upper;
        }
        report.method = to_string(SampleMethod::renovation_exact);
        report.replicas = opts.samples;
        report.loss = wilson_estimate(total.loss, opts.samples);
        report.unreached = wilson_estimate(total.unreached, opts.samples);
        report.lower_bound = wilson_estimate(total.lower, opts.samples);
        report.upper_bound = wilson_estimate(total.upper, opts.samples);
    } else {
        const std::size_t replicas = std::clamp<std::size_t>(opts.replicas, 1, opts.samples);
        std::vector<EndIndicators> per(replicas);
        parallel_for(replicas, opts.workers, [&](std::size_t r) {
            const MarkSource view =
                replica_view(src, r, opts.sampling.warmup + static_cast<std::int64_t>(opts.samples));
            const std::size_t count = opts.samples / replicas + (r < opts.samples % replicas ? 1 : 0);
            double s = 0.0;
            double m = 0.0;
            double u = 0.0;
            const std::int64_t end = opts.sampling.warmup + static_cast<std::int64_t>(count);
            for (std::int64_t i = 0; i < end; ++i) {
                const MarkTriple mk = view.mark_at(i);
                if (i >= opts.sampling.warmup) per[r].add(s, m, u, mk);
                s = end_step(s, mk);
                m = step(m, mk, lower_spec);
                u = step(u, mk, upper_spec);
            }
        });
        auto fractions = [&](auto field) {
            std::vector<double> f(replicas);
            for (std::size_t r = 0; r < replicas; ++r) {
                f[r] = static_cast<double>(per[r].*field) / static_cast<double>(per[r].count);
            }
            return f;
        };
        auto pooled = [&](auto field) {
            std::size_t t = 0;
            for (const auto& p : per) t += p.*field;
            return wilson_estimate(t, opts.samples);
        };
        auto estimate = [&](auto field) {
            return replicas >= 2 ? student_t_estimate(fractions(field)) : pooled(field);
        };
        report.method = to_string(SampleMethod::forward_approximate);
        report.replicas = replicas;
        report.loss = estimate(&EndIndicators::loss);
        report.unreached = estimate(&EndIndicators::unreached);
        report.lower_bound = estimate(&EndIndicators::lower);
        report.upper_bound = estimate(&EndIndicators::upper);
    }
    report.bracketing_holds = bracket_within(report.lower_bound, report.loss, report.upper_bound, opts.se_slack);
    return report;
}

DisciplineComparison compare_disciplines(const MarkSource& src, std::int64_t horizon) {
    if (horizon < 1) throw ArgumentError("compare_disciplines needs horizon >= 1");
    DisciplineComparison out;
    out.horizon = horizon;
    double s = 0.0;
    double w = 0.0;
    for (std::int64_t n = 0; n <= horizon; ++n) {
        if (s > w) ++out.violations;
        if (n == horizon) break;
        const MarkTriple m = src.mark_at(n);
        s = end_step(s, m);
        w = fifo_step(w, m);
    }
    return out;
}

}  // namespace impatience
