#include "impatience/fifo_begin.hpp"

#include <algorithm>
#include <cmath>

#include "impatience/errors.hpp"
#include "impatience/parallel.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

double fifo_step(double w, const MarkTriple& mark) {
    if (!(w >= 0.0)) throw ArgumentError("workload must be nonnegative");
    const double v = (served_begin(w, mark) ? w + mark.sigma : w) - mark.xi;
    return v > 0.0 ? v : 0.0;
}

Renovation find_renovation_epoch(const MarkSource& src, std::int64_t max_epochs, std::int64_t max_depth) {
    return find_zero_epoch(RecursionSpec::sigma_plus_d(), src, max_epochs, max_depth);
}

StationarySample sample_stationary_w(const MarkSource& src, const SamplingOptions& opts) {
    StationarySample out;
    if (opts.mode == Exactness::exact) {
        const Renovation r = find_renovation_epoch(src, opts.max_epochs, opts.max_depth);
        double w = 0.0;
        for (std::int64_t i = r.epoch; i < 0; ++i) w = fifo_step(w, src.mark_at(i));
        out.value = w;
        out.method = SampleMethod::renovation_exact;
        out.renovation_epoch = r.epoch;
        out.certificate = r.certificate;
        return out;
    }
    if (opts.warmup < 0) throw ArgumentError("warm-up length must be nonnegative");
    double w = 0.0;
    for (std::int64_t i = -opts.warmup; i < 0; ++i) w = fifo_step(w, src.mark_at(i));
    out.value = w;
    out.method = SampleMethod::forward_approximate;
    return out;
}

SandwichReport sandwich_check(const MarkSource& src, std::span<const std::int64_t> epochs,
                              const SamplingOptions& opts) {
    const auto upper_spec = RecursionSpec::sigma_plus_d();
    const auto lower_spec = RecursionSpec::sigma_min_d();
    SandwichReport report;
    for (const std::int64_t e : epochs) {
        const MarkSource view = src.shift(e);
        const Renovation r = find_renovation_epoch(view, opts.max_epochs, opts.max_depth);
        SandwichRow row;
        row.epoch = e;
        for (std::int64_t i = r.epoch; i < 0; ++i) {
            const MarkTriple m = view.mark_at(i);
            row.lower = step(row.lower, m, lower_spec);
            row.value = fifo_step(row.value, m);
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

struct Indicators {
    std::size_t loss = 0;
    std::size_t lower = 0;
    std::size_t upper = 0;
    std::size_t count = 0;
};

}  // namespace

LossReport loss_probability_begin(const MarkSource& src, const LossOptions& opts) {
    if (opts.samples == 0) throw ArgumentError("loss estimation needs samples >= 1");
    const auto upper_spec = RecursionSpec::sigma_plus_d();
    const auto lower_spec = RecursionSpec::sigma_min_d();

    LossReport report;
    report.model = "begin";
    report.samples = opts.samples;
    report.seed = src.seed();
    report.stream = src.stream_id();

    if (opts.sampling.mode == Exactness::exact) {
        // One stationary triple per replica, paired with D_0 of the same
        // realization.
        std::vector<Indicators> per(opts.samples);
        const std::int64_t spacing = 2 * std::max<std::int64_t>(opts.sampling.max_depth, 1);
        parallel_for(opts.samples, opts.workers, [&](std::size_t k) {
            const MarkSource view = replica_view(src, k, spacing);
            const std::int64_t epoch = 0;
            const SandwichReport s = sandwich_check(view, std::span(&epoch, 1), opts.sampling);
            const SandwichRow& row = s.rows.front();
            if (s.violations != 0) throw ContractViolation("sandwich violated at replica " + std::to_string(k));
            const double d0 = view.mark_at(0).dpat;
            per[k] = {row.value > d0 ? 1u : 0u, row.lower > d0 ? 1u : 0u, row.upper > d0 ? 1u : 0u, 1};
        });
        Indicators total;
        for (const auto& p : per) {
            total.loss += p.loss;
            total.lower += p.lower;
            total.upper += p.upper;
        }
        report.method = to_string(SampleMethod::renovation_exact);
        report.replicas = opts.samples;
        report.loss = wilson_estimate(total.loss, opts.samples);
        report.lower_bound = wilson_estimate(total.lower, opts.samples);
        report.upper_bound = wilson_estimate(total.upper, opts.samples);
    } else {
        // Independent trajectories from 0; W, M and L are run side by side on
        // the same marks so that M_n <= W_n <= L_n pathwise.
        const std::size_t replicas = std::clamp<std::size_t>(opts.replicas, 1, opts.samples);
        std::vector<double> loss(replicas), lower(replicas), upper(replicas);
        std::vector<Indicators> per(replicas);
        parallel_for(replicas, opts.workers, [&](std::size_t r) {
            const MarkSource view =
                replica_view(src, r, opts.sampling.warmup + static_cast<std::int64_t>(opts.samples));
            const std::size_t count = opts.samples / replicas + (r < opts.samples % replicas ? 1 : 0);
            double w = 0.0;
            double m = 0.0;
            double l = 0.0;
            Indicators ind;
            const std::int64_t end = opts.sampling.warmup + static_cast<std::int64_t>(count);
            for (std::int64_t i = 0; i < end; ++i) {
                const MarkTriple mk = view.mark_at(i);
                if (i >= opts.sampling.warmup) {
                    ind.loss += w > mk.dpat ? 1 : 0;
                    ind.lower += m > mk.dpat ? 1 : 0;
                    ind.upper += l > mk.dpat ? 1 : 0;
                    ++ind.count;
                }
                w = fifo_step(w, mk);
                m = step(m, mk, lower_spec);
                l = step(l, mk, upper_spec);
            }
            per[r] = ind;
        });
        Indicators total;
        for (std::size_t r = 0; r < replicas; ++r) {
            const double c = static_cast<double>(per[r].count);
            loss[r] = static_cast<double>(per[r].loss) / c;
            lower[r] = static_cast<double>(per[r].lower) / c;
            upper[r] = static_cast<double>(per[r].upper) / c;
            total.loss += per[r].loss;
            total.lower += per[r].lower;
            total.upper += per[r].upper;
        }
        report.method = to_string(SampleMethod::forward_approximate);
        report.replicas = replicas;
        if (replicas >= 2) {
            report.loss = student_t_estimate(loss);
            report.lower_bound = student_t_estimate(lower);
            report.upper_bound = student_t_estimate(upper);
        } else {
            report.loss = wilson_estimate(total.loss, opts.samples);
            report.lower_bound = wilson_estimate(total.lower, opts.samples);
            report.upper_bound = wilson_estimate(total.upper, opts.samples);
        }
    }
    report.bracketing_holds = bracket_within(report.lower_bound, report.loss, report.upper_bound, opts.se_slack);
    return report;
}

}  // namespace impatience
