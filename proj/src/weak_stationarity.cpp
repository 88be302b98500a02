#include "impatience/weak_stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "impatience/counter_rng.hpp"
#include "impatience/errors.hpp"
#include "impatience/estimation.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/fifo_end.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

EmpiricalMeasure EmpiricalMeasure::uniform_over(std::span<const double> values) {
    if (values.empty()) throw ArgumentError("empirical measure needs at least one point");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    EmpiricalMeasure mu;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        mu.atoms_.push_back({sorted[i], static_cast<double>(j - i) / n});
        i = j;
    }
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ArgumentError("empirical measure needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.value >= 0.0) || !(a.weight >= 0.0)) throw ArgumentError("atoms need nonnegative value and weight");
        total += a.weight;
    }
    if (!(total > 0.0)) throw ArgumentError("empirical measure needs positive total weight");
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
    EmpiricalMeasure mu;
    for (const auto& a : atoms) {
        if (!mu.atoms_.empty() && mu.atoms_.back().value == a.value) {
            mu.atoms_.back().weight += a.weight / total;
        } else {
            mu.atoms_.push_back({a.value, a.weight / total});
        }
    }
    return mu;
}

double EmpiricalMeasure::cdf(double x) const noexcept {
    double c = 0.0;
    for (const auto& a : atoms_) {
        if (a.value > x) break;
        c += a.weight;
    }
    return c;
}

double EmpiricalMeasure::total_weight() const noexcept {
    double t = 0.0;
    for (const auto& a : atoms_) t += a.weight;
    return t;
}

double workload_map(ImpatienceModel model, double w, const MarkTriple& mark) {
    return model == ImpatienceModel::begin ? fifo_step(w, mark) : end_step(w, mark);
}

namespace {

std::vector<double> trajectory(const MarkSource& src, std::int64_t n, ImpatienceModel model) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double x = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        x = workload_map(model, x, src.mark_at(i));
        w[static_cast<std::size_t>(i)] = x;
    }
    return w;
}

std::string describe(const MarkSource& src) {
    return src.kind_name() + ":" + std::to_string(src.seed()) + ":" + std::to_string(src.stream_id());
}

}  // namespace

EmpiricalMeasure cesaro_distribution(const MarkSource& src, std::int64_t n, ImpatienceModel model) {
    if (n < 1) throw ArgumentError("cesaro_distribution needs n >= 1");
    const auto w = trajectory(src, n, model);
    EmpiricalMeasure mu = EmpiricalMeasure::uniform_over(w);
    mu.steps = n;
    mu.source_id = describe(src);
    return mu;
}

EmpiricalMeasure cesaro_distribution_replicas(const MarkSource& src, std::int64_t n, std::size_t replicas,
                                              ImpatienceModel model) {
    if (n < 1 || replicas < 1) throw ArgumentError("cesaro_distribution_replicas needs n, replicas >= 1");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n) * replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        const MarkSource view = replica_view(src, r, 2 * n);
        for (std::int64_t i = 1; i <= n; ++i) {
            double x = 0.0;
            for (std::int64_t k = -i; k < 0; ++k) x = workload_map(model, x, view.mark_at(k));
            values.push_back(x);
        }
    }
    EmpiricalMeasure mu = EmpiricalMeasure::uniform_over(values);
    mu.steps = n;
    mu.source_id = describe(src);
    return mu;
}

double kolmogorov_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    const auto& a = mu.atoms();
    const auto& b = nu.atoms();
    std::size_t i = 0;
    std::size_t j = 0;
    double fa = 0.0;
    double fb = 0.0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        const double t = j >= b.size() || (i < a.size() && a[i].value <= b[j].value) ? a[i].value : b[j].value;
        while (i < a.size() && a[i].value == t) fa += a[i++].weight;
        while (j < b.size() && b[j].value == t) fb += b[j++].weight;
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

double total_variation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    const auto& a = mu.atoms();
    const auto& b = nu.atoms();
    std::size_t i = 0;
    std::size_t j = 0;
    double sum = 0.0;
    while (i < a.size() || j < b.size()) {
        if (j >= b.size() || (i < a.size() && a[i].value < b[j].value)) {
            sum += a[i++].weight;
        } else if (i >= a.size() || b[j].value < a[i].value) {
            sum += b[j++].weight;
        } else {
            sum += std::abs(a[i++].weight - b[j++].weight);
        }
    }
    return 0.5 * sum;
}

double invariance_distance(const EmpiricalMeasure& mu, const MarkSource& src, ImpatienceModel model) {
    if (mu.empty()) throw ArgumentError("invariance_distance needs a nonempty measure");
    const MarkSource fresh = src.with_stream(derive_stream(src.stream_id(), 0x1A7A2Cull));
    // An atom stands for several visits; each visit moves with its own mark.
    const double visits = mu.steps > 0 ? static_cast<double>(mu.steps) : 1e4;
    std::vector<EmpiricalMeasure::Atom> pushed;
    std::vector<double> images;
    std::int64_t k = 0;
    for (const auto& atom : mu.atoms()) {
        const auto copies = std::max<std::int64_t>(1, std::llround(atom.weight * visits));
        images.clear();
        for (std::int64_t c = 0; c < copies; ++c) images.push_back(workload_map(model, atom.value, fresh.mark_at(k++)));
        std::sort(images.begin(), images.end());
        for (std::size_t i = 0; i < images.size();) {
            std::size_t j = i;
            while (j < images.size() && images[j] == images[i]) ++j;
            const auto group = static_cast<std::int64_t>(j - i);
            const double w = group == copies ? atom.weight
                                             : atom.weight * static_cast<double>(group) / static_cast<double>(copies);
            pushed.push_back({images[i], w});
            i = j;
        }
    }
    return kolmogorov_distance(mu, EmpiricalMeasure::from_atoms(std::move(pushed)));
}

TightnessReport tightness_report(const MarkSource& src, std::int64_t n, std::span<const double> levels,
                                 ImpatienceModel model) {
    if (n < 1) throw ArgumentError("tightness_report needs n >= 1");
    const auto dominating =
        model == ImpatienceModel::begin ? RecursionSpec::sigma_plus_d() : RecursionSpec::d_only();
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<double> l(static_cast<std::size_t>(n));
    double x = 0.0;
    double y = 0.0;
    TightnessReport rep;
    for (std::int64_t i = 0; i < n; ++i) {
        const MarkTriple m = src.mark_at(i);
        x = workload_map(model, x, m);
        y = step(y, m, dominating);
        w[static_cast<std::size_t>(i)] = x;
        l[static_cast<std::size_t>(i)] = y;
        if (x > y) ++rep.pathwise_violations;
    }
    std::sort(w.begin(), w.end());
    std::sort(l.begin(), l.end());
    for (const double level : levels) {
        if (!(level > 0.0 && level <= 1.0)) throw ArgumentError("quantile levels must lie in (0, 1]");
        const auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
        const std::size_t idx = std::clamp<std::size_t>(rank, 1, w.size()) - 1;
        TightnessRow row{level, w[idx], l[idx]};
        if (row.workload_quantile > row.dominating_quantile) rep.ordered = false;
        rep.rows.push_back(row);
    }
    return rep;
}

BoundaryMass boundary_mass(const MarkSource& src, std::int64_t n, int p, ImpatienceModel model) {
    if (n < 1 || p < 1) throw ArgumentError("boundary_mass needs n, p >= 1");
    const double width = std::ldexp(1.0, -p);
    double x = 0.0;
    std::size_t inside = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const MarkTriple m = src.mark_at(i);
        if (i > 0 && x > m.dpat && x < m.dpat + width) ++inside;
        x = workload_map(model, x, m);
    }
    // W^0_n pairs with D_n, one past the last mark used.
    const MarkTriple last = src.mark_at(n);
    if (x > last.dpat && x < last.dpat + width) ++inside;
    const Estimate e = wilson_estimate(inside, static_cast<std::size_t>(n));
    return {e.point, e.std_error};
}

}  // namespace impatience
