#include "impatience/marks.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "impatience/errors.hpp"

namespace impatience {

std::string to_string(AlphaKind kind) {
    switch (kind) {
        case AlphaKind::sigma_plus_d: return "sigma_plus_d";
        case AlphaKind::sigma_min_d: return "sigma_min_d";
        case AlphaKind::d_only: return "d_only";
    }
    return "unknown";
}

double alpha_of(AlphaKind kind, const MarkTriple& m) noexcept {
    switch (kind) {
        case AlphaKind::sigma_plus_d: return m.sigma + m.dpat;
        case AlphaKind::sigma_min_d: return std::min(m.sigma, m.dpat);
        case AlphaKind::d_only: return m.dpat;
    }
    return 0.0;
}

namespace {

constexpr std::uint32_t kBlockXiSigma = 0;
constexpr std::uint32_t kBlockDpatTransition = 1;
constexpr std::uint32_t kBlockInitialState = 2;
constexpr std::int64_t kCheckpointSpacing = 64;

std::size_t sample_row(const std::vector<double>& cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulate(std::vector<double> p) {
    std::partial_sum(p.begin(), p.end(), p.begin());
    p.back() = 1.0;
    return p;
}

void check_mark(const MarkTriple& m) {
    for (double v : {m.xi, m.sigma, m.dpat}) {
        if (!std::isfinite(v) || v < 0.0) throw ArgumentError("marks must be finite and nonnegative");
    }
}

}  // namespace

namespace detail {

// Modulating chain, anchored at absolute index 0: state_0 is drawn from the
// stationary law, later states evolve with the forward kernel and earlier
// ones with the time-reversed kernel. Checkpoints every kCheckpointSpacing
// indices are memoized in both directions.
struct MarkovState {
    std::vector<std::vector<double>> forward_cdf;
    std::vector<std::vector<double>> reverse_cdf;
    std::vector<double> stationary;
    std::vector<double> stationary_cdf;
    CounterUniforms uniforms{0, 0};

    mutable std::mutex mutex;
    mutable std::vector<std::size_t> forward_checkpoints;
    mutable std::vector<std::size_t> backward_checkpoints;

    std::size_t initial_state() const {
        return sample_row(stationary_cdf, uniforms.at(0, kBlockInitialState)[0]);
    }

    std::size_t step_forward(std::size_t state, std::int64_t index) const {
        return sample_row(forward_cdf[state], uniforms.at(index, kBlockDpatTransition)[1]);
    }

    std::size_t step_backward(std::size_t state, std::int64_t index) const {
        return sample_row(reverse_cdf[state], uniforms.at(index, kBlockDpatTransition)[1]);
    }

    std::size_t state_at(std::int64_t index) const {
        if (index >= 0) {
            const auto cp = static_cast<std::size_t>(index / kCheckpointSpacing);
            std::size_t state;
            {
                std::lock_guard lock(mutex);
                if (forward_checkpoints.empty()) forward_checkpoints.push_back(initial_state());
                while (forward_checkpoints.size() <= cp) {
                    const auto base = static_cast<std::int64_t>(forward_checkpoints.size() - 1) * kCheckpointSpacing;
                    std::size_t s = forward_checkpoints.back();
                    for (std::int64_t j = base; j < base + kCheckpointSpacing; ++j) s = step_forward(s, j);
                    forward_checkpoints.push_back(s);
                }
                state = forward_checkpoints[cp];
            }
            for (std::int64_t j = static_cast<std::int64_t>(cp) * kCheckpointSpacing; j < index; ++j) {
                state = step_forward(state, j);
            }
            return state;
        }
        const std::int64_t depth = -index;
        const auto cp = static_cast<std::size_t>(depth / kCheckpointSpacing);
        std::size_t state;
        {
            std::lock_guard lock(mutex);
            if (backward_checkpoints.empty()) backward_checkpoints.push_back(initial_state());
            while (backward_checkpoints.size() <= cp) {
                const auto base = -static_cast<std::int64_t>(backward_checkpoints.size() - 1) * kCheckpointSpacing;
                std::size_t s = backward_checkpoints.back();
                for (std::int64_t j = base - 1; j >= base - kCheckpointSpacing; --j) s = step_backward(s, j);
                backward_checkpoints.push_back(s);
            }
            state = backward_checkpoints[cp];
        }
        for (std::int64_t j = -static_cast<std::int64_t>(cp) * kCheckpointSpacing - 1; j >= index; --j) {
            state = step_backward(state, j);
        }
        return state;
    }
};

}  // namespace detail

namespace {

std::shared_ptr<detail::MarkovState> build_markov(const std::vector<std::vector<double>>& transition,
                                                  CounterUniforms uniforms) {
    const auto k = transition.size();
    Eigen::MatrixXd a(k + 1, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = transition[i][j] - (i == j ? 1.0 : 0.0);
        }
    }
    a.row(static_cast<Eigen::Index>(k)).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k + 1));
    rhs(static_cast<Eigen::Index>(k)) = 1.0;
    const Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);
    if ((a * pi - rhs).norm() > 1e-9) throw ArgumentError("modulating chain has no unique stationary law");

    auto state = std::make_shared<detail::MarkovState>();
    state->uniforms = uniforms;
    state->stationary.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double p = pi(static_cast<Eigen::Index>(i));
        if (!(p > 1e-12)) throw ArgumentError("modulating chain must be irreducible (stationary mass > 0 everywhere)");
        state->stationary[i] = p;
    }
    state->stationary_cdf = cumulate(state->stationary);
    for (std::size_t i = 0; i < k; ++i) {
        state->forward_cdf.push_back(cumulate(transition[i]));
        std::vector<double> reversed(k);
        for (std::size_t j = 0; j < k; ++j) {
            reversed[j] = state->stationary[j] * transition[j][i] / state->stationary[i];
        }
        const double total = std::accumulate(reversed.begin(), reversed.end(), 0.0);
        for (double& r : reversed) r /= total;
        state->reverse_cdf.push_back(cumulate(std::move(reversed)));
    }
    return state;
}

}  // namespace

MarkSource MarkSource::constant(MarkTriple m) { return pattern({m}); }

MarkSource MarkSource::pattern(std::vector<MarkTriple> cycle) {
    if (cycle.empty()) throw ArgumentError("pattern source needs at least one mark");
    for (const auto& m : cycle) check_mark(m);
    MarkSource src;
    src.kind_ = Kind::deterministic;
    src.cycle_ = std::move(cycle);
    src.validate_mean_xi();
    return src;
}

MarkSource MarkSource::iid(MarkLaw law, std::uint64_t seed, std::uint64_t stream) {
    MarkSource src;
    src.kind_ = Kind::iid;
    src.laws_.push_back(std::move(law));
    src.seed_ = seed;
    src.stream_ = stream;
    src.uniforms_ = CounterUniforms(seed, stream);
    src.validate_mean_xi();
    return src;
}

MarkSource MarkSource::markov_modulated(std::vector<std::vector<double>> transition, std::vector<MarkLaw> laws,
                                        std::uint64_t seed, std::uint64_t stream) {
    if (laws.empty() || transition.size() != laws.size()) {
        throw ArgumentError("markov source needs one law per chain state and a square transition matrix");
    }
    for (const auto& row : transition) {
        if (row.size() != laws.size()) throw ArgumentError("transition matrix must be square");
        double total = 0.0;
        for (double p : row) {
            if (!std::isfinite(p) || p < 0.0) throw ArgumentError("transition probabilities must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("transition rows must sum to 1");
    }
    MarkSource src;
    src.kind_ = Kind::markov_modulated;
    src.laws_ = std::move(laws);
    src.transition_ = std::move(transition);
    src.seed_ = seed;
    src.stream_ = stream;
    src.uniforms_ = CounterUniforms(seed, stream);
    src.markov_ = build_markov(src.transition_, src.uniforms_);
    src.validate_mean_xi();
    return src;
}

void MarkSource::validate_mean_xi() const {
    if (!(mean_xi() > 0.0)) throw ArgumentError("source must satisfy E[xi] > 0");
}

std::optional<double> MarkSource::support_sup(AlphaKind kind) const {
    auto law_sup = [kind](const MarkLaw& law) -> std::optional<double> {
        const auto s = law.sigma.upper_bound();
        const auto d = law.dpat.upper_bound();
        switch (kind) {
            case AlphaKind::sigma_plus_d:
                if (s && d) return *s + *d;
                return std::nullopt;
            case AlphaKind::sigma_min_d:
                if (s && d) return std::min(*s, *d);
                if (s) return *s;
                return d;
            case AlphaKind::d_only: return d;
        }
        return std::nullopt;
    };
    if (kind_ == Kind::deterministic) {
        double hi = 0.0;
        for (const auto& m : cycle_) hi = std::max(hi, alpha_of(kind, m));
        return hi;
    }
    double hi = 0.0;
    for (const auto& law : laws_) {
        const auto s = law_sup(law);
        if (!s) return std::nullopt;
        hi = std::max(hi, *s);
    }
    return hi;
}

MarkSource MarkSource::with_alpha_bound(AlphaKind kind, double c) const {
    if (!std::isfinite(c) || c < 0.0) throw ArgumentError("alpha bound must be finite and nonnegative");
    const auto sup = support_sup(kind);
    if (!sup) {
        throw CapabilityError("cannot declare alpha_bound for " + to_string(kind) +
                              ": the marks have unbounded support");
    }
    // The supremum of sigma + D is itself a rounded sum, so a bound written
    // as the exact decimal sum may sit one ulp below it.
    if (c < *sup * (1.0 - 1e-12)) {
        throw ArgumentError("declared alpha_bound for " + to_string(kind) + " is below the support supremum " +
                            std::to_string(*sup));
    }
    MarkSource out = *this;
    out.bounds_[static_cast<std::size_t>(kind)] = std::max(c, *sup);
    return out;
}

MarkSource MarkSource::with_stream(std::uint64_t stream) const {
    if (kind_ == Kind::deterministic) return *this;
    MarkSource out = *this;
    out.stream_ = stream;
    out.uniforms_ = CounterUniforms(seed_, stream);
    if (kind_ == Kind::markov_modulated) out.markov_ = build_markov(transition_, out.uniforms_);
    return out;
}

MarkSource MarkSource::shift(std::int64_t k) const {
    MarkSource out = *this;
    out.offset_ += k;
    return out;
}

MarkTriple MarkSource::mark_at(std::int64_t n) const {
    const std::int64_t index = n + offset_;
    switch (kind_) {
        case Kind::deterministic: {
            const auto len = static_cast<std::int64_t>(cycle_.size());
            const std::int64_t r = ((index % len) + len) % len;
            return cycle_[static_cast<std::size_t>(r)];
        }
        case Kind::iid:
        case Kind::markov_modulated: {
            const MarkLaw& law = kind_ == Kind::iid ? laws_.front() : laws_[markov_->state_at(index)];
            const auto u01 = uniforms_.at(index, kBlockXiSigma);
            const double u2 = uniforms_.at(index, kBlockDpatTransition)[0];
            return {law.xi.sample(u01[0]), law.sigma.sample(u01[1]), law.dpat.sample(u2)};
        }
    }
    return {};
}

std::vector<MarkTriple> MarkSource::window(std::int64_t from, std::int64_t to) const {
    if (from > to) throw ArgumentError("window requires from <= to");
    std::vector<MarkTriple> out;
    out.reserve(static_cast<std::size_t>(to - from + 1));
    for (std::int64_t i = from; i <= to; ++i) out.push_back(mark_at(i));
    return out;
}

std::optional<double> MarkSource::declared_alpha_bound(AlphaKind kind) const {
    return bounds_[static_cast<std::size_t>(kind)];
}

std::optional<double> MarkSource::alpha_bound(AlphaKind kind) const {
    std::optional<double> best = declared_alpha_bound(kind);
    auto consider = [&best](std::optional<double> c) {
        if (c && (!best || *c < *best)) best = c;
    };
    if (kind == AlphaKind::sigma_min_d) {
        consider(declared_alpha_bound(AlphaKind::d_only));
        consider(declared_alpha_bound(AlphaKind::sigma_plus_d));
    } else if (kind == AlphaKind::d_only) {
        consider(declared_alpha_bound(AlphaKind::sigma_plus_d));
    }
    return best;
}

namespace {

template <typename F>
double mixture_mean(const std::vector<double>& weights, const std::vector<MarkLaw>& laws, F&& component) {
    double m = 0.0;
    for (std::size_t i = 0; i < laws.size(); ++i) m += weights[i] * component(laws[i]).mean();
    return m;
}

}  // namespace

double MarkSource::mean_xi() const {
    if (kind_ == Kind::deterministic) {
        double s = 0.0;
        for (const auto& m : cycle_) s += m.xi;
        return s / static_cast<double>(cycle_.size());
    }
    if (kind_ == Kind::iid) return laws_.front().xi.mean();
    return mixture_mean(markov_->stationary, laws_, [](const MarkLaw& l) -> const Distribution& { return l.xi; });
}

double MarkSource::mean_sigma() const {
    if (kind_ == Kind::deterministic) {
        double s = 0.0;
        for (const auto& m : cycle_) s += m.sigma;
        return s / static_cast<double>(cycle_.size());
    }
    if (kind_ == Kind::iid) return laws_.front().sigma.mean();
    return mixture_mean(markov_->stationary, laws_, [](const MarkLaw& l) -> const Distribution& { return l.sigma; });
}

double MarkSource::mean_dpat() const {
    if (kind_ == Kind::deterministic) {
        double s = 0.0;
        for (const auto& m : cycle_) s += m.dpat;
        return s / static_cast<double>(cycle_.size());
    }
    if (kind_ == Kind::iid) return laws_.front().dpat.mean();
    return mixture_mean(markov_->stationary, laws_, [](const MarkLaw& l) -> const Distribution& { return l.dpat; });
}

std::string MarkSource::kind_name() const {
    switch (kind_) {
        case Kind::deterministic: return "deterministic";
        case Kind::iid: return "iid";
        case Kind::markov_modulated: return "markov";
    }
    return "unknown";
}

bool MarkSource::independent_marks() const noexcept {
    if (kind_ == Kind::iid) return true;
    return kind_ == Kind::deterministic && cycle_.size() == 1;
}

}  // namespace impatience
