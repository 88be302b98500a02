#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "impatience/des.hpp"
#include "impatience/marks.hpp"

namespace impatience {

// Discrete probability measure on [0, inf) with atoms sorted by value.
class EmpiricalMeasure {
public:
    struct Atom {
        double value;
        double weight;
    };

    EmpiricalMeasure() = default;
    // Equal weights; equal values are merged.
    static EmpiricalMeasure uniform_over(std::span<const double> values);
    // Weights are normalized to sum to 1; negative weights or values throw.
    static EmpiricalMeasure from_atoms(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }
    double cdf(double x) const noexcept;
    double total_weight() const noexcept;

    // Generation metadata.
    std::int64_t steps = 0;
    std::string source_id;

private:
    std::vector<Atom> atoms_;
};

// One application of the model's random map: fifo_step (begin) or end_step (end).
double workload_map(ImpatienceModel model, double w, const MarkTriple& mark);

// Occupation measure of W^0_1..W^0_n along one trajectory from W_0 = 0 at
// index 0, weight 1/n per step.
EmpiricalMeasure cesaro_distribution(const MarkSource& src, std::int64_t n, ImpatienceModel model);

// Literal Cesaro mixture: for each replica stream and each i = 1..n, the
// workload at index 0 when C_{-i} finds an empty system; weight 1/(n R).
// Quadratic in n.
EmpiricalMeasure cesaro_distribution_replicas(const MarkSource& src, std::int64_t n, std::size_t replicas,
                                              ImpatienceModel model);

// sup_x |F_mu(x) - F_nu(x)|
double kolmogorov_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
double total_variation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Kolmogorov distance between mu and its one-step pushforward under marks
// from an independent stream of src. An atom of weight w stands for
// round(w * steps) visits (w * 10^4 when steps is unset), each mapped with
// its own mark.
double invariance_distance(const EmpiricalMeasure& mu, const MarkSource& src, ImpatienceModel model);

struct TightnessRow {
    double level = 0.0;
    double workload_quantile = 0.0;
    double dominating_quantile = 0.0;
};

struct TightnessReport {
    std::vector<TightnessRow> rows;
    std::size_t pathwise_violations = 0;  // i with W^0_i > L^0_i
    bool ordered = true;                  // every row has W quantile <= L quantile
};

// Quantiles (smallest x with F(x) >= level) of W^0_i and of the dominating
// LRMST L^0_i (alpha = sigma+D for begin, D for end), i = 1..n.
TightnessReport tightness_report(const MarkSource& src, std::int64_t n, std::span<const double> levels,
                                 ImpatienceModel model = ImpatienceModel::begin);

struct BoundaryMass {
    double fraction = 0.0;
    double std_error = 0.0;
};

// Fraction of i = 1..n with D_i < W^0_i < D_i + 2^-p.
BoundaryMass boundary_mass(const MarkSource& src, std::int64_t n, int p, ImpatienceModel model);

}  // namespace impatience
