// Discrete graph Mumford-Shah energies.
//
// Two parameterizations are kept side by side:
//   Sec1:  (lambda/n) sum |u_i - f_i|^2 + (1/(eps n^2)) sum_{i,j} zeta(eps^{1-p+q} |u_i-u_j|^p / r_ij^q) w_ij
//   Sec6:  sum |u_i - f_i|^2 + (1/(lambda eps n)) sum_{i,j} zeta(|u_i-u_j|^2 / eps) w_ij
// Sums over (i, j) run over ordered pairs; the stored graph has a zero
// diagonal and truncated pairs carry no weight, so each stored undirected
// edge contributes twice. For p = 2, q = 0 the two totals satisfy
// Sec6 = (n / lambda) * Sec1.
#pragma once

#include "gms/core.hpp"
#include "gms/graph.hpp"

#include <cmath>
#include <functional>
#include <span>

namespace gms {

/// A q > 0 energy met an edge of zero length.
class SingularityError : public DomainError {
public:
    SingularityError(std::uint32_t i, std::uint32_t j);
    std::uint32_t i, j;
};

/// Neumaier-compensated accumulator.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

enum class Parameterization { Sec1, Sec6 };

struct EnergyBreakdown {
    double fidelity = 0.0;
    double regularizer = 0.0;
    double total = 0.0;
    Parameterization parameterization = Parameterization::Sec6;
};

/// (1/(eps n^2)) sum over ordered stored pairs of zeta(eps^{1-p+q} |u_i-u_j|^p / r^q) w_ij.
double gms_energy(const SparseGraph& graph, std::span<const double> u, const ZetaSpec& spec,
                  double eps, double p, double q);

EnergyBreakdown objective_sec6(const SparseGraph& graph, std::span<const double> u,
                               std::span<const double> f, const ZetaSpec& spec, double lambda, double eps);

EnergyBreakdown objective_sec1(const SparseGraph& graph, std::span<const double> u,
                               std::span<const double> f, const ZetaSpec& spec, double lambda, double eps,
                               double p, double q);

/// Sum over stored undirected edges of g(edge), accumulated in edge order in
/// fixed-size compensated chunks; identical for every thread count.
double ordered_edge_sum(const SparseGraph& graph, const std::function<double(const Edge&)>& g);

} // namespace gms
