// Empirical-measure binning and the dyadic spike sequence.
//
// bin_measure replaces the empirical measure of n samples on [0,1]^d by the
// piecewise-constant density  sum_j 1_{K_j} mu_n(K_j) / delta^d  over the
// grid of boxes K_j of side delta. The dyadic spikes
//     u_k = 1_{B_{r_k}(0)} / (omega_d r_k^d),   r_k = 2^{-k/2},   eps_k = 2^{-k alpha}
// on the 2^{kd} dyadic barycenters of [-1/2, 1/2]^d stay bounded in L^1 and in
// energy while their sup norm blows up.
#pragma once

#include "gms/continuum.hpp"
#include "gms/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gms {

struct BinnedMeasure {
    int d = 0;
    double delta = 0.0;
    std::size_t boxes_per_axis = 0;     // m = 1 / delta
    std::size_t n = 0;
    std::vector<std::uint64_t> counts;  // m^d boxes, axis 0 fastest
    std::vector<double> density;        // counts / (n delta^d)

    /// max_j |density_j - 1|
    double sup_deviation() const;
    /// sum_j density_j delta^d, equal to 1 up to rounding
    double total_mass() const;
};

/// Points must lie in [0,1]^d; 1/delta must be a positive integer (relative
/// tolerance 1e-9). Coordinates equal to 1 fall in the last box.
BinnedMeasure bin_measure(const PointCloud& points, double delta);

struct DeviationRow {
    std::size_t n = 0;
    double delta = 0.0;
    std::size_t boxes_per_axis = 0;
    double sup_deviation = 0.0;
    double ell = 0.0;           // sqrt(d) delta, the transport-distance proxy
    double eps = 0.0;
    double ell_over_eps = 0.0;
    std::uint64_t seed = 0;
};

struct DeviationOptions {
    int d = 2;
    double b_exponent = 0.5; // b_n = (ln n)^{b_exponent}
    EpsRule eps_rule{};
};

/// Box side for n samples: 1/m with m = floor((n / (b_n ln n))^{1/d}), m >= 1.
double binning_delta(std::size_t n, int d, double b_exponent);

/// For each n: n uniform samples on [0,1]^d, binned at binning_delta(n).
std::vector<DeviationRow> density_deviation_curve(const std::vector<std::size_t>& n_list, std::uint64_t seed,
                                                  const DeviationOptions& options = {});

void write_deviation_csv(std::ostream& os, const std::vector<DeviationRow>& rows, bool header = true);

struct CounterexampleResult {
    int k = 0;
    int d = 0;
    double alpha = 0.0;
    std::size_t n = 0;          // 2^{kd} grid points
    double eps = 0.0;           // 2^{-k alpha}
    double radius = 0.0;        // 2^{-k/2}
    std::size_t ball_count = 0; // grid points with |x| < radius
    double l1 = 0.0;            // (1/n) sum u_k
    double energy = 0.0;        // GMS_{eps, n}(u_k) with zeta = min(t, 1)
    double max_u = 0.0;
};

struct CounterexampleOptions {
    double p = 2.0;
    double q = 0.0;
    double kernel_sigma = 1.0;
    double cutoff = 3.0;
};

inline constexpr int kMaxDyadicExponent = 18; // k d above this is refused

/// Barycenters of the 2^{kd} dyadic cubes of side 2^{-k} in [-1/2, 1/2]^d.
PointCloud dyadic_grid(int k, int d);
/// Spike values u_k on dyadic_grid(k, d).
std::vector<double> dyadic_spike(int k, int d);

/// Requires d >= 3, alpha in (1/2, 1), k >= 1 and k d <= kMaxDyadicExponent.
/// The energy sums only ball-to-complement pairs inside the kernel support,
/// which are the only pairs with nonzero differences.
CounterexampleResult dyadic_counterexample(int k, double alpha, int d, const CounterexampleOptions& options = {});

/// {"k":..,"d":..,"l1":..,"energy":..} followed by the remaining fields.
void write_counterexample_json(std::ostream& os, const CounterexampleResult& result);

} // namespace gms
