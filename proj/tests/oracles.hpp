// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines; only the plain data types are shared.
#pragma once

#include "gms/core.hpp"
#include "gms/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Hand-rolled generators (std::mt19937_64 is fully specified by the standard)
// ---------------------------------------------------------------------------

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * unit(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(unit() * (hi - lo + 1) * 0.999999999); }
    double normal() {
        const double u1 = 1.0 - unit(), u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    bool coin(double p = 0.5) { return unit() < p; }

private:
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 eng_;
};

/// Random cloud; with `snap` the coordinates sit on a coarse lattice so that
/// distance ties and duplicate points occur.
inline gms::PointCloud random_cloud(Gen& g, std::size_t n, int d, bool snap = false) {
    std::vector<double> c(n * static_cast<std::size_t>(d));
    for (auto& v : c) v = snap ? std::floor(g.uniform(0.0, 8.0)) / 8.0 : g.uniform();
    return gms::PointCloud(d, std::move(c));
}

inline std::vector<double> random_vector(Gen& g, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = g.uniform(lo, hi);
    return v;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

inline double zeta(const gms::ZetaSpec& s, double t) {
    switch (s.kind) {
    case gms::ZetaKind::MsArctan: return 2.0 / std::numbers::pi * std::atan(std::numbers::pi * t / 2.0);
    case gms::ZetaKind::TvSmoothed: return std::sqrt(s.delta * s.delta + t);
    case gms::ZetaKind::Quadratic: return t;
    case gms::ZetaKind::Truncated: return t < 1.0 ? t : 1.0;
    }
    return 0.0;
}

inline double weight(double r, double eps, double sigma, int d) {
    return std::exp(-r * r / (2.0 * sigma * sigma * eps * eps)) / std::pow(eps, d);
}

// ---------------------------------------------------------------------------
// O(n^2) graph: per-vertex candidate sort, k cap, union
// ---------------------------------------------------------------------------

struct OracleEdge {
    double weight;
    double distance;
};

inline std::map<std::pair<std::uint32_t, std::uint32_t>, OracleEdge> graph(const gms::PointCloud& cloud, double eps,
                                                                           double sigma, int k, double cutoff) {
    const std::size_t n = cloud.size();
    const int d = cloud.dim();
    const double radius = cutoff * sigma * eps;
    std::set<std::pair<std::uint32_t, std::uint32_t>> keep;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::uint32_t>> cand;
        for (std::uint32_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                const double diff = cloud.coord(i, a) - cloud.coord(j, a);
                s += diff * diff;
            }
            if (s <= radius * radius) cand.emplace_back(s, j);
        }
        std::stable_sort(cand.begin(), cand.end());
        for (std::size_t m = 0; m < cand.size() && m < static_cast<std::size_t>(k); ++m)
            keep.emplace(std::min(i, cand[m].second), std::max(i, cand[m].second));
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, OracleEdge> out;
    for (const auto& [i, j] : keep) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += std::pow(cloud.coord(i, a) - cloud.coord(j, a), 2);
        const double r = std::sqrt(s);
        out[{i, j}] = {weight(r, eps, sigma, d), r};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Naive energies over all ordered pairs with a dense weight matrix
// ---------------------------------------------------------------------------

struct Dense {
    std::size_t n;
    std::vector<double> w, r; // n x n, zero where no edge
};

inline Dense densify(const gms::SparseGraph& g) {
    Dense m{g.num_vertices(), {}, {}};
    m.w.assign(m.n * m.n, 0.0);
    m.r.assign(m.n * m.n, 0.0);
    for (const auto& e : g.edges()) {
        m.w[e.i * m.n + e.j] = m.w[e.j * m.n + e.i] = e.weight;
        m.r[e.i * m.n + e.j] = m.r[e.j * m.n + e.i] = e.distance;
    }
    return m;
}

/// (1/(eps n^2)) sum_{i,j} zeta(eps^{1-p+q} |u_i - u_j|^p / r^q) w_ij with long double accumulation.
inline double gms(const Dense& m, const std::vector<double>& u, const gms::ZetaSpec& s, double eps, double p,
                  double q) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) {
            const double w = m.w[i * m.n + j];
            if (w == 0.0) continue;
            double arg = std::pow(eps, 1.0 - p + q) * std::pow(std::abs(u[i] - u[j]), p);
            if (q != 0.0) arg /= std::pow(m.r[i * m.n + j], q);
            total += static_cast<long double>(zeta(s, arg)) * w;
        }
    return static_cast<double>(total / (static_cast<long double>(eps) * m.n * m.n));
}

/// Sum |u - f|^2 + (1/(lambda eps n)) sum_{i,j} zeta(|u_i - u_j|^2 / eps) w_ij
inline double sec6(const Dense& m, const std::vector<double>& u, const std::vector<double>& f,
                   const gms::ZetaSpec& s, double lambda, double eps) {
    long double fid = 0.0L, reg = 0.0L;
    for (std::size_t i = 0; i < m.n; ++i) fid += std::pow(u[i] - f[i], 2);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            if (m.w[i * m.n + j] != 0.0) reg += zeta(s, std::pow(u[i] - u[j], 2) / eps) * m.w[i * m.n + j];
    return static_cast<double>(fid + reg / (static_cast<long double>(lambda) * eps * m.n));
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

/// Gaussian elimination with partial pivoting on a dense row-major system.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return x;
}

/// Dense matrix of I + c L_zw for z given per stored edge.
inline std::vector<double> system_matrix(const gms::SparseGraph& g, const std::vector<double>& z, double c) {
    const std::size_t n = g.num_vertices();
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edges()[e];
        const double v = c * z[e] * ed.weight;
        a[ed.i * n + ed.i] += v;
        a[ed.j * n + ed.j] += v;
        a[ed.i * n + ed.j] -= v;
        a[ed.j * n + ed.i] -= v;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates for Gaussian eta(t) = exp(-t^2/2)
// ---------------------------------------------------------------------------

/// int_{S^{d-1}} |e_1 . v|^p dH^{d-1}(v): mean of |v_1|^p over uniform directions
/// times the sphere area 2 pi^{d/2} / Gamma(d/2).
inline double mc_sphere_moment(double p, int d, std::size_t samples, std::uint64_t seed) {
    Gen g(seed);
    long double acc = 0.0L;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t s = 0; s < samples; ++s) {
        double norm = 0.0;
        for (auto& v : x) {
            v = g.normal();
            norm += v * v;
        }
        acc += std::pow(std::abs(x[0]) / std::sqrt(norm), p);
    }
    const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    return static_cast<double>(acc / samples) * area;
}

/// theta for the Gaussian profile: (2 pi)^{d/2} E[|xi_1|^p |xi|^{-q}], xi ~ N(0, I_d).
inline double mc_theta_gaussian(double p, double q, int d, std::size_t samples, std::uint64_t seed) {
    Gen g(seed);
    long double acc = 0.0L;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t s = 0; s < samples; ++s) {
        double norm = 0.0;
        for (auto& v : x) {
            v = g.normal();
            norm += v * v;
        }
        acc += std::pow(std::abs(x[0]), p) * std::pow(norm, -0.5 * q);
    }
    return std::pow(2.0 * std::numbers::pi, 0.5 * d) * static_cast<double>(acc / samples);
}

/// sigma for the Gaussian profile: (2 pi)^{d/2} E|xi_1|.
inline double mc_sigma_gaussian(int d, std::size_t samples, std::uint64_t seed) {
    return mc_theta_gaussian(1.0, 0.0, d, samples, seed);
}

} // namespace oracle
