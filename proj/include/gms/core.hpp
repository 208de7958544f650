// Shared domain types for graph Mumford-Shah denoising: point clouds, the
// concave saturation family zeta, radial kernels, solver configuration and
// the standing-assumption checks.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gms {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Input that violates a documented precondition (bad sizes, NaNs, ranges).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (e.g. zeta(t<0)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical breakdown: CG stagnation, NaN iterates, divergent quadrature.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// PointCloud
// ---------------------------------------------------------------------------

/// n points in R^d stored row-major, with optional observed labels f_i.
class PointCloud {
public:
    PointCloud() = default;

    /// Throws ValidationError unless coords.size() == n*dim, n >= 1, all finite,
    /// and labels (when given) have length n and are finite.
    PointCloud(int dim, std::vector<double> coords,
               std::optional<std::vector<double>> labels = std::nullopt);

    int dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(dim_); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    double coord(std::size_t i, int axis) const { return coords_[i * static_cast<std::size_t>(dim_) + axis]; }
    const std::vector<double>& coords() const { return coords_; }

    bool has_labels() const { return labels_.has_value(); }
    /// Throws ValidationError when the cloud carries no labels.
    const std::vector<double>& labels() const;

    PointCloud with_labels(std::vector<double> labels) const;

private:
    int dim_ = 0;
    std::vector<double> coords_;
    std::optional<std::vector<double>> labels_;
};

// ---------------------------------------------------------------------------
// Zeta family
// ---------------------------------------------------------------------------

enum class ZetaKind {
    MsArctan,   // (2/pi) atan(pi t / 2)
    TvSmoothed, // sqrt(delta^2 + t)
    Quadratic,  // t
    Truncated,  // min(t, 1); the piecewise profile of the compactness counterexample
};

/// Concave nondecreasing profile applied to scaled squared differences.
///
/// TvSmoothed keeps zeta(0) = delta rather than 0: the energy is offset by
/// delta * sum(w) / (lambda eps n), which does not move minimizers.
struct ZetaSpec {
    ZetaKind kind = ZetaKind::MsArctan;
    double delta = 0.0; // TvSmoothed only

    static ZetaSpec ms_arctan() { return {ZetaKind::MsArctan, 0.0}; }
    static ZetaSpec tv_smoothed(double delta) { return {ZetaKind::TvSmoothed, delta}; }
    static ZetaSpec quadratic() { return {ZetaKind::Quadratic, 0.0}; }
    static ZetaSpec truncated() { return {ZetaKind::Truncated, 0.0}; }

    /// Throws ValidationError for TvSmoothed with delta <= 0 or non-finite.
    void validate() const;
};

double zeta_value(const ZetaSpec& spec, double t);
/// For Truncated the right derivative is returned at the kink t = 1.
double zeta_derivative(const ZetaSpec& spec, double t);
/// lim_{t->inf} zeta(t); nullopt when unbounded.
std::optional<double> zeta_limit(const ZetaSpec& spec);

std::string to_string(ZetaKind kind);
/// Accepts "ms", "tv", "lap" (CLI spellings) and the enum names.
ZetaSpec parse_zeta(const std::string& name, double delta = 0.001);

// ---------------------------------------------------------------------------
// Radial kernels eta : [0, inf) -> [0, inf)
// ---------------------------------------------------------------------------

struct RadialKernel {
    std::string name;
    std::function<double(double)> eta;
    double support = std::numeric_limits<double>::infinity(); // eta = 0 beyond

    double operator()(double t) const { return eta(t); }
    RadialKernel scaled(double c) const;

    /// exp(-t^2 / (2 sigma^2)); the profile behind the graph weights.
    static RadialKernel gaussian(double sigma = 1.0);
    /// 1 on [0, radius], 0 beyond.
    static RadialKernel indicator(double radius = 1.0);
    /// 1/t, a non-integrable tail used to exercise the assumption checks.
    static RadialKernel inverse();
    static RadialKernel zero();
};

// ---------------------------------------------------------------------------
// Solver configuration and results
// ---------------------------------------------------------------------------

struct SolverConfig {
    double lambda = 1.0;
    double eps = 0.1;
    double sigma = 1.0;
    int k_max = 8;
    double p = 2.0;
    double q = 0.0;
    double cg_tol = 1e-8;
    int cg_max_iter = 0; // 0 selects 10 * n
    double irls_tol = 1e-6;
    int irls_max_iter = 100;
    std::uint64_t seed = 0;
    double cutoff_multiplier = 3.0;

    /// Throws ValidationError naming the first offending field.
    void validate() const;
    double cutoff_radius() const { return cutoff_multiplier * sigma * eps; }
};

struct EnergyRecord {
    int iter = 0;
    double fidelity = 0.0;
    double regularizer = 0.0;
    double total = 0.0;
    int cg_iters = 0;
};

struct Solution {
    std::vector<double> u;
    std::vector<EnergyRecord> energy_trace; // entry 0 is the initial iterate u0 = f
    int iterations = 0;
    bool converged = false;
    std::vector<double> edge_jumps; // |u_i - u_j| per stored undirected edge
};

// ---------------------------------------------------------------------------
// Standing assumptions
// ---------------------------------------------------------------------------

enum class CheckStatus { Pass, Fail, Flagged };

struct AssumptionCheck {
    std::string name;
    CheckStatus status;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;

    bool all_passed() const; // Flagged entries do not count as failures
    const AssumptionCheck* find(const std::string& name) const;
};

/// Dense-sampling checks of zeta (concavity, monotonicity, derivative at 0,
/// saturation limit), of eta (nonincreasing, not identically zero, finite
/// radial moments int (t^d + t^{p-q+d-1}) eta) and of the exponent range.
/// Check names: "A1 concavity", "A2 monotonicity", "A3 derivative at 0",
/// "A3 limit", "B1 nonincreasing", "B1 nonzero", "B2 moments", "p range",
/// "q range".
AssumptionReport validate_assumptions(const ZetaSpec& spec, const RadialKernel& eta,
                                      double p, double q, int d);

/// Integral of t^power * eta(t) over [0, inf). Returns nullopt when the
/// dyadic-panel quadrature does not settle (divergent tail).
std::optional<double> radial_moment(const RadialKernel& eta, double power);

} // namespace gms
