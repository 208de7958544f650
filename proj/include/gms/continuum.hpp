// Constants and evaluation of the continuum limit
//
//   MS(u; rho) = theta_eta(p,q) zeta'(0) int |grad u|^p rho^2 dx + sigma_eta Theta int_{S_u} rho^2 dH^{d-1}
//
// together with desk-scale experiments comparing it with the discrete energy
// on random samples.
#pragma once

#include "gms/core.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace gms {

/// A kernel failed (B1)/(B2): identically zero or divergent radial moment.
class AssumptionViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Volume of the unit ball in R^m, pi^{m/2} / Gamma(m/2 + 1); omega_0 = 1.
double omega_ball_volume(int m);

/// Closed form of int_{S^{d-1}} |e . v|^p dH^{d-1}(v) for a unit vector e:
/// 2 omega_{d-1} Gamma(p/2 + 1/2) Gamma(d/2 + 1/2) / Gamma(p/2 + d/2).
double sphere_moment_factor(double p, int d);

/// theta_eta(p,q) = sphere_moment_factor(p, d) * int_0^inf t^{p-q+d-1} eta(t) dt.
double theta_eta(double p, double q, int d, const RadialKernel& eta);

/// sigma_eta = 2 omega_{d-1} int_0^inf t^d eta(t) dt.
double sigma_eta(int d, const RadialKernel& eta);

/// Gaussian profile of width sigma cut to zero beyond cutoff * sigma; the
/// kernel realized by a graph built with those parameters.
RadialKernel truncated_gaussian(double sigma, double cutoff);

struct LimitConstants {
    double theta = 0.0;
    double sigma = 0.0;
    std::optional<double> theta_big; // Theta, nullopt when unbounded
    double zeta_prime0 = 0.0;
    int d = 2;
    double p = 2.0;
    double q = 0.0;
};

LimitConstants limit_constants(const ZetaSpec& spec, const RadialKernel& eta, double p, double q, int d);

enum class CaseKind { Smooth, Step, NoisyFidelity };

/// Test functions on the unit cube [0,1]^d with uniform density.
///   Smooth:         u = sin(2 pi frequency x_1)
///   Step:           u = low + (high - low) 1{x_1 > jump_at}
///   NoisyFidelity:  u = sin(2 pi frequency x_1) + offset, f = sin(2 pi frequency x_1),
///                   observations f + y with y ~ uniform(-noise_halfwidth, noise_halfwidth)
struct TestCase {
    CaseKind kind = CaseKind::Smooth;
    int d = 2;
    double frequency = 1.0;
    double jump_at = 0.5;
    double low = 0.0;
    double high = 1.0;
    double offset = 0.0;
    double noise_halfwidth = 1.0;
    bool gaussian_noise = false; // rejected by the noise experiment

    static TestCase smooth(int d = 2, double frequency = 1.0);
    static TestCase step(int d = 2, double jump_at = 0.5, double low = 0.0, double high = 1.0);
    static TestCase noisy_fidelity(int d = 2, double offset = 0.0, double noise_halfwidth = 1.0);

    double density(const double*) const { return 1.0; }
    double value(const double* x) const;
    /// Gradient norm |grad u(x)| away from the jump set.
    double gradient_norm(const double* x) const;
    bool has_jump() const { return kind == CaseKind::Step && high != low; }
    /// H^{d-1} measure of the jump set inside the unit cube.
    double jump_measure() const { return has_jump() ? 1.0 : 0.0; }
};

/// Tensor Gauss-Legendre quadrature of g over [0,1]^d; at most 2048 nodes per
/// axis and 2^22 nodes overall.
double cube_quadrature(int d, const std::function<double(const double*)>& g);

/// Throws ValidationError when the case has a jump set but Theta is unbounded.
double continuum_ms(const LimitConstants& constants, const TestCase& test_case);

/// eps as a function of n, e.g. 0.7 n^{-1/4}.
struct EpsRule {
    double scale = 0.7;
    double exponent = -0.25;
    double operator()(std::size_t n) const { return scale * std::pow(static_cast<double>(n), exponent); }
};

struct GammaRow {
    std::size_t n = 0;
    double eps = 0.0;
    double discrete = 0.0;
    double continuum = 0.0;
    double ratio = 0.0;
    std::uint64_t seed = 0;
};

struct GammaOptions {
    double kernel_sigma = 0.2; // Gaussian width of eta
    double cutoff = 3.0;       // kernel support in units of kernel_sigma
};

/// For each n: sample n uniform points on [0,1]^d, restrict u, build the
/// uncapped graph at eps_rule(n), and compare gms_energy with continuum_ms
/// computed for the same (truncated) kernel.
std::vector<GammaRow> gamma_experiment(const TestCase& test_case, const std::vector<std::size_t>& n_list,
                                       const EpsRule& eps_rule, const ZetaSpec& spec, double p, double q,
                                       std::uint64_t seed, const GammaOptions& options = {});

void write_gamma_csv(std::ostream& os, const std::vector<GammaRow>& rows, bool header = true);

struct NoiseOffsetResult {
    double mean = 0.0;           // average of (1/n) sum |u - f - y|^2 over trials
    double standard_error = 0.0; // of the pooled per-sample mean
    double expected = 0.0;       // int |u - f|^2 rho + Var(beta)
    std::size_t samples = 0;
};

/// Throws ValidationError for unbounded (Gaussian) noise.
NoiseOffsetResult noise_offset_experiment(const TestCase& test_case, std::size_t n, std::size_t trials,
                                          std::uint64_t seed);

} // namespace gms
