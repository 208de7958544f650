#include "gms/continuum.hpp"

#include "gms/energy.hpp"
#include "gms/graph.hpp"
#include "gms/random.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gms {

namespace {

constexpr double kPi = std::numbers::pi;

double required_moment(const RadialKernel& eta, double power, const char* what) {
    const auto m = radial_moment(eta, power);
    if (!m) throw AssumptionViolation(std::string(what) + ": radial moment of eta diverges");
    if (!(*m > 0.0)) throw AssumptionViolation(std::string(what) + ": eta is identically zero");
    return *m;
}

void require_dimension(int d) {
    if (d < 1) throw ValidationError("dimension must be >= 1");
}

// Gauss-Legendre rule on [0,1] built from composite 32-point panels.
struct LineRule {
    std::vector<double> x;
    std::vector<double> w;
};

LineRule composite_rule(int panels) {
    using Rule = boost::math::quadrature::gauss<double, 32>;
    const auto& abscissa = Rule::abscissa(); // nonnegative half, 16 nodes for N = 32
    const auto& weights = Rule::weights();
    LineRule rule;
    const double h = 1.0 / panels;
    for (int k = 0; k < panels; ++k) {
        const double mid = (k + 0.5) * h;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            const double dx = 0.5 * h * abscissa[i];
            const double wi = 0.5 * h * weights[i];
            if (abscissa[i] == 0.0) {
                rule.x.push_back(mid);
                rule.w.push_back(wi);
            } else {
                rule.x.push_back(mid - dx);
                rule.w.push_back(wi);
                rule.x.push_back(mid + dx);
                rule.w.push_back(wi);
            }
        }
    }
    return rule;
}

} // namespace

double omega_ball_volume(int m) {
    if (m < 0) throw ValidationError("omega_ball_volume: m must be >= 0");
    return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double sphere_moment_factor(double p, int d) {
    require_dimension(d);
    return 2.0 * omega_ball_volume(d - 1) * std::tgamma(0.5 * p + 0.5) * std::tgamma(0.5 * d + 0.5) /
           std::tgamma(0.5 * p + 0.5 * d);
}

double theta_eta(double p, double q, int d, const RadialKernel& eta) {
    require_dimension(d);
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("theta_eta: p must be >= 1");
    if (!(q >= 0.0) || !(q < p)) throw ValidationError("theta_eta: q must lie in [0, p)");
    return sphere_moment_factor(p, d) * required_moment(eta, p - q + d - 1.0, "theta_eta");
}

double sigma_eta(int d, const RadialKernel& eta) {
    require_dimension(d);
    return 2.0 * omega_ball_volume(d - 1) * required_moment(eta, static_cast<double>(d), "sigma_eta");
}

RadialKernel truncated_gaussian(double sigma, double cutoff) {
    if (!(sigma > 0.0) || !(cutoff > 0.0)) throw ValidationError("truncated_gaussian: sigma and cutoff must be positive");
    std::ostringstream os;
    os << "gaussian(sigma=" << sigma << ", cutoff=" << cutoff << ")";
    const double s2 = 2.0 * sigma * sigma;
    const double radius = cutoff * sigma;
    return {os.str(), [s2, radius](double t) { return t <= radius ? std::exp(-t * t / s2) : 0.0; }, radius};
}

LimitConstants limit_constants(const ZetaSpec& spec, const RadialKernel& eta, double p, double q, int d) {
    spec.validate();
    LimitConstants c;
    c.theta = theta_eta(p, q, d, eta);
    c.sigma = sigma_eta(d, eta);
    c.theta_big = zeta_limit(spec);
    c.zeta_prime0 = zeta_derivative(spec, 0.0);
    c.d = d;
    c.p = p;
    c.q = q;
    return c;
}

// ---------------------------------------------------------------------------
// Test cases
// ---------------------------------------------------------------------------

TestCase TestCase::smooth(int d, double frequency) {
    TestCase c;
    c.kind = CaseKind::Smooth;
    c.d = d;
    c.frequency = frequency;
    return c;
}

TestCase TestCase::step(int d, double jump_at, double low, double high) {
    if (!(jump_at > 0.0 && jump_at < 1.0)) throw ValidationError("step case: jump_at must lie in (0, 1)");
    TestCase c;
    c.kind = CaseKind::Step;
    c.d = d;
    c.jump_at = jump_at;
    c.low = low;
    c.high = high;
    return c;
}

TestCase TestCase::noisy_fidelity(int d, double offset, double noise_halfwidth) {
    TestCase c;
    c.kind = CaseKind::NoisyFidelity;
    c.d = d;
    c.offset = offset;
    c.noise_halfwidth = noise_halfwidth;
    return c;
}

double TestCase::value(const double* x) const {
    switch (kind) {
    case CaseKind::Smooth:
        return std::sin(2.0 * kPi * frequency * x[0]);
    case CaseKind::Step:
        return x[0] > jump_at ? high : low;
    case CaseKind::NoisyFidelity:
        return std::sin(2.0 * kPi * frequency * x[0]) + offset;
    }
    return 0.0;
}

double TestCase::gradient_norm(const double* x) const {
    switch (kind) {
    case CaseKind::Smooth:
    case CaseKind::NoisyFidelity:
        return std::abs(2.0 * kPi * frequency * std::cos(2.0 * kPi * frequency * x[0]));
    case CaseKind::Step:
        return 0.0;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Quadrature and the continuum functional
// ---------------------------------------------------------------------------

double cube_quadrature(int d, const std::function<double(const double*)>& g) {
    require_dimension(d);
    constexpr double kMaxTotal = 4194304.0; // 2^22
    int per_axis = static_cast<int>(std::floor(std::pow(kMaxTotal, 1.0 / d) + 1e-9));
    per_axis = std::clamp(per_axis, 32, 2048);
    const int panels = std::max(1, per_axis / 32);
    const LineRule rule = composite_rule(panels);
    const std::size_t m = rule.x.size();

    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    KahanSum total;
    for (;;) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            x[a] = rule.x[idx[a]];
            w *= rule.w[idx[a]];
        }
        total.add(w * g(x.data()));
        int a = 0;
        while (a < d && ++idx[a] == m) idx[a++] = 0;
        if (a == d) break;
    }
    return total.value();
}

double continuum_ms(const LimitConstants& constants, const TestCase& test_case) {
    if (test_case.d != constants.d) throw ValidationError("continuum_ms: case dimension differs from the constants");
    if (test_case.has_jump() && !constants.theta_big)
        throw ValidationError("continuum_ms: jump term requires a bounded zeta (Theta is unbounded)");

    double gradient_term = 0.0;
    if (test_case.kind != CaseKind::Step) {
        const double p = constants.p;
        gradient_term = cube_quadrature(test_case.d, [&](const double* x) {
            const double rho = test_case.density(x);
            return std::pow(test_case.gradient_norm(x), p) * rho * rho;
        });
    }
    double jump_term = 0.0;
    if (test_case.has_jump()) jump_term = constants.sigma * *constants.theta_big * test_case.jump_measure();
    return constants.theta * constants.zeta_prime0 * gradient_term + jump_term;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

std::vector<GammaRow> gamma_experiment(const TestCase& test_case, const std::vector<std::size_t>& n_list,
                                       const EpsRule& eps_rule, const ZetaSpec& spec, double p, double q,
                                       std::uint64_t seed, const GammaOptions& options) {
    const int d = test_case.d;
    const RadialKernel eta = truncated_gaussian(options.kernel_sigma, options.cutoff);
    const double continuum = continuum_ms(limit_constants(spec, eta, p, q, d), test_case);

    std::vector<GammaRow> rows;
    for (const std::size_t n : n_list) {
        if (n < 2) throw ValidationError("gamma_experiment: every n must be >= 2");
        if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
            throw ValidationError("gamma_experiment: n too large");

        std::vector<double> coords(n * static_cast<std::size_t>(d));
        for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = counter_uniform(seed, n, k);
        const PointCloud cloud(d, std::move(coords));

        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = test_case.value(cloud.point(i).data());

        SolverConfig config;
        config.eps = eps_rule(n);
        config.sigma = options.kernel_sigma;
        config.cutoff_multiplier = options.cutoff;
        config.k_max = static_cast<int>(n);
        config.validate();
        const SparseGraph graph = build_geometric_graph(cloud, config);

        GammaRow row;
        row.n = n;
        row.eps = config.eps;
        row.discrete = gms_energy(graph, u, spec, config.eps, p, q);
        row.continuum = continuum;
        row.ratio = row.discrete / continuum;
        row.seed = seed;
        rows.push_back(row);
    }
    return rows;
}

void write_gamma_csv(std::ostream& os, const std::vector<GammaRow>& rows, bool header) {
    if (header) os << "n,eps,discrete,continuum,ratio,seed\n";
    const auto old = os.precision(17);
    for (const auto& r : rows)
        os << r.n << ',' << r.eps << ',' << r.discrete << ',' << r.continuum << ',' << r.ratio << ',' << r.seed << '\n';
    os.precision(old);
}

NoiseOffsetResult noise_offset_experiment(const TestCase& test_case, std::size_t n, std::size_t trials,
                                          std::uint64_t seed) {
    if (test_case.kind != CaseKind::NoisyFidelity)
        throw ValidationError("noise_offset_experiment: case must be NoisyFidelity");
    if (test_case.gaussian_noise)
        throw ValidationError("noise_offset_experiment: noise must have compact support and mean zero");
    const double a = test_case.noise_halfwidth;
    if (!(a >= 0.0) || !std::isfinite(a))
        throw ValidationError("noise_offset_experiment: noise half-width must be finite and >= 0");
    if (n == 0 || trials == 0) throw ValidationError("noise_offset_experiment: n and trials must be positive");

    const int d = test_case.d;
    std::vector<double> x(static_cast<std::size_t>(d));
    KahanSum sum;
    KahanSum sum_sq;
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t base = i * static_cast<std::uint64_t>(d + 1);
            for (int k = 0; k < d; ++k) x[k] = counter_uniform(seed, t, base + k);
            const double y = a * (2.0 * counter_uniform(seed, t, base + d) - 1.0);
            TestCase f_case = test_case;
            f_case.offset = 0.0;
            const double r = test_case.value(x.data()) - f_case.value(x.data()) - y;
            sum.add(r * r);
            sum_sq.add(r * r * r * r);
        }
    }
    NoiseOffsetResult out;
    out.samples = n * trials;
    const double N = static_cast<double>(out.samples);
    out.mean = sum.value() / N;
    const double var = out.samples > 1 ? std::max(0.0, (sum_sq.value() - N * out.mean * out.mean) / (N - 1.0)) : 0.0;
    out.standard_error = std::sqrt(var / N);
    const double c = test_case.offset;
    const double fidelity = cube_quadrature(d, [c](const double*) { return c * c; });
    out.expected = fidelity + a * a / 3.0;
    return out;
}

} // namespace gms
