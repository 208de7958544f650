#include "gms/core.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gms {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_nonnegative(double t, const char* fn) {
    if (!(t >= 0.0)) {
        std::ostringstream os;
        os << fn << ": argument must be >= 0, got " << t;
        throw DomainError(os.str());
    }
}

} // namespace

// ---------------------------------------------------------------------------
// PointCloud
// ---------------------------------------------------------------------------

PointCloud::PointCloud(int dim, std::vector<double> coords,
                       std::optional<std::vector<double>> labels)
    : dim_(dim), coords_(std::move(coords)), labels_(std::move(labels)) {
    if (dim_ <= 0) throw ValidationError("PointCloud: dimension must be positive");
    if (coords_.empty()) throw ValidationError("PointCloud: at least one point is required");
    if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
        throw ValidationError("PointCloud: coordinate count is not a multiple of the dimension");
    if (!all_finite(coords_)) throw ValidationError("PointCloud: non-finite coordinate");
    if (labels_) {
        if (labels_->size() != size())
            throw ValidationError("PointCloud: label count does not match point count");
        if (!all_finite(*labels_)) throw ValidationError("PointCloud: non-finite label");
    }
}

const std::vector<double>& PointCloud::labels() const {
    if (!labels_) throw ValidationError("PointCloud: labels are required but missing");
    return *labels_;
}

PointCloud PointCloud::with_labels(std::vector<double> labels) const {
    return PointCloud(dim_, coords_, std::move(labels));
}

// ---------------------------------------------------------------------------
// Zeta
// ---------------------------------------------------------------------------

void ZetaSpec::validate() const {
    if (kind == ZetaKind::TvSmoothed && !(delta > 0.0 && std::isfinite(delta)))
        throw ValidationError("ZetaSpec: TvSmoothed requires a positive finite delta");
}

double zeta_value(const ZetaSpec& spec, double t) {
    require_nonnegative(t, "zeta_value");
    switch (spec.kind) {
    case ZetaKind::MsArctan:
        return (2.0 / std::numbers::pi) * std::atan(std::numbers::pi * t / 2.0);
    case ZetaKind::TvSmoothed:
        return std::sqrt(spec.delta * spec.delta + t);
    case ZetaKind::Quadratic:
        return t;
    case ZetaKind::Truncated:
        return std::min(t, 1.0);
    }
    return 0.0;
}

double zeta_derivative(const ZetaSpec& spec, double t) {
    require_nonnegative(t, "zeta_derivative");
    switch (spec.kind) {
    case ZetaKind::MsArctan: {
        const double a = std::numbers::pi * t / 2.0;
        return 1.0 / (1.0 + a * a);
    }
    case ZetaKind::TvSmoothed:
        return 1.0 / (2.0 * std::sqrt(spec.delta * spec.delta + t));
    case ZetaKind::Quadratic:
        return 1.0;
    case ZetaKind::Truncated:
        return t < 1.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

std::optional<double> zeta_limit(const ZetaSpec& spec) {
    switch (spec.kind) {
    case ZetaKind::MsArctan:
    case ZetaKind::Truncated:
        return 1.0;
    case ZetaKind::TvSmoothed:
    case ZetaKind::Quadratic:
        return std::nullopt;
    }
    return std::nullopt;
}

std::string to_string(ZetaKind kind) {
    switch (kind) {
    case ZetaKind::MsArctan: return "ms";
    case ZetaKind::TvSmoothed: return "tv";
    case ZetaKind::Quadratic: return "lap";
    case ZetaKind::Truncated: return "truncated";
    }
    return "?";
}

ZetaSpec parse_zeta(const std::string& name, double delta) {
    if (name == "ms" || name == "MsArctan") return ZetaSpec::ms_arctan();
    if (name == "tv" || name == "TvSmoothed") {
        ZetaSpec s = ZetaSpec::tv_smoothed(delta);
        s.validate();
        return s;
    }
    if (name == "lap" || name == "Quadratic") return ZetaSpec::quadratic();
    if (name == "truncated" || name == "Truncated") return ZetaSpec::truncated();
    throw ValidationError("unknown zeta kind '" + name + "' (expected ms, tv or lap)");
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

RadialKernel RadialKernel::scaled(double c) const {
    auto f = eta;
    std::ostringstream os;
    os << c << "*" << name;
    return {os.str(), [f, c](double t) { return c * f(t); }, support};
}

RadialKernel RadialKernel::gaussian(double sigma) {
    std::ostringstream os;
    os << "gaussian(sigma=" << sigma << ")";
    const double s2 = 2.0 * sigma * sigma;
    return {os.str(), [s2](double t) { return std::exp(-t * t / s2); }};
}

RadialKernel RadialKernel::indicator(double radius) {
    std::ostringstream os;
    os << "indicator(" << radius << ")";
    return {os.str(), [radius](double t) { return t <= radius ? 1.0 : 0.0; }, radius};
}

RadialKernel RadialKernel::inverse() {
    return {"inverse", [](double t) { return t > 0.0 ? 1.0 / t : std::numeric_limits<double>::infinity(); }};
}

RadialKernel RadialKernel::zero() {
    return {"zero", [](double) { return 0.0; }};
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(lambda)) throw ValidationError("lambda must be positive");
    if (!positive(eps)) throw ValidationError("eps must be positive");
    if (!positive(sigma)) throw ValidationError("sigma must be positive");
    if (k_max < 1) throw ValidationError("k must be a positive integer");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be >= 1");
    if (!(q >= 0.0) || !(q < p)) throw ValidationError("q must lie in [0, p)");
    if (!positive(cg_tol)) throw ValidationError("cg_tol must be positive");
    if (cg_max_iter < 0) throw ValidationError("cg_max_iter must be nonnegative");
    if (!positive(irls_tol)) throw ValidationError("irls_tol must be positive");
    if (irls_max_iter < 1) throw ValidationError("irls_max_iter must be positive");
    if (!positive(cutoff_multiplier)) throw ValidationError("cutoff_multiplier must be positive");
}

// ---------------------------------------------------------------------------
// Assumptions
// ---------------------------------------------------------------------------

bool AssumptionReport::all_passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const AssumptionCheck& c) { return c.status == CheckStatus::Fail; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::optional<double> radial_moment(const RadialKernel& eta, double power) {
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double t) {
        const double v = eta(t);
        return v == 0.0 ? 0.0 : std::pow(t, power) * v;
    };
    auto panel = [&](double a, double b) {
        double err = 0.0;
        return gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-14, &err);
    };

    const double support = eta.support;
    double total = panel(0.0, std::min(1.0, support));
    if (!std::isfinite(total)) return std::nullopt;
    int quiet = 0;
    double lo = 1.0;
    for (int k = 0; k < 120; ++k) {
        if (lo >= support) return total;
        const double hi = std::min(2.0 * lo, support);
        const double piece = panel(lo, hi);
        if (!std::isfinite(piece)) return std::nullopt;
        total += piece;
        lo = hi;
        if (std::abs(piece) <= 1e-15 * std::abs(total)) {
            // settled only after a run of negligible panels past t = 64
            if (++quiet >= 3 && lo >= 64.0) return total;
        } else {
            quiet = 0;
        }
    }
    return std::nullopt;
}

AssumptionReport validate_assumptions(const ZetaSpec& spec, const RadialKernel& eta,
                                      double p, double q, int d) {
    AssumptionReport report;
    auto add = [&](std::string name, CheckStatus s, std::string detail) {
        report.checks.push_back({std::move(name), s, std::move(detail)});
    };

    // zeta: dense sampling on [0, 100] plus a few large arguments
    std::vector<double> ts;
    for (int i = 0; i <= 4000; ++i) ts.push_back(100.0 * i / 4000.0);
    for (double t : {1e3, 1e4, 1e6}) ts.push_back(t);

    bool monotone = true;
    bool concave = true;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double a = ts[i], b = ts[i + 1];
        const double za = zeta_value(spec, a), zb = zeta_value(spec, b);
        if (za > zb + 1e-15) monotone = false;
        const double zm = zeta_value(spec, 0.5 * (a + b));
        if (zm + 1e-12 < 0.5 * (za + zb)) concave = false;
    }
    // midpoint concavity across wide spans as well
    for (std::size_t i = 0; i < ts.size(); i += 97)
        for (std::size_t j = i + 1; j < ts.size(); j += 131) {
            const double zm = zeta_value(spec, 0.5 * (ts[i] + ts[j]));
            if (zm + 1e-12 < 0.5 * (zeta_value(spec, ts[i]) + zeta_value(spec, ts[j]))) concave = false;
        }
    add("A1 concavity", concave ? CheckStatus::Pass : CheckStatus::Fail, "midpoint test on sampled pairs");
    add("A2 monotonicity", monotone ? CheckStatus::Pass : CheckStatus::Fail, "consecutive samples nondecreasing");

    const double d0 = zeta_derivative(spec, 0.0);
    add("A3 derivative at 0", (std::isfinite(d0) && d0 > 0.0) ? CheckStatus::Pass : CheckStatus::Fail,
        "zeta'(0) = " + std::to_string(d0));
    if (auto lim = zeta_limit(spec))
        add("A3 limit", CheckStatus::Pass, "Theta = " + std::to_string(*lim));
    else
        add("A3 limit", CheckStatus::Flagged, "Theta unbounded; continuum jump term undefined");

    // eta
    bool nonincreasing = true;
    bool nonzero = false;
    double prev = eta(1e-6);
    for (int i = 1; i <= 4000; ++i) {
        const double t = 1e-6 + 20.0 * i / 4000.0;
        const double v = eta(t);
        if (v > prev * (1.0 + 1e-12) + 1e-300) nonincreasing = false;
        if (v > 0.0) nonzero = true;
        prev = v;
    }
    add("B1 nonincreasing", nonincreasing ? CheckStatus::Pass : CheckStatus::Fail, "sampled on (0, 20]");
    add("B1 nonzero", nonzero ? CheckStatus::Pass : CheckStatus::Fail, "eta not identically zero");

    const auto m1 = radial_moment(eta, static_cast<double>(d));
    const auto m2 = radial_moment(eta, p - q + d - 1.0);
    if (m1 && m2 && (*m1 + *m2) > 0.0) {
        add("B2 moments", CheckStatus::Pass, "int (t^d + t^{p-q+d-1}) eta = " + std::to_string(*m1 + *m2));
    } else if (m1 && m2) {
        add("B2 moments", CheckStatus::Fail, "moments vanish");
    } else {
        add("B2 moments", CheckStatus::Fail, "radial moment quadrature diverges");
    }

    add("p range", p >= 1.0 ? CheckStatus::Pass : CheckStatus::Fail, "p >= 1");
    add("q range", (q >= 0.0 && q < p) ? CheckStatus::Pass : CheckStatus::Fail, "0 <= q < p");
    return report;
}

} // namespace gms
