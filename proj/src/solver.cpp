#include "gms/solver.hpp"

#include "gms/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace gms {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

void check_length(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw ValidationError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                              std::to_string(v.size()));
}

} // namespace

CgNotConverged::CgNotConverged(double residual_, int iterations_)
    : NumericalError([&] {
          std::ostringstream os;
          os << "conjugate gradient did not converge in " << iterations_ << " iterations (relative residual "
             << residual_ << ")";
          return os.str();
      }()),
      residual(residual_), iterations(iterations_) {}

// ---------------------------------------------------------------------------
// LaplacianSystem
// ---------------------------------------------------------------------------

LaplacianSystem::LaplacianSystem(const SparseGraph& graph, std::span<const double> z, double lambda, double eps) {
    const std::size_t n = graph.num_vertices();
    if (z.size() != graph.num_edges()) throw ValidationError("LaplacianSystem: one z per edge is required");
    if (!(lambda > 0.0) || !(eps > 0.0)) throw ValidationError("LaplacianSystem: lambda and eps must be positive");
    coefficient_ = n == 0 ? 0.0 : 2.0 / (lambda * eps * eps * static_cast<double>(n));

    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + graph.degree(v);
    cols_.resize(offsets_[n]);
    vals_.resize(offsets_[n]);
    diagonal_.assign(n, 1.0);
    const auto& edges = graph.edges();
    detail::parallel_for(n, [&](std::size_t v) {
        std::size_t k = offsets_[v];
        double row = 0.0;
        for (const auto& nb : graph.neighbors(v)) {
            const double a = coefficient_ * z[nb.edge] * edges[nb.edge].weight;
            cols_[k] = nb.vertex;
            vals_[k] = a;
            row += a;
            ++k;
        }
        diagonal_[v] = 1.0 + row;
    });
}

void LaplacianSystem::apply(std::span<const double> v, std::span<double> out) const {
    detail::parallel_for(size(), [&](std::size_t i) {
        double off = 0.0;
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) off += vals_[k] * v[cols_[k]];
        out[i] = diagonal_[i] * v[i] - off;
    });
}

CgStats conjugate_gradient(const LaplacianSystem& system, std::span<const double> b, std::span<double> x,
                           double tol, int max_iter) {
    const std::size_t n = system.size();
    check_length(b, n, "conjugate_gradient: b");
    if (x.size() != n) throw ValidationError("conjugate_gradient: x has the wrong length");

    CgStats stats;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }
    std::vector<double> r(n), zv(n), p(n), ap(n);
    system.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    double rnorm = std::sqrt(dot(r, r));
    stats.relative_residual = rnorm / bnorm;
    if (stats.relative_residual <= tol) return stats;

    const auto& diag = system.diagonal();
    for (std::size_t i = 0; i < n; ++i) zv[i] = r[i] / diag[i];
    p = zv;
    double rz = dot(r, zv);
    for (int it = 1; it <= max_iter; ++it) {
        system.apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw NumericalError("conjugate_gradient: operator is not positive definite");
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = std::sqrt(dot(r, r));
        stats.iterations = it;
        stats.relative_residual = rnorm / bnorm;
        if (stats.relative_residual <= tol) return stats;
        for (std::size_t i = 0; i < n; ++i) zv[i] = r[i] / diag[i];
        const double rz_next = dot(r, zv);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = zv[i] + beta * p[i];
    }
    throw CgNotConverged(stats.relative_residual, max_iter);
}

// ---------------------------------------------------------------------------
// IRLS pieces
// ---------------------------------------------------------------------------

std::vector<double> update_z(const SparseGraph& graph, std::span<const double> u, const ZetaSpec& spec,
                             double eps) {
    check_length(u, graph.num_vertices(), "update_z: u");
    const auto& edges = graph.edges();
    std::vector<double> z(edges.size());
    detail::parallel_for(edges.size(), [&](std::size_t e) {
        const double diff = u[edges[e].i] - u[edges[e].j];
        z[e] = zeta_derivative(spec, diff * diff / eps);
    });
    return z;
}

USolve solve_u(const SparseGraph& graph, std::span<const double> f, std::span<const double> z, double lambda,
               double eps, std::span<const double> initial, double cg_tol, int cg_max_iter) {
    const std::size_t n = graph.num_vertices();
    check_length(f, n, "solve_u: f");
    for (double v : z)
        if (!(v >= 0.0)) throw ValidationError("solve_u: z must be nonnegative");
    USolve out;
    if (initial.empty()) out.u.assign(f.begin(), f.end());
    else {
        check_length(initial, n, "solve_u: initial guess");
        out.u.assign(initial.begin(), initial.end());
    }
    const LaplacianSystem system(graph, z, lambda, eps);
    const int max_iter = cg_max_iter > 0 ? cg_max_iter : static_cast<int>(std::max<std::size_t>(10 * n, 100));
    out.stats = conjugate_gradient(system, f, out.u, cg_tol, max_iter);
    return out;
}

double surrogate_objective(const SparseGraph& graph, std::span<const double> v, std::span<const double> f,
                           const ZetaSpec& spec, double lambda, double eps, std::span<const double> u_ref) {
    const std::size_t n = graph.num_vertices();
    check_length(v, n, "surrogate_objective: v");
    check_length(f, n, "surrogate_objective: f");
    check_length(u_ref, n, "surrogate_objective: u_ref");
    KahanSum fid;
    for (std::size_t i = 0; i < n; ++i) fid.add((v[i] - f[i]) * (v[i] - f[i]));
    const double sum = ordered_edge_sum(graph, [&](const Edge& e) {
        const double dr = u_ref[e.i] - u_ref[e.j];
        const double dv = v[e.i] - v[e.j];
        const double tr = dr * dr / eps;
        const double tv = dv * dv / eps;
        return (zeta_value(spec, tr) + zeta_derivative(spec, tr) * (tv - tr)) * e.weight;
    });
    return fid.value() + (n == 0 ? 0.0 : 2.0 * sum / (lambda * eps * static_cast<double>(n)));
}

Solution irls_minimize(const SparseGraph& graph, std::span<const double> f, const ZetaSpec& spec,
                       const SolverConfig& config, const IterationObserver& observer) {
    config.validate();
    spec.validate();
    const std::size_t n = graph.num_vertices();
    if (f.empty()) throw ValidationError("irls_minimize: labels are required");
    check_length(f, n, "irls_minimize: f");

    Solution sol;
    sol.u.assign(f.begin(), f.end());
    auto record = [&](int iter, int cg_iters) {
        const auto e = objective_sec6(graph, sol.u, f, spec, config.lambda, config.eps);
        sol.energy_trace.push_back({iter, e.fidelity, e.regularizer, e.total, cg_iters});
        if (observer) observer(sol.energy_trace.back(), sol.u);
        return e.total;
    };
    double previous = record(0, 0);

    for (int it = 1; it <= config.irls_max_iter; ++it) {
        const auto z = update_z(graph, sol.u, spec, config.eps);
        auto step = solve_u(graph, f, z, config.lambda, config.eps, sol.u, config.cg_tol, config.cg_max_iter);
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(step.u[i]))
                throw NumericalError("irls_minimize: non-finite value at vertex " + std::to_string(i) +
                                     " in sweep " + std::to_string(it));
        sol.u = std::move(step.u);
        sol.iterations = it;
        const double current = record(it, step.stats.iterations);
        if (previous <= 0.0 || (previous - current) < config.irls_tol * previous) {
            sol.converged = true;
            break;
        }
        previous = current;
    }
    sol.edge_jumps = edge_jumps(graph, sol.u);
    return sol;
}

std::vector<FlaggedEdge> detect_edges(const SparseGraph& graph, std::span<const double> u, double threshold) {
    check_length(u, graph.num_vertices(), "detect_edges: u");
    std::vector<FlaggedEdge> out;
    for (const auto& e : graph.edges()) {
        const double jump = std::abs(u[e.i] - u[e.j]);
        if (jump > threshold) out.push_back({e.i, e.j, jump});
    }
    return out; // edges() is already sorted by (i, j)
}

std::vector<double> edge_jumps(const SparseGraph& graph, std::span<const double> u) {
    check_length(u, graph.num_vertices(), "edge_jumps: u");
    std::vector<double> out;
    out.reserve(graph.num_edges());
    for (const auto& e : graph.edges()) out.push_back(std::abs(u[e.i] - u[e.j]));
    return out;
}

void write_trace_jsonl(std::ostream& os, const std::vector<EnergyRecord>& trace) {
    for (const auto& r : trace) {
        nlohmann::ordered_json j;
        j["iter"] = r.iter;
        j["fidelity"] = r.fidelity;
        j["regularizer"] = r.regularizer;
        j["total"] = r.total;
        j["cg_iters"] = r.cg_iters;
        os << j.dump() << '\n';
    }
}

} // namespace gms
