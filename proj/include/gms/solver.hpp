// Half-quadratic (IRLS) minimization of the Sec6 objective
//
//   sum |u_i - f_i|^2 + (1/(lambda eps n)) sum_{i,j} zeta(|u_i - u_j|^2 / eps) w_ij.
//
// Each sweep sets z_ij = zeta'(|u_i - u_j|^2 / eps) and solves the quadratic
// subproblem, whose first-order condition is
//
//   (I + c L_zw) u = f,   c = 2 / (lambda eps^2 n),   (L_zw v)_i = sum_j z_ij w_ij (v_i - v_j).
//
// Concavity gives zeta(s) <= zeta(t) + zeta'(t)(s - t), so each sweep
// minimizes a majorizer that touches the objective at the current iterate
// and the objective never increases. See docs/irls.md for the derivation.
#pragma once

#include "gms/core.hpp"
#include "gms/energy.hpp"
#include "gms/graph.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace gms {

class CgNotConverged : public NumericalError {
public:
    CgNotConverged(double residual, int iterations);
    double residual;
    int iterations;
};

/// v -> v + c L_zw v with c = 2 / (lambda eps^2 n). Symmetric positive definite.
class LaplacianSystem {
public:
    LaplacianSystem(const SparseGraph& graph, std::span<const double> z, double lambda, double eps);

    std::size_t size() const { return offsets_.size() - 1; }
    double coefficient() const { return coefficient_; }
    void apply(std::span<const double> v, std::span<double> out) const;
    const std::vector<double>& diagonal() const { return diagonal_; }

private:
    double coefficient_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_; // c z_ij w_ij per directed entry
    std::vector<double> diagonal_;
};

struct CgStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned CG on `system`, starting from x (warm start).
/// Stops when ||b - A x|| <= tol ||b||; throws CgNotConverged after max_iter.
CgStats conjugate_gradient(const LaplacianSystem& system, std::span<const double> b, std::span<double> x,
                           double tol, int max_iter);

/// z_ij = zeta'(|u_i - u_j|^2 / eps), one per stored undirected edge.
std::vector<double> update_z(const SparseGraph& graph, std::span<const double> u, const ZetaSpec& spec,
                             double eps);

struct USolve {
    std::vector<double> u;
    CgStats stats;
};

/// Solves (I + c L_zw) u = f. `initial` (empty for u = f) seeds CG.
USolve solve_u(const SparseGraph& graph, std::span<const double> f, std::span<const double> z, double lambda,
               double eps, std::span<const double> initial, double cg_tol, int cg_max_iter);

/// Majorizer of objective_sec6 built at u_ref, evaluated at v:
/// fidelity(v) + (1/(lambda eps n)) sum [zeta(t_ref) + zeta'(t_ref)(t(v) - t_ref)] w.
double surrogate_objective(const SparseGraph& graph, std::span<const double> v, std::span<const double> f,
                           const ZetaSpec& spec, double lambda, double eps, std::span<const double> u_ref);

/// Called after each recorded iterate (including iterate 0).
using IterationObserver = std::function<void(const EnergyRecord&, std::span<const double> u)>;

/// u0 = f; alternate z and u updates until the relative decrease of the
/// total energy drops below irls_tol or irls_max_iter sweeps are done.
/// Throws NumericalError on NaN iterates and propagates CgNotConverged.
Solution irls_minimize(const SparseGraph& graph, std::span<const double> f, const ZetaSpec& spec,
                       const SolverConfig& config, const IterationObserver& observer = {});

struct FlaggedEdge {
    std::uint32_t i;
    std::uint32_t j;
    double jump;
};

/// Edges with |u_i - u_j| > threshold, sorted by (i, j).
std::vector<FlaggedEdge> detect_edges(const SparseGraph& graph, std::span<const double> u, double threshold);

std::vector<double> edge_jumps(const SparseGraph& graph, std::span<const double> u);

/// One JSON object per line: {"iter", "fidelity", "regularizer", "total", "cg_iters"}.
void write_trace_jsonl(std::ostream& os, const std::vector<EnergyRecord>& trace);

} // namespace gms
