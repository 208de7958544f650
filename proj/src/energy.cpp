#include "gms/energy.hpp"

#include "gms/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gms {

namespace {

constexpr std::size_t kChunk = 4096;

void check_length(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw ValidationError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                              std::to_string(v.size()));
}

double fidelity_sum(std::span<const double> u, std::span<const double> f) {
    KahanSum s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - f[i];
        s.add(d * d);
    }
    return s.value();
}

} // namespace

SingularityError::SingularityError(std::uint32_t i_, std::uint32_t j_)
    : DomainError("zero-length edge (" + std::to_string(i_) + "," + std::to_string(j_) +
                  ") makes |x_i - x_j|^q singular for q > 0"),
      i(i_), j(j_) {}

double ordered_edge_sum(const SparseGraph& graph, const std::function<double(const Edge&)>& g) {
    const auto& edges = graph.edges();
    const std::size_t chunks = (edges.size() + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    detail::parallel_for(chunks, [&](std::size_t c) {
        KahanSum s;
        const std::size_t end = std::min(edges.size(), (c + 1) * kChunk);
        for (std::size_t e = c * kChunk; e < end; ++e) s.add(g(edges[e]));
        partial[c] = s.value();
    });
    KahanSum total;
    for (double v : partial) total.add(v);
    return total.value();
}

double gms_energy(const SparseGraph& graph, std::span<const double> u, const ZetaSpec& spec,
                  double eps, double p, double q) {
    const std::size_t n = graph.num_vertices();
    check_length(u, n, "gms_energy: u");
    if (!(q >= 0.0 && q < p)) throw ValidationError("gms_energy: q must lie in [0, p)");
    if (!(eps > 0.0)) throw ValidationError("gms_energy: eps must be positive");
    spec.validate();
    if (q > 0.0)
        for (const auto& e : graph.edges())
            if (e.distance == 0.0) throw SingularityError(e.i, e.j);
    if (n == 0) return 0.0;

    const double scale = std::pow(eps, 1.0 - p + q);
    const bool quadratic_plain = (p == 2.0 && q == 0.0);
    const double sum = ordered_edge_sum(graph, [&](const Edge& e) {
        const double diff = std::abs(u[e.i] - u[e.j]);
        double arg;
        if (quadratic_plain) arg = scale * diff * diff;
        else arg = scale * std::pow(diff, p) / (q > 0.0 ? std::pow(e.distance, q) : 1.0);
        return zeta_value(spec, arg) * e.weight;
    });
    const double nn = static_cast<double>(n);
    return 2.0 * sum / (eps * nn * nn);
}

EnergyBreakdown objective_sec6(const SparseGraph& graph, std::span<const double> u,
                               std::span<const double> f, const ZetaSpec& spec, double lambda, double eps) {
    const std::size_t n = graph.num_vertices();
    check_length(u, n, "objective_sec6: u");
    if (f.empty() && n > 0) throw ValidationError("objective_sec6: labels are required");
    check_length(f, n, "objective_sec6: f");
    if (!(lambda > 0.0)) throw ValidationError("objective_sec6: lambda must be positive");
    spec.validate();

    EnergyBreakdown out;
    out.parameterization = Parameterization::Sec6;
    out.fidelity = fidelity_sum(u, f);
    const double sum = ordered_edge_sum(graph, [&](const Edge& e) {
        const double diff = u[e.i] - u[e.j];
        return zeta_value(spec, diff * diff / eps) * e.weight;
    });
    out.regularizer = n == 0 ? 0.0 : 2.0 * sum / (lambda * eps * static_cast<double>(n));
    out.total = out.fidelity + out.regularizer;
    return out;
}

EnergyBreakdown objective_sec1(const SparseGraph& graph, std::span<const double> u,
                               std::span<const double> f, const ZetaSpec& spec, double lambda, double eps,
                               double p, double q) {
    const std::size_t n = graph.num_vertices();
    check_length(u, n, "objective_sec1: u");
    if (f.empty() && n > 0) throw ValidationError("objective_sec1: labels are required");
    check_length(f, n, "objective_sec1: f");
    if (!(lambda >= 0.0)) throw ValidationError("objective_sec1: lambda must be nonnegative");

    EnergyBreakdown out;
    out.parameterization = Parameterization::Sec1;
    out.fidelity = n == 0 ? 0.0 : lambda / static_cast<double>(n) * fidelity_sum(u, f);
    out.regularizer = gms_energy(graph, u, spec, eps, p, q);
    out.total = out.fidelity + out.regularizer;
    return out;
}

} // namespace gms
