#include "gms/graph.hpp"

#include "gms/parallel.hpp"
#include "kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace gms {

namespace {

using detail::Candidate;

// Builds the final graph from each vertex's kept candidate list (union rule).
SparseGraph assemble(const PointCloud& cloud, const SolverConfig& config,
                     const std::vector<std::vector<Candidate>>& kept) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::size_t total = 0;
    for (const auto& k : kept) total += k.size();
    pairs.reserve(total);
    for (std::uint32_t i = 0; i < kept.size(); ++i)
        for (const auto& [d2, j] : kept[i]) pairs.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<Edge> edges(pairs.size());
    const int dim = cloud.dim();
    detail::parallel_for(pairs.size(), [&](std::size_t e) {
        const auto [i, j] = pairs[e];
        const double r = std::sqrt(detail::squared_distance(cloud.point(i), cloud.point(j)));
        edges[e] = Edge{i, j, kernel_weight(r, config.eps, config.sigma, dim), r};
    });
    return SparseGraph(cloud.size(), dim, config.eps, config.sigma, std::move(edges));
}

void check_inputs(const PointCloud& cloud, const SolverConfig& config) {
    if (cloud.size() == 0) throw ValidationError("graph construction: empty point cloud");
    if (!(config.eps > 0.0) || !(config.sigma > 0.0) || config.k_max < 1 || !(config.cutoff_multiplier > 0.0))
        throw ValidationError("graph construction: eps, sigma, k and cutoff must be positive");
}

} // namespace

// ---------------------------------------------------------------------------
// SparseGraph
// ---------------------------------------------------------------------------

SparseGraph::SparseGraph(std::size_t n, int dim, double eps, double sigma, std::vector<Edge> edges)
    : n_(n), dim_(dim), eps_(eps), sigma_(sigma), edges_(std::move(edges)) {
    for (auto& e : edges_) {
        if (e.i == e.j) throw ValidationError("SparseGraph: self loop at vertex " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.j >= n_) throw ValidationError("SparseGraph: edge endpoint out of range");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw ValidationError("SparseGraph: nonpositive weight on edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ")");
        if (!(e.distance >= 0.0)) throw ValidationError("SparseGraph: negative distance");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t e = 1; e < edges_.size(); ++e)
        if (edges_[e].i == edges_[e - 1].i && edges_[e].j == edges_[e - 1].j)
            throw ValidationError("SparseGraph: duplicate edge");

    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[e.i + 1];
        ++offsets_[e.j + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
    adj_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // edges are sorted by (i, j), so every adjacency list ends up sorted by vertex
    for (std::uint32_t e = 0; e < edges_.size(); ++e) adj_[fill[edges_[e].j]++] = {edges_[e].i, e};
    for (std::uint32_t e = 0; e < edges_.size(); ++e) adj_[fill[edges_[e].i]++] = {edges_[e].j, e};
    for (std::size_t v = 0; v < n_; ++v)
        std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                  adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
                  [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
}

double SparseGraph::total_weight() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.weight;
    return s;
}

double kernel_weight(double r, double eps, double sigma, int dim) {
    const double s = sigma * eps;
    return std::pow(eps, -dim) * std::exp(-(r * r) / (2.0 * s * s));
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

SparseGraph build_geometric_graph(const PointCloud& cloud, const SolverConfig& config) {
    check_inputs(cloud, config);
    const std::size_t n = cloud.size();
    const double radius = config.cutoff_radius();
    const double r2 = radius * radius;
    const detail::KdTree tree(cloud);
    const auto k = static_cast<std::size_t>(config.k_max);

    std::vector<std::vector<Candidate>> kept(n);
    detail::parallel_for(n, [&](std::size_t i) {
        if (k + 1 >= n) tree.radius(i, r2, kept[i]);
        else tree.nearest(i, k, r2, kept[i]);
    });
    return assemble(cloud, config, kept);
}

SparseGraph brute_force_graph(const PointCloud& cloud, const SolverConfig& config) {
    check_inputs(cloud, config);
    const std::size_t n = cloud.size();
    if (n > kBruteForceLimit)
        throw ValidationError("brute_force_graph: n = " + std::to_string(n) + " exceeds the limit of " +
                              std::to_string(kBruteForceLimit));
    const double radius = config.cutoff_radius();
    const double r2 = radius * radius;
    const auto k = static_cast<std::size_t>(config.k_max);

    std::vector<std::vector<Candidate>> kept(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto& c = kept[i];
        for (std::uint32_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d2 = detail::squared_distance(cloud.point(i), cloud.point(j));
            if (d2 <= r2) c.emplace_back(d2, j);
        }
        std::sort(c.begin(), c.end());
        if (c.size() > k) c.resize(k);
    }
    return assemble(cloud, config, kept);
}

// ---------------------------------------------------------------------------
// Edge-list I/O
// ---------------------------------------------------------------------------

void write_edge_list(std::ostream& os, const SparseGraph& graph) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu %d %.17g %.17g\n", graph.num_vertices(), graph.dim(), graph.eps(),
                  graph.sigma());
    os << buf;
    for (const auto& e : graph.edges()) {
        std::snprintf(buf, sizeof buf, "%u %u %.17g %.17g\n", e.i, e.j, e.weight, e.distance);
        os << buf;
    }
}

SparseGraph read_edge_list(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("edge list: missing header line");
    std::istringstream header(line);
    std::size_t n = 0;
    int dim = 0;
    double eps = 0.0, sigma = 0.0;
    if (!(header >> n >> dim >> eps >> sigma)) throw ValidationError("edge list: malformed header '" + line + "'");

    std::vector<Edge> edges;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        long long i = -1, j = -1;
        Edge e;
        if (!(row >> i >> j >> e.weight >> e.distance) || i < 0 || j < 0 || i >= j)
            throw ValidationError("edge list: malformed line " + std::to_string(lineno));
        e.i = static_cast<std::uint32_t>(i);
        e.j = static_cast<std::uint32_t>(j);
        edges.push_back(e);
    }
    return SparseGraph(n, dim, eps, sigma, std::move(edges));
}

} // namespace gms
