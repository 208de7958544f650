// Sparse weighted geometric graph on a point cloud.
//
// Weights follow the truncated Gaussian kernel
//     w_ij = eps^{-d} exp(-r_ij^2 / (2 sigma^2 eps^2)),   r_ij <= cutoff * sigma * eps,
// with an optional per-vertex degree cap: every vertex keeps its k nearest
// candidates (ties by smaller index) and the kept sets are merged by union.
#pragma once

#include "gms/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gms {

struct Edge {
    std::uint32_t i = 0; // i < j
    std::uint32_t j = 0;
    double weight = 0.0;
    double distance = 0.0;
    bool operator==(const Edge&) const = default;
};

/// One entry in a vertex's adjacency list.
struct Neighbor {
    std::uint32_t vertex;
    std::uint32_t edge; // index into SparseGraph::edges()
    bool operator==(const Neighbor&) const = default;
};

/// Symmetric adjacency with zero diagonal. Undirected edges are stored once,
/// sorted by (i, j) with i < j; the per-vertex adjacency references them.
class SparseGraph {
public:
    SparseGraph() = default;
    /// Throws ValidationError on self loops, out-of-range or duplicate pairs,
    /// or nonpositive weights. Edges may arrive unsorted and with i > j.
    SparseGraph(std::size_t n, int dim, double eps, double sigma, std::vector<Edge> edges);

    std::size_t num_vertices() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    int dim() const { return dim_; }
    double eps() const { return eps_; }
    double sigma() const { return sigma_; }

    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const Neighbor> neighbors(std::size_t v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }
    std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

    /// Sum over stored undirected edges of w_ij (each pair counted once).
    double total_weight() const;

    bool operator==(const SparseGraph& other) const = default;

private:
    std::size_t n_ = 0;
    int dim_ = 0;
    double eps_ = 0.0;
    double sigma_ = 0.0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adj_;
};

/// eps^{-d} exp(-r^2 / (2 sigma^2 eps^2))
double kernel_weight(double r, double eps, double sigma, int dim);

/// kd-tree backed construction. Uses config.eps, sigma, k_max, cutoff_multiplier.
SparseGraph build_geometric_graph(const PointCloud& cloud, const SolverConfig& config);

inline constexpr std::size_t kBruteForceLimit = 5000;

/// O(n^2) construction with identical semantics; n <= kBruteForceLimit.
SparseGraph brute_force_graph(const PointCloud& cloud, const SolverConfig& config);

/// Text format: header "n d eps sigma", then one "i j weight distance" line
/// per undirected edge with i < j, in sorted order, 17 significant digits.
void write_edge_list(std::ostream& os, const SparseGraph& graph);
SparseGraph read_edge_list(std::istream& is);

} // namespace gms
