// Minimal static kd-tree over a PointCloud for radius and bounded k-nearest
// queries. Squared distances are accumulated axis by axis in the same order
// as the brute-force builder so both paths compare identical values.
#pragma once

#include "gms/core.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace gms::detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

/// (squared distance, vertex) ordered lexicographically.
using Candidate = std::pair<double, std::uint32_t>;

class KdTree {
public:
    explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 16)
        : cloud_(cloud), dim_(cloud.dim()), leaf_size_(leaf_size) {
        index_.resize(cloud.size());
        std::iota(index_.begin(), index_.end(), 0u);
        nodes_.reserve(2 * cloud.size() / leaf_size_ + 2);
        build(0, index_.size());
    }

    /// All points other than `self` with squared distance <= r2.
    void radius(std::size_t self, double r2, std::vector<Candidate>& out) const {
        out.clear();
        radius_rec(0, cloud_.point(self), self, r2, out);
    }

    /// The k smallest (d2, index) among points other than `self` with d2 <= r2,
    /// returned sorted.
    void nearest(std::size_t self, std::size_t k, double r2, std::vector<Candidate>& out) const {
        std::priority_queue<Candidate> heap; // max-heap on (d2, index)
        nearest_rec(0, cloud_.point(self), self, k, r2, heap);
        out.clear();
        out.reserve(heap.size());
        while (!heap.empty()) {
            out.push_back(heap.top());
            heap.pop();
        }
        std::reverse(out.begin(), out.end());
    }

private:
    struct Node {
        std::size_t begin, end;
        std::vector<double> lo, hi; // bounding box
        std::int64_t left = -1, right = -1;
    };

    std::int64_t build(std::size_t begin, std::size_t end) {
        const auto id = static_cast<std::int64_t>(nodes_.size());
        nodes_.push_back(Node{begin, end, std::vector<double>(dim_, 0.0), std::vector<double>(dim_, 0.0)});
        {
            Node& node = nodes_.back();
            for (int a = 0; a < dim_; ++a) {
                node.lo[a] = node.hi[a] = cloud_.coord(index_[begin], a);
            }
            for (std::size_t t = begin; t < end; ++t)
                for (int a = 0; a < dim_; ++a) {
                    const double c = cloud_.coord(index_[t], a);
                    node.lo[a] = std::min(node.lo[a], c);
                    node.hi[a] = std::max(node.hi[a], c);
                }
        }
        if (end - begin <= leaf_size_) return id;

        int axis = 0;
        double spread = -1.0;
        for (int a = 0; a < dim_; ++a) {
            const double s = nodes_[id].hi[a] - nodes_[id].lo[a];
            if (s > spread) {
                spread = s;
                axis = a;
            }
        }
        if (spread <= 0.0) return id; // all coincident
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                         index_.begin() + static_cast<std::ptrdiff_t>(mid),
                         index_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::uint32_t x, std::uint32_t y) { return cloud_.coord(x, axis) < cloud_.coord(y, axis); });
        const auto l = build(begin, mid);
        const auto r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    // Lower bound on squared distance from q to the node's box; never exceeds
    // the squared distance to any point inside it (rounding is monotone).
    double box_distance(const Node& node, std::span<const double> q) const {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) {
            double diff = 0.0;
            if (q[a] < node.lo[a]) diff = node.lo[a] - q[a];
            else if (q[a] > node.hi[a]) diff = q[a] - node.hi[a];
            s += diff * diff;
        }
        return s;
    }

    void radius_rec(std::int64_t id, std::span<const double> q, std::size_t self, double r2,
                    std::vector<Candidate>& out) const {
        const Node& node = nodes_[id];
        if (box_distance(node, q) > r2) return;
        if (node.left < 0) {
            for (std::size_t t = node.begin; t < node.end; ++t) {
                const std::uint32_t j = index_[t];
                if (j == self) continue;
                const double d2 = squared_distance(q, cloud_.point(j));
                if (d2 <= r2) out.emplace_back(d2, j);
            }
            return;
        }
        radius_rec(node.left, q, self, r2, out);
        radius_rec(node.right, q, self, r2, out);
    }

    void nearest_rec(std::int64_t id, std::span<const double> q, std::size_t self, std::size_t k, double r2,
                     std::priority_queue<Candidate>& heap) const {
        const Node& node = nodes_[id];
        const double bound = heap.size() == k ? heap.top().first : r2;
        // strict: a box at exactly the bound can still hold a smaller index
        if (box_distance(node, q) > bound) return;
        if (node.left < 0) {
            for (std::size_t t = node.begin; t < node.end; ++t) {
                const std::uint32_t j = index_[t];
                if (j == self) continue;
                const double d2 = squared_distance(q, cloud_.point(j));
                if (d2 > r2) continue;
                const Candidate c{d2, j};
                if (heap.size() < k) {
                    heap.push(c);
                } else if (c < heap.top()) {
                    heap.pop();
                    heap.push(c);
                }
            }
            return;
        }
        const Node& l = nodes_[node.left];
        const Node& r = nodes_[node.right];
        if (box_distance(l, q) <= box_distance(r, q)) {
            nearest_rec(node.left, q, self, k, r2, heap);
            nearest_rec(node.right, q, self, k, r2, heap);
        } else {
            nearest_rec(node.right, q, self, k, r2, heap);
            nearest_rec(node.left, q, self, k, r2, heap);
        }
    }

    const PointCloud& cloud_;
    int dim_;
    std::size_t leaf_size_;
    std::vector<std::uint32_t> index_;
    std::vector<Node> nodes_;
};

} // namespace gms::detail
