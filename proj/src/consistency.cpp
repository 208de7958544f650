#include "gms/consistency.hpp"

#include "gms/energy.hpp"
#include "gms/graph.hpp"
#include "gms/parallel.hpp"
#include "gms/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gms {

double BinnedMeasure::sup_deviation() const {
    double worst = 0.0;
    for (double v : density) worst = std::max(worst, std::abs(v - 1.0));
    return worst;
}

double BinnedMeasure::total_mass() const {
    const double cell = std::pow(delta, d);
    KahanSum s;
    for (double v : density) s.add(v * cell);
    return s.value();
}

BinnedMeasure bin_measure(const PointCloud& points, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("bin_measure: delta must lie in (0, 1]");
    const double inv = 1.0 / delta;
    const double m_real = std::round(inv);
    if (std::abs(inv - m_real) > 1e-9 * inv) throw ValidationError("bin_measure: 1/delta must be an integer");

    BinnedMeasure out;
    out.d = points.dim();
    out.delta = delta;
    out.boxes_per_axis = static_cast<std::size_t>(m_real);
    out.n = points.size();
    const std::size_t m = out.boxes_per_axis;
    std::size_t total_boxes = 1;
    for (int a = 0; a < out.d; ++a) {
        if (total_boxes > (std::size_t{1} << 28) / m) throw ValidationError("bin_measure: grid too fine");
        total_boxes *= m;
    }

    for (double c : points.coords())
        if (c < 0.0 || c > 1.0) throw ValidationError("bin_measure: points must lie in the unit cube");

    // Per-chunk histograms merged in chunk order; integer counts make the
    // merge exact for any thread count.
    const std::size_t chunks = std::clamp<std::size_t>(static_cast<std::size_t>(num_threads()), 1, 64);
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(total_boxes, 0));
    const std::size_t n = out.n;
    const int d = out.d;
    detail::parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        auto& hist = partial[c];
        for (std::size_t i = lo; i < hi; ++i) {
            std::size_t index = 0, stride = 1;
            for (int a = 0; a < d; ++a) {
                auto b = static_cast<std::size_t>(points.coord(i, a) * static_cast<double>(m));
                if (b >= m) b = m - 1;
                index += b * stride;
                stride *= m;
            }
            ++hist[index];
        }
    });

    out.counts.assign(total_boxes, 0);
    for (const auto& hist : partial)
        for (std::size_t b = 0; b < total_boxes; ++b) out.counts[b] += hist[b];

    const double cell = std::pow(delta, d);
    out.density.resize(total_boxes);
    for (std::size_t b = 0; b < total_boxes; ++b)
        out.density[b] = static_cast<double>(out.counts[b]) / (static_cast<double>(n) * cell);
    return out;
}

double binning_delta(std::size_t n, int d, double b_exponent) {
    if (n < 3) throw ValidationError("binning_delta: n must be >= 3");
    if (d < 1) throw ValidationError("binning_delta: d must be >= 1");
    const double ln = std::log(static_cast<double>(n));
    const double b = std::pow(ln, b_exponent);
    const double m = std::floor(std::pow(static_cast<double>(n) / (b * ln), 1.0 / d));
    return 1.0 / std::max(1.0, m);
}

std::vector<DeviationRow> density_deviation_curve(const std::vector<std::size_t>& n_list, std::uint64_t seed,
                                                  const DeviationOptions& options) {
    const int d = options.d;
    std::vector<DeviationRow> rows;
    for (const std::size_t n : n_list) {
        const double delta = binning_delta(n, d, options.b_exponent);
        std::vector<double> coords(n * static_cast<std::size_t>(d));
        detail::parallel_for(coords.size(), [&](std::size_t k) { coords[k] = counter_uniform(seed, n, k); });
        const BinnedMeasure binned = bin_measure(PointCloud(d, std::move(coords)), delta);

        DeviationRow row;
        row.n = n;
        row.delta = delta;
        row.boxes_per_axis = binned.boxes_per_axis;
        row.sup_deviation = binned.sup_deviation();
        row.ell = std::sqrt(static_cast<double>(d)) * delta;
        row.eps = options.eps_rule(n);
        row.ell_over_eps = row.ell / row.eps;
        row.seed = seed;
        rows.push_back(row);
    }
    return rows;
}

void write_deviation_csv(std::ostream& os, const std::vector<DeviationRow>& rows, bool header) {
    if (header) os << "n,delta,m,sup_dev,ell,eps,ell_over_eps,seed\n";
    const auto old = os.precision(17);
    for (const auto& r : rows)
        os << r.n << ',' << r.delta << ',' << r.boxes_per_axis << ',' << r.sup_deviation << ',' << r.ell << ','
           << r.eps << ',' << r.ell_over_eps << ',' << r.seed << '\n';
    os.precision(old);
}

// ---------------------------------------------------------------------------
// Dyadic spikes
// ---------------------------------------------------------------------------

namespace {

void check_dyadic(int k, int d) {
    if (k < 1) throw ValidationError("dyadic: k must be >= 1");
    if (d < 1) throw ValidationError("dyadic: d must be >= 1");
    if (static_cast<long>(k) * d > kMaxDyadicExponent)
        throw ValidationError("dyadic: k*d exceeds the memory guard of " + std::to_string(kMaxDyadicExponent));
}

double grid_coordinate(long index, int k) {
    return -0.5 + (static_cast<double>(index) + 0.5) * std::ldexp(1.0, -k);
}

double spike_height(int k, int d) { return 1.0 / (omega_ball_volume(d) * std::pow(std::ldexp(1.0, -k), 0.5 * d)); }

} // namespace

PointCloud dyadic_grid(int k, int d) {
    check_dyadic(k, d);
    const std::size_t side = std::size_t{1} << k;
    const std::size_t n = std::size_t{1} << (k * d);
    std::vector<double> coords(n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        for (int a = 0; a < d; ++a) {
            coords[i * d + a] = grid_coordinate(static_cast<long>(rest % side), k);
            rest /= side;
        }
    }
    return PointCloud(d, std::move(coords));
}

std::vector<double> dyadic_spike(int k, int d) {
    const PointCloud grid = dyadic_grid(k, d);
    const double r2 = std::ldexp(1.0, -k); // r_k^2
    const double height = spike_height(k, d);
    std::vector<double> u(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = 0.0;
        for (double c : grid.point(i)) s += c * c;
        if (s < r2) u[i] = height;
    }
    return u;
}

CounterexampleResult dyadic_counterexample(int k, double alpha, int d, const CounterexampleOptions& options) {
    check_dyadic(k, d);
    if (d < 3) throw ValidationError("dyadic_counterexample: d must be >= 3");
    if (!(alpha > 0.5 && alpha < 1.0)) throw ValidationError("dyadic_counterexample: alpha must lie in (1/2, 1)");
    if (!(options.p >= 1.0) || !(options.q >= 0.0 && options.q < options.p))
        throw ValidationError("dyadic_counterexample: need p >= 1 and 0 <= q < p");
    if (!(options.kernel_sigma > 0.0) || !(options.cutoff > 0.0))
        throw ValidationError("dyadic_counterexample: kernel sigma and cutoff must be positive");

    CounterexampleResult res;
    res.k = k;
    res.d = d;
    res.alpha = alpha;
    res.n = std::size_t{1} << (k * d);
    res.eps = std::pow(2.0, -k * alpha);
    res.radius = std::pow(2.0, -0.5 * k);

    const std::vector<double> u = dyadic_spike(k, d);
    const double height = spike_height(k, d);
    const long side = 1L << k;
    const double h = std::ldexp(1.0, -k);

    std::vector<long> inside;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != 0.0) inside.push_back(static_cast<long>(i));
    res.ball_count = inside.size();
    res.max_u = inside.empty() ? 0.0 : height;
    res.l1 = static_cast<double>(inside.size()) * height / static_cast<double>(res.n);

    // Offsets within the kernel support.
    const double support = options.cutoff * options.kernel_sigma * res.eps;
    const double support2 = support * support;
    const long reach = static_cast<long>(std::floor(support / h)) + 1;
    std::vector<long> offset(static_cast<std::size_t>(d), -reach);

    ZetaSpec zeta = ZetaSpec::truncated();
    const double diff_term = std::pow(res.eps, 1.0 - options.p + options.q) * std::pow(height, options.p);
    KahanSum total;
    std::vector<long> cell(static_cast<std::size_t>(d));
    std::vector<long> other(static_cast<std::size_t>(d));
    for (const long i : inside) {
        long rest = i;
        for (int a = 0; a < d; ++a) {
            cell[a] = rest % side;
            rest /= side;
        }
        std::fill(offset.begin(), offset.end(), -reach);
        for (;;) {
            bool in_grid = true;
            long j = 0, stride = 1;
            for (int a = 0; a < d; ++a) {
                other[a] = cell[a] + offset[a];
                if (other[a] < 0 || other[a] >= side) in_grid = false;
                j += other[a] * stride;
                stride *= side;
            }
            if (in_grid && u[static_cast<std::size_t>(j)] == 0.0) {
                double r2 = 0.0;
                for (int a = 0; a < d; ++a) {
                    const double diff = grid_coordinate(cell[a], k) - grid_coordinate(other[a], k);
                    r2 += diff * diff;
                }
                if (r2 <= support2) {
                    const double r = std::sqrt(r2);
                    const double arg = options.q == 0.0 ? diff_term : diff_term / std::pow(r, options.q);
                    total.add(zeta_value(zeta, arg) * kernel_weight(r, res.eps, options.kernel_sigma, d));
                }
            }
            int a = 0;
            while (a < d && ++offset[a] > reach) offset[a++] = -reach;
            if (a == d) break;
        }
    }
    const double nn = static_cast<double>(res.n);
    // each unordered ball-to-complement pair appears twice among ordered pairs
    res.energy = 2.0 * total.value() / (res.eps * nn * nn);
    return res;
}

void write_counterexample_json(std::ostream& os, const CounterexampleResult& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["d"] = r.d;
    j["l1"] = r.l1;
    j["energy"] = r.energy;
    j["alpha"] = r.alpha;
    j["n"] = r.n;
    j["eps"] = r.eps;
    j["radius"] = r.radius;
    j["ball_count"] = r.ball_count;
    j["max_u"] = r.max_u;
    os << j.dump() << '\n';
}

} // namespace gms
