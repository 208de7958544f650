#include "gms/datasets.hpp"

#include "gms/energy.hpp"
#include "gms/parallel.hpp"
#include "gms/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace gms {

namespace {

struct Segment {
    double ax, ay, bx, by;
};

// Jump A runs across the square; jump B starts where it meets A.
constexpr double kAy0 = 0.33, kAslope = -0.09;
constexpr double kBx0 = 0.45, kBslope = 0.08;

double jump_a(double x) { return kAy0 + kAslope * x; }
double jump_b(double y) { return kBx0 + kBslope * y; }

Segment segment_a() { return {0.0, jump_a(0.0), 1.0, jump_a(1.0)}; }

Segment segment_b() {
    // x = kBx0 + kBslope (kAy0 + kAslope x)
    const double x = (kBx0 + kBslope * kAy0) / (1.0 - kBslope * kAslope);
    const double y = jump_a(x);
    return {x, y, jump_b(1.0), 1.0};
}

// Closest point on segment s to (x, y).
void project(const Segment& s, double x, double y, double& px, double& py) {
    const double dx = s.bx - s.ax, dy = s.by - s.ay;
    double t = ((x - s.ax) * dx + (y - s.ay) * dy) / (dx * dx + dy * dy);
    t = std::clamp(t, 0.0, 1.0);
    px = s.ax + t * dx;
    py = s.ay + t * dy;
}

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::optional<double> parse_number(const std::string& field) {
    const std::string s = strip(field);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
    throw ValidationError("line " + std::to_string(line) + ": " + why);
}

int find_column(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string h = strip(header[c]);
        std::transform(h.begin(), h.end(), h.begin(), [](unsigned char ch) { return std::tolower(ch); });
        for (const char* name : names)
            if (h == name) return static_cast<int>(c);
    }
    return -1;
}

} // namespace

// ---------------------------------------------------------------------------
// Synthetic truth
// ---------------------------------------------------------------------------

int SyntheticTruth::piece(double x, double y) {
    if (y < jump_a(x)) return 0;
    return x < jump_b(y) ? 1 : 2;
}

double SyntheticTruth::plane(int k, double x, double y) {
    switch (k) {
    case 0: return 0.1 + 0.10 * (x - 0.50) - 0.45 * (y - 0.15);
    case 1: return 0.9 + 0.75 * (x - 0.25) - 0.50 * (y - 0.65);
    case 2: return 0.5 - 0.10 * (x - 0.75) - 0.95 * (y - 0.65);
    default: throw ValidationError("SyntheticTruth: piece index out of range");
    }
}

double SyntheticTruth::jump_distance(double x, double y) {
    double px, py, qx, qy;
    project(segment_a(), x, y, px, py);
    project(segment_b(), x, y, qx, qy);
    return std::min(std::hypot(x - px, y - py), std::hypot(x - qx, y - qy));
}

int SyntheticTruth::jump_side(double x, double y) {
    double px, py, qx, qy;
    project(segment_a(), x, y, px, py);
    project(segment_b(), x, y, qx, qy);
    const bool use_a = std::hypot(x - px, y - py) <= std::hypot(x - qx, y - qy);
    const Segment s = use_a ? segment_a() : segment_b();
    const double cx = use_a ? px : qx, cy = use_a ? py : qy;

    // mirror the point across the segment line to find the neighboring piece
    const double dx = s.bx - s.ax, dy = s.by - s.ay;
    const double len = std::hypot(dx, dy);
    const double nx = -dy / len, ny = dx / len;
    const double side = (x - s.ax) * nx + (y - s.ay) * ny;
    const double mag = std::max(std::abs(side), 1e-9);
    const double sign = side >= 0.0 ? -1.0 : 1.0;
    const double mx = std::clamp(cx + sign * mag * nx, 0.0, 1.0);
    const double my = std::clamp(cy + sign * mag * ny, 0.0, 1.0);

    const int own = piece(x, y);
    int other = piece(mx, my);
    if (other == own) {
        // on the segment itself: take the piece just across the line
        other = piece(std::clamp(cx + sign * 1e-6 * nx, 0.0, 1.0), std::clamp(cy + sign * 1e-6 * ny, 0.0, 1.0));
    }
    return plane(own, x, y) >= plane(other, x, y) ? 1 : -1;
}

SyntheticData generate_synthetic(std::size_t n, double noise_std, std::uint64_t seed) {
    if (n == 0) throw ValidationError("generate_synthetic: n must be >= 1");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw ValidationError("generate_synthetic: noise must be finite and >= 0");

    std::vector<double> coords(2 * n), labels(n), truth(n);
    detail::parallel_for(n, [&](std::size_t i) {
        const double x = counter_uniform(seed, 0, 2 * i);
        const double y = counter_uniform(seed, 0, 2 * i + 1);
        coords[2 * i] = x;
        coords[2 * i + 1] = y;
        truth[i] = SyntheticTruth::value(x, y);
        labels[i] = noise_std == 0.0 ? truth[i] : truth[i] + noise_std * counter_normal(seed, 1, i);
    });
    SyntheticData out{PointCloud(2, std::move(coords), std::move(labels)), std::move(truth), noise_std, seed};
    return out;
}

double l1_error(std::span<const double> u, std::span<const double> truth) {
    if (u.size() != truth.size()) throw ValidationError("l1_error: length mismatch");
    if (u.empty()) throw ValidationError("l1_error: empty input");
    KahanSum s;
    for (std::size_t i = 0; i < u.size(); ++i) s.add(std::abs(u[i] - truth[i]));
    return s.value() / static_cast<double>(u.size());
}

// ---------------------------------------------------------------------------
// CSV helpers
// ---------------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

HousingData ingest_housing(std::istream& csv, const HousingOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(csv, line)) {
        ++line_no;
        if (!strip(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw ValidationError("housing CSV is empty");
    if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
        header[0] = header[0].substr(3);

    const int c_lon = find_column(header, {"long", "longitude", "lon"});
    const int c_lat = find_column(header, {"lat", "latitude"});
    const int c_price = find_column(header, {"price"});
    const int c_sqft = find_column(header, {"sqft_living", "sqft"});
    if (c_lon < 0 || c_lat < 0 || c_price < 0 || c_sqft < 0)
        throw ValidationError("housing CSV header must name longitude, latitude, price and sqft_living columns");

    HousingData out;
    while (std::getline(csv, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            malformed(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(fields.size()));
        ++out.rows_read;

        const auto sqft = parse_number(fields[c_sqft]);
        if (!sqft && !strip(fields[c_sqft]).empty()) malformed(line_no, "square footage is not a number");
        if (!sqft || *sqft == 0.0) {
            ++out.dropped_sqft;
            continue;
        }
        if (*sqft < 0.0) malformed(line_no, "negative square footage");

        const auto lon = parse_number(fields[c_lon]);
        const auto lat = parse_number(fields[c_lat]);
        const auto price = parse_number(fields[c_price]);
        if (!lon) malformed(line_no, "longitude is missing or not a number");
        if (!lat) malformed(line_no, "latitude is missing or not a number");
        if (!price) malformed(line_no, "price is missing or not a number");

        if (*lon > options.max_longitude) {
            ++out.dropped_longitude;
            continue;
        }
        out.records.push_back({*lon, *lat, *price, *sqft});
    }
    if (out.records.empty()) throw ValidationError("housing CSV: no usable records after filtering");

    const std::size_t n = out.records.size();
    double max_pps = 0.0, min_lon = out.records[0].longitude, min_lat = out.records[0].latitude, mean_lat = 0.0;
    for (const auto& r : out.records) {
        max_pps = std::max(max_pps, r.price_per_sqft());
        min_lon = std::min(min_lon, r.longitude);
        min_lat = std::min(min_lat, r.latitude);
        mean_lat += r.latitude / static_cast<double>(n);
    }
    out.max_price_per_sqft = max_pps;

    std::vector<double> coords(2 * n), labels(n);
    const double aspect = std::cos(mean_lat * std::numbers::pi / 180.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = out.records[i];
        if (options.rescale) {
            coords[2 * i] = (r.longitude - min_lon) * aspect;
            coords[2 * i + 1] = r.latitude - min_lat;
        } else {
            coords[2 * i] = r.longitude;
            coords[2 * i + 1] = r.latitude;
        }
        labels[i] = options.normalize && max_pps > 0.0 ? r.price_per_sqft() / max_pps : r.price_per_sqft();
    }
    out.cloud = PointCloud(2, std::move(coords), std::move(labels));
    return out;
}

HousingData ingest_housing(const std::string& path, const HousingOptions& options) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open housing CSV '" + path + "'");
    return ingest_housing(in, options);
}

void write_point_csv(std::ostream& os, const PointCloud& cloud) {
    const auto& f = cloud.labels();
    for (int a = 0; a < cloud.dim(); ++a) os << 'x' << a << ',';
    os << "f\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (double c : cloud.point(i)) os << c << ',';
        os << f[i] << '\n';
    }
    os.precision(old);
}

PointCloud read_point_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ValidationError("point CSV is empty");
    ++line_no;
    const auto header = split_csv_line(line);
    if (header.size() < 2 || strip(header.back()) != "f")
        throw ValidationError("point CSV header must be x0,...,x{d-1},f");
    const int d = static_cast<int>(header.size()) - 1;
    std::vector<double> coords, labels;
    while (std::getline(is, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != d + 1)
            malformed(line_no, "expected " + std::to_string(d + 1) + " fields");
        for (int a = 0; a <= d; ++a) {
            const auto v = parse_number(fields[a]);
            if (!v) malformed(line_no, "field " + std::to_string(a + 1) + " is not a number");
            (a < d ? coords : labels).push_back(*v);
        }
    }
    if (labels.empty()) throw ValidationError("point CSV has no data rows");
    return PointCloud(d, std::move(coords), std::move(labels));
}

void write_column_csv(std::ostream& os, const std::string& name, std::span<const double> values) {
    os << name << '\n';
    const auto old = os.precision(17);
    for (double v : values) os << v << '\n';
    os.precision(old);
}

std::vector<double> read_column_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ValidationError("column CSV is empty");
    ++line_no;
    std::vector<double> out;
    while (std::getline(is, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const auto v = parse_number(fields.back());
        if (!v) malformed(line_no, "value is not a number");
        out.push_back(*v);
    }
    return out;
}

} // namespace gms
