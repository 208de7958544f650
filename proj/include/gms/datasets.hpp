// Synthetic piecewise-linear benchmark and housing-record ingestion.
#pragma once

#include "gms/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gms {

/// Reference ground truth on [0,1]^2: three planar pieces separated by two
/// straight segments.
///
///   jump A:  y = 0.33 - 0.09 x               (0 <= x <= 1)
///   jump B:  x = 0.45 + 0.08 y               (above jump A)
///
///   piece 0 (below A):           0.1 + 0.10 (x - 0.50) - 0.45 (y - 0.15)
///   piece 1 (above A, left of B): 0.9 + 0.75 (x - 0.25) - 0.50 (y - 0.65)
///   piece 2 (above A, right of B): 0.5 - 0.10 (x - 0.75) - 0.95 (y - 0.65)
///
/// The jump height is nonzero along both segments.
struct SyntheticTruth {
    static int piece(double x, double y);
    /// Affine formula of piece k evaluated anywhere in the plane.
    static double plane(int k, double x, double y);
    static double value(double x, double y) { return plane(piece(x, y), x, y); }
    /// Euclidean distance to the jump set (union of both segments).
    static double jump_distance(double x, double y);
    /// +1 when the point's own piece lies above the piece across the nearest
    /// jump segment, -1 when below.
    static int jump_side(double x, double y);
};

struct SyntheticData {
    PointCloud cloud;          // labels f_i = u*(x_i) + noise_i
    std::vector<double> truth; // u*(x_i)
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

/// n uniform points on [0,1]^2 with Gaussian noise of standard deviation
/// noise_std. Point i depends only on (seed, i).
SyntheticData generate_synthetic(std::size_t n, double noise_std, std::uint64_t seed);

/// (1/n) sum |u_i - truth_i|. Throws ValidationError on length mismatch.
double l1_error(std::span<const double> u, std::span<const double> truth);

struct HousingRecord {
    double longitude = 0.0;
    double latitude = 0.0;
    double price = 0.0;
    double sqft = 0.0;
    double price_per_sqft() const { return price / sqft; }
};

struct HousingOptions {
    double max_longitude = -121.68;
    bool normalize = true;
    /// Equirectangular rescale: x = (lon - min lon) cos(mean lat), y = lat - min lat.
    bool rescale = false;
};

struct HousingData {
    PointCloud cloud; // positions and labels (price per sqft, normalized if requested)
    std::vector<HousingRecord> records;
    double max_price_per_sqft = 0.0;
    std::size_t rows_read = 0;
    std::size_t dropped_longitude = 0;
    std::size_t dropped_sqft = 0;
};

/// Header row names the columns; accepted spellings are long/longitude/lon,
/// lat/latitude, price and sqft_living/sqft. Rows with an empty or zero
/// square footage are dropped, as are rows east of max_longitude. Malformed
/// rows raise ValidationError naming the line; an empty result is an error.
HousingData ingest_housing(std::istream& csv, const HousingOptions& options = {});
HousingData ingest_housing(const std::string& path, const HousingOptions& options = {});

// ---------------------------------------------------------------------------
// Plain CSV interchange
// ---------------------------------------------------------------------------

/// Header "x0,...,x{d-1},f"; the cloud must carry labels.
void write_point_csv(std::ostream& os, const PointCloud& cloud);
/// Reads the format above; the last column is the label column.
PointCloud read_point_csv(std::istream& is);

/// Single named column, one value per line, 17 significant digits.
void write_column_csv(std::ostream& os, const std::string& name, std::span<const double> values);
std::vector<double> read_column_csv(std::istream& is);

/// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace gms
