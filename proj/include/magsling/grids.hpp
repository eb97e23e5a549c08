// Regular-raster total-magnetic-intensity grids and the comparison pipeline
// between two co-registered surveys of the same area: resampling,
// descriptive statistics, ratio and subtraction maps with zero-offset
// normalization, signal-ratio summary, and along-line profile extraction
// against elevation.
//
// Georeferencing convention: `origin` is the CENTER of the northwest cell;
// rows run north to south, columns west to east. A grid's interpolable
// extent is the hull of its cell centers. Elevation rasters reuse MagGrid
// with meters as the value unit.
#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace magsling::grids {

inline constexpr double kDefaultNodata = -99999.0;
/// |denominator| below this is treated as no-data in ratio maps. TMI
/// magnitudes are ~1e4 nT, so a true zero indicates a missing cell.
inline constexpr double kRatioEpsilonNt = 1e-6;

enum class ResampleMethod { Bilinear, Nearest };

struct Point {
    double easting_m = 0.0;
    double northing_m = 0.0;
};

class MagGrid {
  public:
    MagGrid(std::size_t n_cols, std::size_t n_rows, double origin_easting_m,
            double origin_northing_m, double cell_size_m,
            double nodata = kDefaultNodata, std::string units = "nT",
            std::string crs_label = "");

    std::size_t n_cols() const { return n_cols_; }
    std::size_t n_rows() const { return n_rows_; }
    double origin_easting_m() const { return origin_easting_; }
    double origin_northing_m() const { return origin_northing_; }
    double cell_size_m() const { return cell_size_; }
    double nodata() const { return nodata_; }
    const std::string& units() const { return units_; }
    const std::string& crs_label() const { return crs_label_; }

    double at(std::size_t row, std::size_t col) const;
    void set(std::size_t row, std::size_t col, double v);
    void set_nodata_cell(std::size_t row, std::size_t col);
    bool is_valid(std::size_t row, std::size_t col) const;
    std::size_t valid_cell_count() const;

    std::span<const double> values() const { return values_; }

    double center_easting_m(std::size_t col) const;
    double center_northing_m(std::size_t row) const;

    /// Same shape, cell size and origins (exact comparison on counts,
    /// 1e-9 m tolerance on georeferencing).
    bool same_registration(const MagGrid& other) const;

    bool contains(const Point& p) const; ///< inside the cell-center hull

    /// Interpolated value at a point, or nullopt when the point is outside
    /// the cell-center hull or any contributing cell is no-data.
    std::optional<double> sample(const Point& p, ResampleMethod method) const;

  private:
    std::size_t n_cols_, n_rows_;
    double origin_easting_, origin_northing_, cell_size_, nodata_;
    std::string units_, crs_label_;
    std::vector<double> values_; // row-major, row 0 northernmost
};

/// Text format (bit-exact contract): seven '#'-prefixed header lines
///   # ncols N / # nrows N / # origin_easting_m X / # origin_northing_m Y /
///   # cell_size_m S / # nodata V / # units U
/// followed by n_rows lines of n_cols space-separated decimal values in
/// north-to-south order. write_grid emits shortest round-trip decimals, so
/// parse(write(g)) reproduces g exactly.
MagGrid parse_grid(std::istream& in);
void write_grid(const MagGrid& g, std::ostream& out);

/// Resample to a new cell size over the same extent. Bilinear values are
/// convex combinations of the contributing source cells; any contributing
/// no-data cell makes the output cell no-data. Nearest at the native cell
/// size is the identity.
MagGrid resample(const MagGrid& src, double target_cell_size_m, ResampleMethod method);

struct GridStats {
    double mean_nT = 0.0;
    double median_nT = 0.0;
    double mode_nT = 0.0;   ///< center of the densest histogram bin
    double stddev_nT = 0.0; ///< sample standard deviation (n-1)
    double min_nT = 0.0;
    double max_nT = 0.0;
    std::size_t valid_cell_count = 0;
};

/// Summary statistics over valid cells. Mode uses bins of width mode_bin_nT
/// centered on the minimum valid value; ties resolve to the lowest center.
GridStats descriptive_stats(const MagGrid& g, double mode_bin_nT = 1.0);

struct RatioResult {
    MagGrid grid;
    std::size_t masked_zero_cells = 0; ///< cells dropped for |b| <= epsilon
};

/// Cellwise a/b where both are valid and |b| > kRatioEpsilonNt; no-data
/// elsewhere. Grids must be co-registered.
RatioResult ratio_compare(const MagGrid& a, const MagGrid& b);

enum class OffsetPolicy {
    ShiftNonNegative, ///< add max(0, -min(diff)) so the output minimum is >= 0
    None,             ///< raw difference
};

struct SubtractResult {
    MagGrid grid;
    double offset_nT = 0.0;
};

/// Cellwise a-b plus the zero-offset required by the policy.
SubtractResult subtract_compare(const MagGrid& a, const MagGrid& b,
                                OffsetPolicy policy = OffsetPolicy::ShiftNonNegative);

struct SignalRatio {
    double ratio_mean = 0.0; ///< mean of cellwise a/b over jointly valid cells
    double pearson_r = 0.0;  ///< Pearson correlation of a vs b, reported alongside
    std::size_t cells = 0;
};

/// Scalar similarity of two co-registered grids. Requires >= 2 jointly valid
/// cells with |b| above the ratio epsilon.
SignalRatio signal_ratio(const MagGrid& a, const MagGrid& b);

struct ProfileSample {
    double chainage_m = 0.0;
    double tmi_a_nT = 0.0;    ///< NaN when not sampleable
    double tmi_b_nT = 0.0;    ///< NaN when not sampleable
    double elevation_m = 0.0; ///< NaN when not sampleable
    double difference_nT = 0.0; ///< tmi_a - tmi_b where both valid, else NaN
};

/// Sample two TMI grids and an elevation grid along a polyline at chainage
/// multiples of step_m (bilinear by default). Every vertex must lie inside
/// all three grids' extents; the first offending vertex is named in the
/// OutOfExtentError.
std::vector<ProfileSample> extract_profile(const MagGrid& a, const MagGrid& b,
                                           const MagGrid& elevation,
                                           std::span<const Point> polyline, double step_m,
                                           ResampleMethod method = ResampleMethod::Bilinear);

/// Pearson correlation between the difference and elevation columns.
/// Requires >= 3 samples with both values present and nonzero variance.
double difference_elevation_correlation(std::span<const ProfileSample> samples);

void write_profile_csv(std::span<const ProfileSample> samples, std::ostream& out);
void write_stats_csv(const GridStats& s, std::ostream& out);

} // namespace magsling::grids
