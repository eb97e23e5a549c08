#include "magsling/grids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "magsling/errors.hpp"
#include "magsling/io_util.hpp"

namespace magsling::grids {

namespace {

constexpr double kGeorefTolM = 1e-9;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError("grids: " + msg);
}

} // namespace

MagGrid::MagGrid(std::size_t n_cols, std::size_t n_rows, double origin_easting_m,
                 double origin_northing_m, double cell_size_m, double nodata,
                 std::string units, std::string crs_label)
    : n_cols_(n_cols),
      n_rows_(n_rows),
      origin_easting_(origin_easting_m),
      origin_northing_(origin_northing_m),
      cell_size_(cell_size_m),
      nodata_(nodata),
      units_(std::move(units)),
      crs_label_(std::move(crs_label)),
      values_(n_cols * n_rows, nodata) {
    require(n_cols_ > 0 && n_rows_ > 0, "grid dimensions must be positive");
    require(cell_size_ > 0.0, "cell_size_m must be > 0");
    require(std::isfinite(nodata_), "nodata sentinel must be finite");
}

double MagGrid::at(std::size_t row, std::size_t col) const {
    require(row < n_rows_ && col < n_cols_, "cell index out of range");
    return values_[row * n_cols_ + col];
}

void MagGrid::set(std::size_t row, std::size_t col, double v) {
    require(row < n_rows_ && col < n_cols_, "cell index out of range");
    require(std::isfinite(v), "cell values must be finite (use set_nodata_cell)");
    values_[row * n_cols_ + col] = v;
}

void MagGrid::set_nodata_cell(std::size_t row, std::size_t col) {
    require(row < n_rows_ && col < n_cols_, "cell index out of range");
    values_[row * n_cols_ + col] = nodata_;
}

bool MagGrid::is_valid(std::size_t row, std::size_t col) const {
    return at(row, col) != nodata_;
}

std::size_t MagGrid::valid_cell_count() const {
    std::size_t n = 0;
    for (double v : values_) n += (v != nodata_);
    return n;
}

double MagGrid::center_easting_m(std::size_t col) const {
    return origin_easting_ + static_cast<double>(col) * cell_size_;
}

double MagGrid::center_northing_m(std::size_t row) const {
    return origin_northing_ - static_cast<double>(row) * cell_size_;
}

bool MagGrid::same_registration(const MagGrid& other) const {
    return n_cols_ == other.n_cols_ && n_rows_ == other.n_rows_ &&
           std::abs(cell_size_ - other.cell_size_) <= kGeorefTolM &&
           std::abs(origin_easting_ - other.origin_easting_) <= kGeorefTolM &&
           std::abs(origin_northing_ - other.origin_northing_) <= kGeorefTolM;
}

bool MagGrid::contains(const Point& p) const {
    const double fx = (p.easting_m - origin_easting_) / cell_size_;
    const double fy = (origin_northing_ - p.northing_m) / cell_size_;
    return fx >= 0.0 && fx <= static_cast<double>(n_cols_ - 1) && fy >= 0.0 &&
           fy <= static_cast<double>(n_rows_ - 1);
}

std::optional<double> MagGrid::sample(const Point& p, ResampleMethod method) const {
    if (!contains(p)) return std::nullopt;
    const double fx = (p.easting_m - origin_easting_) / cell_size_;
    const double fy = (origin_northing_ - p.northing_m) / cell_size_;

    if (method == ResampleMethod::Nearest) {
        const auto col = static_cast<std::size_t>(std::llround(fx));
        const auto row = static_cast<std::size_t>(std::llround(fy));
        if (!is_valid(row, col)) return std::nullopt;
        return at(row, col);
    }

    auto anchor = [](double f, std::size_t n) {
        auto i = static_cast<std::size_t>(f);
        if (i >= n - 1) i = n - 2; // f == n-1 uses the last interval with weight 1
        return i;
    };
    const std::size_t col0 = n_cols_ == 1 ? 0 : anchor(fx, n_cols_);
    const std::size_t row0 = n_rows_ == 1 ? 0 : anchor(fy, n_rows_);
    const double wx = n_cols_ == 1 ? 0.0 : fx - static_cast<double>(col0);
    const double wy = n_rows_ == 1 ? 0.0 : fy - static_cast<double>(row0);

    double value = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const double w = (dx == 0 ? 1.0 - wx : wx) * (dy == 0 ? 1.0 - wy : wy);
            if (w == 0.0) continue; // on-lattice samples ignore the far cells
            const std::size_t row = row0 + static_cast<std::size_t>(dy);
            const std::size_t col = col0 + static_cast<std::size_t>(dx);
            if (row >= n_rows_ || col >= n_cols_ || !is_valid(row, col)) return std::nullopt;
            value += w * at(row, col);
        }
    }
    return value;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

MagGrid parse_grid(std::istream& in) {
    std::map<std::string, std::string, std::less<>> header;
    std::string line;
    std::size_t line_no = 0;

    // header block: '#'-prefixed "key value" lines
    while (in.peek() == '#') {
        std::getline(in, line);
        ++line_no;
        const auto fields = io::split_fields(io::trim(std::string_view(line).substr(1)), ' ');
        if (fields.size() < 1) {
            throw ParseError("grid line " + std::to_string(line_no) + ": empty header line");
        }
        std::string value;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (i > 1) value += ' ';
            value += std::string(fields[i]);
        }
        header[std::string(fields[0])] = value;
    }

    auto want = [&](const char* key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end()) {
            throw ParseError(std::string("grid header: missing '# ") + key + "' line");
        }
        return it->second;
    };
    auto num = [&](const char* key) { return io::parse_double(want(key), std::string("grid header ") + key); };

    const double ncols_d = num("ncols");
    const double nrows_d = num("nrows");
    if (ncols_d < 1 || nrows_d < 1 || ncols_d != std::floor(ncols_d) ||
        nrows_d != std::floor(nrows_d)) {
        throw ParseError("grid header: ncols/nrows must be positive integers");
    }
    const auto n_cols = static_cast<std::size_t>(ncols_d);
    const auto n_rows = static_cast<std::size_t>(nrows_d);

    MagGrid g(n_cols, n_rows, num("origin_easting_m"), num("origin_northing_m"),
              num("cell_size_m"), num("nodata"),
              header.count("units") ? header["units"] : "nT");

    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = io::trim(line);
        if (trimmed.empty()) continue;
        if (row >= n_rows) {
            throw ParseError("grid line " + std::to_string(line_no) + ": header declares " +
                             std::to_string(n_rows) + " rows but more data follows");
        }
        const auto fields = io::split_fields(trimmed, ' ');
        if (fields.size() != n_cols) {
            throw ParseError("grid line " + std::to_string(line_no) + ": expected " +
                             std::to_string(n_cols) + " values, found " +
                             std::to_string(fields.size()));
        }
        for (std::size_t col = 0; col < n_cols; ++col) {
            const double v = io::parse_double(fields[col],
                                              "grid line " + std::to_string(line_no));
            if (v == g.nodata()) {
                g.set_nodata_cell(row, col);
            } else {
                g.set(row, col, v);
            }
        }
        ++row;
    }
    if (row != n_rows) {
        throw ParseError("grid: header declares " + std::to_string(n_rows) +
                         " rows but only " + std::to_string(row) + " data rows present");
    }
    return g;
}

void write_grid(const MagGrid& g, std::ostream& out) {
    out << "# ncols " << g.n_cols() << '\n';
    out << "# nrows " << g.n_rows() << '\n';
    out << "# origin_easting_m " << io::format_double(g.origin_easting_m()) << '\n';
    out << "# origin_northing_m " << io::format_double(g.origin_northing_m()) << '\n';
    out << "# cell_size_m " << io::format_double(g.cell_size_m()) << '\n';
    out << "# nodata " << io::format_double(g.nodata()) << '\n';
    out << "# units " << (g.units().empty() ? "nT" : g.units()) << '\n';
    for (std::size_t row = 0; row < g.n_rows(); ++row) {
        for (std::size_t col = 0; col < g.n_cols(); ++col) {
            if (col) out << ' ';
            out << io::format_double(g.at(row, col));
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

MagGrid resample(const MagGrid& src, double target_cell_size_m, ResampleMethod method) {
    require(target_cell_size_m > 0.0, "resample: target cell size must be > 0");

    if (target_cell_size_m == src.cell_size_m()) {
        return src; // identity at the native resolution
    }

    // Preserve the source extent (cell-edge bounding box).
    const double width = static_cast<double>(src.n_cols()) * src.cell_size_m();
    const double height = static_cast<double>(src.n_rows()) * src.cell_size_m();
    const auto n_cols = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(std::ceil(width / target_cell_size_m - 1e-9))));
    const auto n_rows = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(std::ceil(height / target_cell_size_m - 1e-9))));

    const double west_edge = src.origin_easting_m() - src.cell_size_m() / 2.0;
    const double north_edge = src.origin_northing_m() + src.cell_size_m() / 2.0;
    MagGrid out(n_cols, n_rows, west_edge + target_cell_size_m / 2.0,
                north_edge - target_cell_size_m / 2.0, target_cell_size_m, src.nodata(),
                src.units(), src.crs_label());

    // Sample at new cell centers, clamped onto the source center lattice so
    // the half-cell border of the shared extent stays defined.
    const double east_limit = src.center_easting_m(src.n_cols() - 1);
    const double south_limit = src.center_northing_m(src.n_rows() - 1);
    for (std::size_t row = 0; row < n_rows; ++row) {
        for (std::size_t col = 0; col < n_cols; ++col) {
            Point p{out.center_easting_m(col), out.center_northing_m(row)};
            p.easting_m = std::clamp(p.easting_m, src.origin_easting_m(), east_limit);
            p.northing_m = std::clamp(p.northing_m, south_limit, src.origin_northing_m());
            if (const auto v = src.sample(p, method)) {
                out.set(row, col, *v);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

GridStats descriptive_stats(const MagGrid& g, double mode_bin_nT) {
    require(mode_bin_nT > 0.0, "stats: mode bin width must be > 0");
    std::vector<double> valid;
    valid.reserve(g.n_cols() * g.n_rows());
    for (double v : g.values()) {
        if (v != g.nodata()) valid.push_back(v);
    }
    if (valid.empty()) throw InsufficientDataError("grids: stats: grid has no valid cells");

    GridStats s;
    s.valid_cell_count = valid.size();
    const auto [mn, mx] = std::minmax_element(valid.begin(), valid.end());
    s.min_nT = *mn;
    s.max_nT = *mx;

    // Welford mean/variance; the tests hold this to a naive two-pass reference.
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double v : valid) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }
    s.mean_nT = mean;
    s.stddev_nT = valid.size() > 1 ? std::sqrt(m2 / static_cast<double>(valid.size() - 1)) : 0.0;

    std::sort(valid.begin(), valid.end());
    const std::size_t half = valid.size() / 2;
    s.median_nT = valid.size() % 2 ? valid[half] : 0.5 * (valid[half - 1] + valid[half]);

    // Mode: histogram bins of width mode_bin_nT centered on the minimum;
    // the densest bin wins, ties resolve to the lowest center.
    std::map<long long, std::size_t> bins;
    for (double v : valid) {
        bins[std::llround((v - s.min_nT) / mode_bin_nT)]++;
    }
    long long best_bin = 0;
    std::size_t best_count = 0;
    for (const auto& [bin, count] : bins) {
        if (count > best_count) { // map iterates ascending, ties keep lowest
            best_count = count;
            best_bin = bin;
        }
    }
    s.mode_nT = s.min_nT + static_cast<double>(best_bin) * mode_bin_nT;
    return s;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

namespace {

void require_registered(const MagGrid& a, const MagGrid& b, const char* op) {
    if (!a.same_registration(b)) {
        throw RegistrationError(std::string("grids: ") + op +
                                ": grids are not co-registered (resample first)");
    }
}

} // namespace

RatioResult ratio_compare(const MagGrid& a, const MagGrid& b) {
    require_registered(a, b, "ratio_compare");
    MagGrid out(a.n_cols(), a.n_rows(), a.origin_easting_m(), a.origin_northing_m(),
                a.cell_size_m(), a.nodata(), "ratio", a.crs_label());
    std::size_t masked = 0;
    for (std::size_t row = 0; row < a.n_rows(); ++row) {
        for (std::size_t col = 0; col < a.n_cols(); ++col) {
            if (!a.is_valid(row, col) || !b.is_valid(row, col)) continue;
            const double denom = b.at(row, col);
            if (std::abs(denom) <= kRatioEpsilonNt) {
                ++masked;
                continue;
            }
            out.set(row, col, a.at(row, col) / denom);
        }
    }
    return {std::move(out), masked};
}

SubtractResult subtract_compare(const MagGrid& a, const MagGrid& b, OffsetPolicy policy) {
    require_registered(a, b, "subtract_compare");
    MagGrid diff(a.n_cols(), a.n_rows(), a.origin_easting_m(), a.origin_northing_m(),
                 a.cell_size_m(), a.nodata(), a.units(), a.crs_label());
    double min_diff = std::numeric_limits<double>::infinity();
    for (std::size_t row = 0; row < a.n_rows(); ++row) {
        for (std::size_t col = 0; col < a.n_cols(); ++col) {
            if (!a.is_valid(row, col) || !b.is_valid(row, col)) continue;
            const double d = a.at(row, col) - b.at(row, col);
            min_diff = std::min(min_diff, d);
            diff.set(row, col, d);
        }
    }
    double offset = 0.0;
    if (policy == OffsetPolicy::ShiftNonNegative && std::isfinite(min_diff)) {
        offset = std::max(0.0, -min_diff);
    }
    if (offset != 0.0) {
        for (std::size_t row = 0; row < a.n_rows(); ++row) {
            for (std::size_t col = 0; col < a.n_cols(); ++col) {
                if (diff.is_valid(row, col)) diff.set(row, col, diff.at(row, col) + offset);
            }
        }
    }
    return {std::move(diff), offset};
}

SignalRatio signal_ratio(const MagGrid& a, const MagGrid& b) {
    require_registered(a, b, "signal_ratio");
    SignalRatio out;
    double ratio_sum = 0.0;
    double sum_a = 0.0, sum_b = 0.0;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t row = 0; row < a.n_rows(); ++row) {
        for (std::size_t col = 0; col < a.n_cols(); ++col) {
            if (!a.is_valid(row, col) || !b.is_valid(row, col)) continue;
            const double vb = b.at(row, col);
            if (std::abs(vb) <= kRatioEpsilonNt) continue;
            const double va = a.at(row, col);
            ratio_sum += va / vb;
            sum_a += va;
            sum_b += vb;
            pairs.emplace_back(va, vb);
        }
    }
    out.cells = pairs.size();
    if (out.cells < 2) {
        throw InsufficientDataError("grids: signal_ratio: need >= 2 jointly valid cells with "
                                    "usable denominator, have " +
                                    std::to_string(out.cells));
    }
    const auto n = static_cast<double>(out.cells);
    out.ratio_mean = ratio_sum / n;

    const double mean_a = sum_a / n, mean_b = sum_b / n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (const auto& [va, vb] : pairs) {
        saa += (va - mean_a) * (va - mean_a);
        sbb += (vb - mean_b) * (vb - mean_b);
        sab += (va - mean_a) * (vb - mean_b);
    }
    out.pearson_r = (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

std::vector<ProfileSample> extract_profile(const MagGrid& a, const MagGrid& b,
                                           const MagGrid& elevation,
                                           std::span<const Point> polyline, double step_m,
                                           ResampleMethod method) {
    require(polyline.size() >= 2, "profile: polyline needs at least 2 vertices");
    require(step_m > 0.0, "profile: step_m must be > 0");
    for (std::size_t i = 0; i < polyline.size(); ++i) {
        const MagGrid* grids[] = {&a, &b, &elevation};
        const char* names[] = {"first grid", "second grid", "elevation grid"};
        for (int k = 0; k < 3; ++k) {
            if (!grids[k]->contains(polyline[i])) {
                throw OutOfExtentError(
                    "grids: profile: vertex " + std::to_string(i) + " (" +
                    io::format_double(polyline[i].easting_m) + ", " +
                    io::format_double(polyline[i].northing_m) + ") lies outside the " +
                    names[k] + "'s extent");
            }
        }
    }

    double total = 0.0;
    std::vector<double> seg_start{0.0};
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        total += std::hypot(polyline[i].easting_m - polyline[i - 1].easting_m,
                            polyline[i].northing_m - polyline[i - 1].northing_m);
        seg_start.push_back(total);
    }
    require(total > 0.0, "profile: polyline has zero length");

    auto point_at = [&](double chainage) {
        std::size_t seg = 1;
        while (seg + 1 < seg_start.size() && chainage > seg_start[seg]) ++seg;
        const double t =
            (chainage - seg_start[seg - 1]) / (seg_start[seg] - seg_start[seg - 1]);
        return Point{polyline[seg - 1].easting_m +
                         t * (polyline[seg].easting_m - polyline[seg - 1].easting_m),
                     polyline[seg - 1].northing_m +
                         t * (polyline[seg].northing_m - polyline[seg - 1].northing_m)};
    };

    std::vector<ProfileSample> samples;
    const auto n_samples =
        static_cast<std::size_t>(std::floor(total / step_m + 1e-9)) + 1;
    for (std::size_t k = 0; k < n_samples; ++k) { // chainage multiples of step_m only
        const double chainage = static_cast<double>(k) * step_m;
        const Point p = point_at(std::min(chainage, total));
        ProfileSample s;
        s.chainage_m = chainage;
        s.tmi_a_nT = a.sample(p, method).value_or(kNaN);
        s.tmi_b_nT = b.sample(p, method).value_or(kNaN);
        s.elevation_m = elevation.sample(p, method).value_or(kNaN);
        s.difference_nT = (std::isnan(s.tmi_a_nT) || std::isnan(s.tmi_b_nT))
                              ? kNaN
                              : s.tmi_a_nT - s.tmi_b_nT;
        samples.push_back(s);
    }
    return samples;
}

double difference_elevation_correlation(std::span<const ProfileSample> samples) {
    std::vector<std::pair<double, double>> pairs;
    for (const ProfileSample& s : samples) {
        if (std::isnan(s.difference_nT) || std::isnan(s.elevation_m)) continue;
        pairs.emplace_back(s.difference_nT, s.elevation_m);
    }
    if (pairs.size() < 3) {
        throw InsufficientDataError(
            "grids: correlation: need >= 3 samples with difference and elevation, have " +
            std::to_string(pairs.size()));
    }
    double mean_d = 0.0, mean_e = 0.0;
    for (const auto& [d, e] : pairs) {
        mean_d += d;
        mean_e += e;
    }
    mean_d /= static_cast<double>(pairs.size());
    mean_e /= static_cast<double>(pairs.size());
    double sdd = 0.0, see = 0.0, sde = 0.0;
    for (const auto& [d, e] : pairs) {
        sdd += (d - mean_d) * (d - mean_d);
        see += (e - mean_e) * (e - mean_e);
        sde += (d - mean_d) * (e - mean_e);
    }
    if (sdd == 0.0 || see == 0.0) {
        throw InsufficientDataError("grids: correlation: zero variance in difference or "
                                    "elevation column");
    }
    return sde / std::sqrt(sdd * see);
}

void write_profile_csv(std::span<const ProfileSample> samples, std::ostream& out) {
    out << "chainage_m,tmi_a_nT,tmi_b_nT,elevation_m,difference_nT\n";
    auto field = [](double v) { return std::isnan(v) ? std::string("nan") : io::format_double(v); };
    for (const ProfileSample& s : samples) {
        out << io::format_double(s.chainage_m) << ',' << field(s.tmi_a_nT) << ','
            << field(s.tmi_b_nT) << ',' << field(s.elevation_m) << ','
            << field(s.difference_nT) << '\n';
    }
}

void write_stats_csv(const GridStats& s, std::ostream& out) {
    out << "mean_nT,median_nT,mode_nT,stddev_nT,min_nT,max_nT,valid_cell_count\n";
    out << io::format_double(s.mean_nT) << ',' << io::format_double(s.median_nT) << ','
        << io::format_double(s.mode_nT) << ',' << io::format_double(s.stddev_nT) << ','
        << io::format_double(s.min_nT) << ',' << io::format_double(s.max_nT) << ','
        << s.valid_cell_count << '\n';
}

} // namespace magsling::grids
