#include "magsling/emi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magsling/errors.hpp"
#include "magsling/io_util.hpp"

namespace magsling::emi {

FitReport fit_noise_model(std::span<const NoiseSample> samples,
                          std::optional<double> fixed_exponent) {
    FitReport report;
    std::vector<std::pair<double, double>> logs; // (ln d, ln N)
    logs.reserve(samples.size());
    for (const NoiseSample& s : samples) {
        if (!(s.distance_m > 0.0)) {
            throw DomainError("emi: sample distance must be > 0, got " +
                              io::format_double(s.distance_m));
        }
        if (s.noise_nT < 0.0) {
            throw DomainError("emi: sample noise must be >= 0, got " +
                              io::format_double(s.noise_nT));
        }
        if (s.noise_nT == 0.0) {
            ++report.excluded_zero_noise; // cannot take ln of zero noise
            continue;
        }
        logs.emplace_back(std::log(s.distance_m), std::log(s.noise_nT));
    }
    report.samples_used = logs.size();
    if (logs.size() < 2) {
        throw InsufficientDataError("emi: need at least 2 nonzero-noise samples, have " +
                                    std::to_string(logs.size()));
    }

    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : logs) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(logs.size());
    mean_y /= static_cast<double>(logs.size());

    double slope, intercept;
    if (fixed_exponent) {
        slope = *fixed_exponent;
        intercept = mean_y - slope * mean_x; // least squares with pinned slope
    } else {
        double sxx = 0.0, sxy = 0.0;
        for (const auto& [x, y] : logs) {
            sxx += (x - mean_x) * (x - mean_x);
            sxy += (x - mean_x) * (y - mean_y);
        }
        if (sxx == 0.0) {
            throw DomainError("emi: degenerate fit: all samples share one distance");
        }
        slope = sxy / sxx;
        intercept = mean_y - slope * mean_x;
    }

    double ss = 0.0;
    for (const auto& [x, y] : logs) {
        const double r = y - (intercept + slope * x);
        ss += r * r;
    }

    report.model.exponent_p = slope;
    report.model.coefficient_k = std::exp(intercept);
    report.model.fit_residual_rms = std::sqrt(ss / static_cast<double>(logs.size()));
    if (!(report.model.exponent_p < 0.0)) {
        throw DomainError("emi: fitted exponent " + io::format_double(slope) +
                          " is not negative; samples do not decay with distance");
    }
    return report;
}

double predict_noise(const EmiModel& model, double distance_m) {
    if (!(distance_m > 0.0)) {
        throw DomainError("emi: distance must be > 0, got " + io::format_double(distance_m));
    }
    return model.coefficient_k * std::pow(distance_m, model.exponent_p);
}

SelectionReport select_tether_length(std::span<const dynamics::SweepRow> sweep,
                                     const EmiModel& model, const SelectionPolicy& policy) {
    if (sweep.empty()) throw DomainError("emi: selection needs a non-empty sweep");
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (sweep[i].length_m <= sweep[i - 1].length_m) {
            throw DomainError("emi: sweep must be sorted by increasing length");
        }
    }

    SelectionReport report;
    report.policy = policy;
    report.model = model;
    report.table.reserve(sweep.size());
    for (const dynamics::SweepRow& row : sweep) {
        report.table.push_back({row.length_m, row.amplitude_m, row.settling_s,
                                predict_noise(model, row.length_m)});
    }

    if (policy.kind == PolicyKind::Threshold) {
        for (const SelectionRow& row : report.table) {
            if (row.noise_nT <= policy.noise_threshold_nT) {
                report.selected_length_m = row.length_m;
                return report;
            }
        }
        throw NoFeasibleLengthError(
            "emi: no sweep length meets the noise threshold of " +
            io::format_double(policy.noise_threshold_nT) + " nT (lowest prediction " +
            io::format_double(report.table.back().noise_nT) + " nT at L=" +
            io::format_double(report.table.back().length_m) + " m)");
    }

    // Weighted policy over min-max normalized columns; constant columns
    // normalize to zero.
    auto normalized = [&](auto member) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const SelectionRow& row : report.table) {
            lo = std::min(lo, row.*member);
            hi = std::max(hi, row.*member);
        }
        std::vector<double> out;
        out.reserve(report.table.size());
        for (const SelectionRow& row : report.table) {
            out.push_back(hi > lo ? (row.*member - lo) / (hi - lo) : 0.0);
        }
        return out;
    };
    const auto amp_n = normalized(&SelectionRow::amplitude_m);
    const auto set_n = normalized(&SelectionRow::settling_s);
    const auto noi_n = normalized(&SelectionRow::noise_nT);

    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.table.size(); ++i) {
        const double score = policy.weights[0] * amp_n[i] + policy.weights[1] * set_n[i] +
                             policy.weights[2] * noi_n[i];
        if (score < best_score) { // strict: ties keep the shorter length
            best_score = score;
            best = i;
        }
    }
    report.selected_length_m = report.table[best].length_m;
    return report;
}

std::vector<NoiseSample> read_noise_csv(std::istream& in) {
    std::vector<NoiseSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = io::trim(line);
        if (trimmed.empty()) continue;
        const auto fields = io::split_fields(trimmed, ',');
        if (!header_seen) {
            header_seen = true;
            if (fields.size() < 2 || io::trim(fields[0]) != "distance_m" ||
                io::trim(fields[1]) != "noise_nT") {
                throw ParseError("noise csv line 1: expected header 'distance_m,noise_nT'");
            }
            continue;
        }
        if (fields.size() < 2) {
            throw ParseError("noise csv line " + std::to_string(line_no) +
                             ": expected 2 fields");
        }
        const std::string ctx = "noise csv line " + std::to_string(line_no);
        samples.push_back({io::parse_double(fields[0], ctx), io::parse_double(fields[1], ctx)});
    }
    return samples;
}

void write_noise_csv(std::span<const NoiseSample> samples, std::ostream& out) {
    out << "distance_m,noise_nT\n";
    for (const NoiseSample& s : samples) {
        out << io::format_double(s.distance_m) << ',' << io::format_double(s.noise_nT) << '\n';
    }
}

} // namespace magsling::emi
