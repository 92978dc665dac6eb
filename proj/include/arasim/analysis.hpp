// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arasim/timebase.hpp"

namespace arasim {

enum class Metric {
    OffsetNs,      ///< servo-input offset, per completed exchange
    TrueOffsetNs,  ///< node clock minus simulation truth (debug series)
    MpdNs,
    SnrDb,
    RslDbm,
    RainMmh,
    PortState,
};

const char* metric_name(Metric m);
bool metric_is_integer_ns(Metric m);

struct MetricRecord {
    SimTime at = 0;
    std::string node;
    Metric metric = Metric::OffsetNs;
    double value = 0.0;
};

/// Append-only telemetry log; records arrive time-ordered per (node, metric).
class MetricLog {
public:
    void add(SimTime at, std::string node, Metric metric, double value) {
        records_.push_back({at, std::move(node), metric, value});
    }

    const std::vector<MetricRecord>& records() const { return records_; }

    /// Values of one (node, metric) series, in time order.
    std::vector<double> values(const std::string& node, Metric metric) const;

    /// (time, value) points of one (node, metric) series.
    std::vector<std::pair<SimTime, double>> series(const std::string& node, Metric metric) const;

    /// Node ids that carry the given metric, sorted.
    std::vector<std::string> nodes_with(Metric metric) const;

private:
    std::vector<MetricRecord> records_;
};

struct SummaryStats {
    std::size_t count = 0;
    double min = 0, max = 0, mean = 0, std = 0;
    double p1 = 0, p50 = 0, p99 = 0;  // nearest-rank percentiles
};

/// Throws RangeError on an empty series.
SummaryStats summarize(std::span<const double> series);

/// Nearest-rank percentile (p in (0,100]); no interpolation.
double percentile(std::span<const double> sorted, double p);

/// Spearman rank correlation with average ranks for ties. Throws RangeError
/// on length mismatch, length < 3, or zero rank variance in either input.
double spearman(std::span<const double> x, std::span<const double> y);

/// Left-closed right-open bins of the given width anchored at `origin`;
/// empty bins are omitted. Returns (bin lower edge, count) pairs.
std::vector<std::pair<double, std::size_t>> histogram(std::span<const double> series,
                                                      double bin_width, double origin);

/// Lower edge of the fullest histogram bin (bin-center convention is up to
/// the caller). Throws RangeError on an empty series.
double histogram_mode(std::span<const double> series, double bin_width, double origin);

/// Sorted empirical CDF as (value, cumulative fraction); final fraction 1.0.
std::vector<std::pair<double, double>> cdf(std::span<const double> series);

struct RainBin {
    double lo = 0.0;
    double hi = 0.0;  ///< +inf for the open-ended last bin
    std::vector<double> values;
};

/// Label each (time, value) sample with the rain rate in force at its
/// timestamp (piecewise-constant lookup over `rain_series`) and group by the
/// given edges; a final open-ended bin makes the partition exhaustive.
/// Throws RangeError when a sample predates the rain series.
std::vector<RainBin> bin_by_rain(std::span<const std::pair<SimTime, double>> samples,
                                 std::span<const std::pair<SimTime, double>> rain_series,
                                 std::span<const double> edges);

/// Format with 6 significant digits; integers render without an exponent.
std::string format_number(double v);

/// metrics.csv: at_ns,node,metric,value. Returns data-row count.
/// Byte-stable for fixed input; throws RangeError with path context on I/O
/// failure.
std::size_t export_metrics_csv(const MetricLog& log, const std::string& path);

/// Inverse of export_metrics_csv.
MetricLog load_metrics_csv(const std::string& path);

}  // namespace arasim
