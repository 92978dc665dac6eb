// SPDX-License-Identifier: Apache-2.0
#include "arasim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "arasim/errors.hpp"

namespace arasim {

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::OffsetNs: return "offset_ns";
        case Metric::TrueOffsetNs: return "true_offset_ns";
        case Metric::MpdNs: return "mpd_ns";
        case Metric::SnrDb: return "snr_db";
        case Metric::RslDbm: return "rsl_dbm";
        case Metric::RainMmh: return "rain_mmh";
        case Metric::PortState: return "port_state";
    }
    return "?";
}

bool metric_is_integer_ns(Metric m) {
    return m == Metric::OffsetNs || m == Metric::TrueOffsetNs || m == Metric::MpdNs;
}

namespace {

std::optional<Metric> metric_from_name(const std::string& name) {
    for (Metric m : {Metric::OffsetNs, Metric::TrueOffsetNs, Metric::MpdNs, Metric::SnrDb,
                     Metric::RslDbm, Metric::RainMmh, Metric::PortState}) {
        if (name == metric_name(m)) return m;
    }
    return std::nullopt;
}

}  // namespace

std::vector<double> MetricLog::values(const std::string& node, Metric metric) const {
    std::vector<double> out;
    for (const auto& r : records_)
        if (r.metric == metric && r.node == node) out.push_back(r.value);
    return out;
}

std::vector<std::pair<SimTime, double>> MetricLog::series(const std::string& node,
                                                          Metric metric) const {
    std::vector<std::pair<SimTime, double>> out;
    for (const auto& r : records_)
        if (r.metric == metric && r.node == node) out.emplace_back(r.at, r.value);
    return out;
}

std::vector<std::string> MetricLog::nodes_with(Metric metric) const {
    std::set<std::string> ids;
    for (const auto& r : records_)
        if (r.metric == metric) ids.insert(r.node);
    return {ids.begin(), ids.end()};
}

double percentile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw RangeError("percentile of empty series");
    const auto n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

SummaryStats summarize(std::span<const double> series) {
    if (series.empty()) throw RangeError("summarize of empty series");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    SummaryStats s;
    s.count = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
    double acc = 0.0;
    for (double v : sorted) acc += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(acc / static_cast<double>(s.count));
    s.p1 = percentile(sorted, 1.0);
    s.p50 = percentile(sorted, 50.0);
    s.p99 = percentile(sorted, 99.0);
    return s;
}

namespace {

/// Average ranks, ties get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw RangeError("spearman: length mismatch");
    if (x.size() < 3) throw RangeError("spearman: need at least 3 points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw RangeError("spearman: undefined correlation (zero rank variance)");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<std::pair<double, std::size_t>> histogram(std::span<const double> series,
                                                      double bin_width, double origin) {
    if (bin_width <= 0.0) throw RangeError("histogram bin width must be > 0");
    std::map<std::int64_t, std::size_t> bins;
    for (double v : series) {
        const auto k = static_cast<std::int64_t>(std::floor((v - origin) / bin_width));
        ++bins[k];
    }
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(bins.size());
    for (const auto& [k, count] : bins)
        out.emplace_back(origin + static_cast<double>(k) * bin_width, count);
    return out;
}

double histogram_mode(std::span<const double> series, double bin_width, double origin) {
    const auto bins = histogram(series, bin_width, origin);
    if (bins.empty()) throw RangeError("histogram_mode of empty series");
    const auto it = std::max_element(bins.begin(), bins.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return it->first;
}

std::vector<std::pair<double, double>> cdf(std::span<const double> series) {
    if (series.empty()) throw RangeError("cdf of empty series");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        // collapse runs of equal values onto the final fraction
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        out.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    out.back().second = 1.0;  // exact by construction, kept explicit
    return out;
}

std::vector<RainBin> bin_by_rain(std::span<const std::pair<SimTime, double>> samples,
                                 std::span<const std::pair<SimTime, double>> rain_series,
                                 std::span<const double> edges) {
    if (rain_series.empty()) throw RangeError("bin_by_rain: empty rain series");
    if (edges.size() < 2) throw RangeError("bin_by_rain: need at least two edges");
    std::vector<RainBin> bins;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        bins.push_back({edges[i], edges[i + 1], {}});
    bins.push_back({edges.back(), std::numeric_limits<double>::infinity(), {}});

    for (const auto& [t, v] : samples) {
        if (t < rain_series.front().first)
            throw RangeError("bin_by_rain: sample predates rain series");
        auto it = std::upper_bound(rain_series.begin(), rain_series.end(), t,
                                   [](SimTime tv, const auto& seg) { return tv < seg.first; });
        const double rain = std::prev(it)->second;
        for (auto& bin : bins) {
            if (rain >= bin.lo && rain < bin.hi) {
                bin.values.push_back(v);
                break;
            }
        }
    }
    return bins;
}

std::string format_number(double v) {
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    } else {
        std::snprintf(buf, sizeof buf, "%.6g", v);
    }
    return buf;
}

std::size_t export_metrics_csv(const MetricLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RangeError("cannot open for writing: " + path);
    out << "at_ns,node,metric,value\n";
    std::size_t rows = 0;
    for (const auto& r : log.records()) {
        out << r.at << ',' << r.node << ',' << metric_name(r.metric) << ',';
        if (metric_is_integer_ns(r.metric) || r.metric == Metric::PortState)
            out << static_cast<long long>(std::llround(r.value));
        else
            out << format_number(r.value);
        out << '\n';
        ++rows;
    }
    if (!out) throw RangeError("write failed: " + path);
    return rows;
}

MetricLog load_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RangeError("cannot open metrics csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "at_ns,node,metric,value")
        throw RangeError("bad metrics csv header in " + path);
    MetricLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string at_s, node, metric_s, value_s;
        if (!std::getline(ss, at_s, ',') || !std::getline(ss, node, ',') ||
            !std::getline(ss, metric_s, ',') || !std::getline(ss, value_s))
            throw RangeError("bad metrics csv row: '" + line + "'");
        const auto metric = metric_from_name(metric_s);
        if (!metric) throw RangeError("unknown metric '" + metric_s + "' in " + path);
        log.add(std::stoll(at_s), node, *metric, std::stod(value_s));
    }
    return log;
}

}  // namespace arasim
