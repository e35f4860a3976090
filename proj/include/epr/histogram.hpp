#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "epr/errors.hpp"

namespace epr {

struct SummaryStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double fraction_above_one = 0.0;
};

struct HistogramAxis {
    std::string label;
    bool log10_scale = false;        // values on this axis are log10 of the raw quantity
    std::vector<double> edges;       // bins + 1 entries, increasing
};

// Binned density, normalized so the integral over all bins is one. Summary
// statistics are computed over the first-axis values of the accepted
// realizations.
struct HistogramData {
    std::vector<HistogramAxis> axes;  // one (1D) or two (2D)
    std::vector<double> densities;    // 1D: bins; 2D: bins_x * bins_y, row-major in x
    std::uint64_t count_total = 0;
    std::uint64_t count_accepted = 0;
    std::uint64_t count_failed = 0;
    SummaryStats summary;

    std::size_t bins(std::size_t axis) const { return axes[axis].edges.size() - 1; }
};

namespace detail {

inline std::vector<double> uniform_edges(double lo, double hi, int bins) {
    if (!(hi > lo)) {
        // Degenerate data range: widen to a unit window so densities stay finite.
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + width * i;
    edges.back() = hi;
    return edges;
}

inline std::size_t bin_index(const std::vector<double>& edges, double v) {
    const std::size_t nb = edges.size() - 1;
    if (v <= edges.front()) return 0;
    if (v >= edges.back()) return nb - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const std::size_t idx = static_cast<std::size_t>(it - edges.begin()) - 1;
    return std::min(idx, nb - 1);
}

} // namespace detail

inline SummaryStats summarize(std::vector<double> values) {
    SummaryStats s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    double total = 0.0;
    std::size_t above = 0;
    for (double v : values) {
        total += v;
        if (v > 1.0) ++above;
    }
    s.mean = total / static_cast<double>(values.size());
    const std::size_t m = values.size() / 2;
    s.median = (values.size() % 2 == 1) ? values[m] : 0.5 * (values[m - 1] + values[m]);
    s.fraction_above_one = static_cast<double>(above) / static_cast<double>(values.size());
    return s;
}

inline HistogramData histogram_1d(const std::string& label, const std::vector<double>& values,
                                  int bins, bool log10_scale = false) {
    if (bins < 10) throw InvalidInput("histogram_1d: at least 10 bins required");
    HistogramData h;
    h.axes.push_back({label, log10_scale, {}});
    h.count_accepted = values.size();
    h.summary = summarize(values);
    if (values.empty()) {
        h.axes[0].edges = detail::uniform_edges(0.0, 1.0, bins);
        h.densities.assign(static_cast<std::size_t>(bins), 0.0);
        return h;
    }
    h.axes[0].edges = detail::uniform_edges(h.summary.min, h.summary.max, bins);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) ++counts[detail::bin_index(h.axes[0].edges, v)];
    h.densities.resize(counts.size());
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double width = h.axes[0].edges[i + 1] - h.axes[0].edges[i];
        h.densities[i] = static_cast<double>(counts[i]) / (n * width);
    }
    return h;
}

inline HistogramData histogram_2d(const std::string& label_x, const std::vector<double>& xs,
                                  const std::string& label_y, const std::vector<double>& ys,
                                  int bins, bool log_x = false, bool log_y = false) {
    if (bins < 10) throw InvalidInput("histogram_2d: at least 10 bins required");
    if (xs.size() != ys.size()) throw InvalidInput("histogram_2d: coordinate size mismatch");
    HistogramData h;
    h.axes.push_back({label_x, log_x, {}});
    h.axes.push_back({label_y, log_y, {}});
    h.count_accepted = xs.size();
    h.summary = summarize(xs);
    if (xs.empty()) {
        h.axes[0].edges = detail::uniform_edges(0.0, 1.0, bins);
        h.axes[1].edges = detail::uniform_edges(0.0, 1.0, bins);
        h.densities.assign(static_cast<std::size_t>(bins) * bins, 0.0);
        return h;
    }
    const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    h.axes[0].edges = detail::uniform_edges(h.summary.min, h.summary.max, bins);
    h.axes[1].edges = detail::uniform_edges(*ylo, *yhi, bins);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins) * bins, 0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const std::size_t ix = detail::bin_index(h.axes[0].edges, xs[k]);
        const std::size_t iy = detail::bin_index(h.axes[1].edges, ys[k]);
        ++counts[ix * static_cast<std::size_t>(bins) + iy];
    }
    h.densities.resize(counts.size());
    const double n = static_cast<double>(xs.size());
    for (std::size_t ix = 0; ix < static_cast<std::size_t>(bins); ++ix) {
        const double wx = h.axes[0].edges[ix + 1] - h.axes[0].edges[ix];
        for (std::size_t iy = 0; iy < static_cast<std::size_t>(bins); ++iy) {
            const double wy = h.axes[1].edges[iy + 1] - h.axes[1].edges[iy];
            h.densities[ix * bins + iy] =
                static_cast<double>(counts[ix * bins + iy]) / (n * wx * wy);
        }
    }
    return h;
}

} // namespace epr
