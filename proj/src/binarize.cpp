#include "stroketrace/binarize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>

namespace stroketrace {

Histogram histogram(const GrayImage& img) {
    Histogram counts{};
    for (const std::uint8_t v : img.pixels()) {
        ++counts[v];
    }
    return counts;
}

SmoothedHistogram smooth_histogram(const Histogram& counts) {
    constexpr int half = kSmoothingWindow / 2;
    SmoothedHistogram smoothed{};
    for (int v = 0; v < 256; ++v) {
        double sum = 0.0;
        for (int d = -half; d <= half; ++d) {
            sum += static_cast<double>(counts[static_cast<std::size_t>(std::clamp(v + d, 0, 255))]);
        }
        smoothed[static_cast<std::size_t>(v)] = sum / kSmoothingWindow;
    }
    return smoothed;
}

std::vector<int> local_maxima(const Histogram& counts, const SmoothedHistogram& smoothed) {
    std::vector<int> maxima;
    int v = 1;
    while (v < 255) {
        int end = v;
        while (end + 1 < 255 && smoothed[static_cast<std::size_t>(end + 1)] == smoothed[static_cast<std::size_t>(v)]) {
            ++end;
        }
        const double value = smoothed[static_cast<std::size_t>(v)];
        const bool left_lower = smoothed[static_cast<std::size_t>(v - 1)] < value;
        const bool right_lower = smoothed[static_cast<std::size_t>(end + 1)] < value;
        if (left_lower && right_lower && value > 0.0) {
            int best = v;
            for (int i = v + 1; i <= end; ++i) {
                if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(best)]) {
                    best = i;
                }
            }
            maxima.push_back(best);
        }
        v = end + 1;
    }
    return maxima;
}

std::optional<PeakPair> find_two_peaks(const Histogram& counts) {
    const SmoothedHistogram smoothed = smooth_histogram(counts);
    std::vector<int> maxima = local_maxima(counts, smoothed);
    std::stable_sort(maxima.begin(), maxima.end(), [&](int a, int b) {
        return smoothed[static_cast<std::size_t>(a)] > smoothed[static_cast<std::size_t>(b)];
    });
    if (maxima.size() < 2) {
        return std::nullopt;
    }
    // Highest peak that has a partner far enough away, paired with the
    // highest such partner.
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        for (std::size_t j = i + 1; j < maxima.size(); ++j) {
            if (std::abs(maxima[j] - maxima[i]) >= kMinPeakSeparation) {
                return PeakPair{std::min(maxima[i], maxima[j]), std::max(maxima[i], maxima[j])};
            }
        }
    }
    return std::nullopt;
}

BinarizeResult binarize(const GrayImage& img, bool invert) {
    GrayImage source = img;
    if (invert) {
        for (std::uint8_t& v : source.pixels()) {
            v = static_cast<std::uint8_t>(255 - v);
        }
    }

    HistogramReport report;
    report.inverted = invert;
    report.counts = histogram(source);
    report.smoothed = smooth_histogram(report.counts);
    report.peaks = find_two_peaks(report.counts);

    BinaryImage mask(source.width(), source.height());
    if (report.peaks) {
        report.threshold = (report.peaks->lo + report.peaks->hi) / 2;
    } else {
        const auto present = [&](std::uint64_t c) { return c > 0; };
        const auto lo_it = std::find_if(report.counts.begin(), report.counts.end(), present);
        const auto hi_it = std::find_if(report.counts.rbegin(), report.counts.rend(), present);
        if (lo_it == report.counts.end()) {
            return {std::move(mask), report};
        }
        const int lo = static_cast<int>(lo_it - report.counts.begin());
        const int hi = 255 - static_cast<int>(hi_it - report.counts.rbegin());
        report.threshold = (lo + hi) / 2;
        if (lo == hi) {
            // constant image: nothing to separate, all background
            return {std::move(mask), report};
        }
    }

    const auto pixels = source.pixels();
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(source.width()) +
                                  static_cast<std::size_t>(x);
            mask.set(x, y, pixels[i] <= report.threshold);
        }
    }
    return {std::move(mask), report};
}

void to_json(nlohmann::json& j, const HistogramReport& report) {
    j = nlohmann::json{
        {"counts", report.counts},
        {"smoothed", report.smoothed},
        {"threshold", report.threshold},
        {"inverted", report.inverted},
    };
    if (report.peaks) {
        j["peak_lo"] = report.peaks->lo;
        j["peak_hi"] = report.peaks->hi;
    } else {
        j["peak_lo"] = nullptr;
        j["peak_hi"] = nullptr;
    }
}

} // namespace stroketrace
