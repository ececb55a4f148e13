#include "stroketrace/width.hpp"

#include "stroketrace/error.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace stroketrace {

SectionalWidths sectional_widths(const BinaryImage& img) {
    SectionalWidths sw;
    for (int y = 0; y < img.height(); ++y) {
        RowRuns row{y, {}};
        int run = 0;
        for (int x = 0; x <= img.width(); ++x) {
            if (x < img.width() && img.at(x, y)) {
                ++run;
            } else if (run > 0) {
                row.runs.push_back(run);
                run = 0;
            }
        }
        if (!row.runs.empty()) {
            sw.runs.insert(sw.runs.end(), row.runs.begin(), row.runs.end());
            sw.per_row.push_back(std::move(row));
        }
    }
    return sw;
}

WidthEstimate average_width(const SectionalWidths& sw, WidthMode mode, int k) {
    if (k < 1) {
        throw ValidationError("k", "k must be at least 1");
    }
    if (sw.runs.empty()) {
        throw EmptySignature();
    }

    WidthEstimate estimate;
    estimate.mode = mode;
    estimate.k = k;

    if (mode == WidthMode::TopKMean) {
        std::vector<int> sorted = sw.runs;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), sorted.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < take; ++i) {
            sum += sorted[i];
            estimate.support.emplace_back(sorted[i], 1);
        }
        estimate.avg_width = sum / static_cast<double>(take);
        return estimate;
    }

    std::map<int, int> frequency;
    for (const int run : sw.runs) {
        ++frequency[run];
    }
    std::vector<std::pair<int, int>> ranked(frequency.begin(), frequency.end());
    // most frequent first; equal frequencies prefer the wider run
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first > b.first;
    });
    ranked.resize(std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size()));

    double weighted = 0.0;
    double total = 0.0;
    for (const auto& [width, freq] : ranked) {
        weighted += static_cast<double>(width) * freq;
        total += freq;
    }
    estimate.avg_width = weighted / total;
    estimate.support = std::move(ranked);
    return estimate;
}

std::string_view to_string(WidthMode mode) {
    return mode == WidthMode::TopKMean ? "topk" : "histogram";
}

WidthMode parse_width_mode(std::string_view text) {
    if (text == "histogram" || text == "HistogramEq1") {
        return WidthMode::HistogramEq1;
    }
    if (text == "topk" || text == "TopKMean") {
        return WidthMode::TopKMean;
    }
    throw ValidationError("width_mode", "unknown width mode: " + std::string(text));
}

} // namespace stroketrace
