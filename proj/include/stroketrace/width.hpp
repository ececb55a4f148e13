#ifndef STROKETRACE_WIDTH_HPP
#define STROKETRACE_WIDTH_HPP

#include "stroketrace/raster.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stroketrace {

struct RowRuns {
    int row = 0;
    std::vector<int> runs;
};

/// Horizontal foreground run lengths ("sectional widths").
struct SectionalWidths {
    std::vector<int> runs;
    std::vector<RowRuns> per_row;  ///< rows without foreground are omitted
};

enum class WidthMode {
    HistogramEq1,  ///< frequency-weighted mean of the k most frequent widths
    TopKMean,      ///< plain mean of the k longest runs
};

struct WidthEstimate {
    double avg_width = 0.0;
    WidthMode mode = WidthMode::HistogramEq1;
    int k = 3;
    /// (width, frequency) pairs that entered the average. In TopKMean mode
    /// each selected run appears with frequency 1.
    std::vector<std::pair<int, int>> support;
};

SectionalWidths sectional_widths(const BinaryImage& img);

/// Throws EmptySignature when `sw` has no runs, ValidationError when k < 1.
WidthEstimate average_width(const SectionalWidths& sw, WidthMode mode = WidthMode::HistogramEq1, int k = 3);

std::string_view to_string(WidthMode mode);
/// Accepts "histogram" / "topk" (and the enum spellings). Throws ValidationError.
WidthMode parse_width_mode(std::string_view text);

} // namespace stroketrace

#endif
