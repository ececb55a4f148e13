#ifndef STROKETRACE_PIPELINE_HPP
#define STROKETRACE_PIPELINE_HPP

#include "stroketrace/binarize.hpp"
#include "stroketrace/metrics.hpp"
#include "stroketrace/raster.hpp"
#include "stroketrace/synth.hpp"
#include "stroketrace/trace_model.hpp"
#include "stroketrace/tracer.hpp"
#include "stroketrace/width.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stroketrace {

struct ConvertOptions {
    bool invert = false;
    double truck_scale = 1.0;
    WidthMode width_mode = WidthMode::HistogramEq1;
    int k = 3;
    TruckProportions proportions;
    TracerParams tracer;
};

/// Every intermediate of one offline-to-online conversion.
struct ConvertResult {
    GrayImage filtered;
    BinarizeResult binary;
    SectionalWidths widths;
    std::optional<WidthEstimate> width;     ///< empty for a blank page
    std::optional<TruckGeometry> geometry;  ///< empty for a blank page
    OnlineTrace trace;
};

/// median filter -> binarize -> sectional widths -> average width -> truck
/// geometry -> traversal. A page without foreground yields zero strokes.
ConvertResult convert(const GrayImage& image, const ConvertOptions& options = {}, const std::string& source = {},
                      const TickObserver& observer = {});

struct BenchItem {
    CorpusRow row;
    double seconds = 0.0;  ///< wall clock for convert + evaluate
};

struct BenchResult {
    std::vector<BenchItem> items;  ///< in corpus index order
    CorpusSummary summary;
};

/// Generates the corpus, converts and evaluates every item. Items are
/// spread over `threads` workers (0 = hardware concurrency); results do not
/// depend on the thread count.
BenchResult bench(const CorpusParams& corpus_params, const ConvertOptions& convert_options = {},
                  const EvalOptions& eval_options = {}, unsigned threads = 0);

} // namespace stroketrace

#endif
