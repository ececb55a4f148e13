#include "stroketrace/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace stroketrace {

ConvertResult convert(const GrayImage& image, const ConvertOptions& options, const std::string& source,
                      const TickObserver& observer) {
    ConvertResult result;
    result.filtered = median_filter_5x5(image);
    result.binary = binarize(result.filtered, options.invert);
    result.widths = sectional_widths(result.binary.image);

    if (!result.widths.runs.empty()) {
        result.width = average_width(result.widths, options.width_mode, options.k);
        result.geometry = derive_geometry(*result.width, options.truck_scale, options.proportions);
        result.trace = trace_all(result.binary.image, *result.geometry, options.tracer, observer);
        result.trace.avg_width = result.width->avg_width;
    }
    result.trace.source = source;
    result.trace.width = image.width();
    result.trace.height = image.height();
    return result;
}

BenchResult bench(const CorpusParams& corpus_params, const ConvertOptions& convert_options,
                  const EvalOptions& eval_options, unsigned threads) {
    const int n = std::max(0, corpus_params.count);
    BenchResult result;
    result.items.resize(static_cast<std::size_t>(n));

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(1, n)));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                const auto started = std::chrono::steady_clock::now();
                const CorpusItem item = corpus_item(corpus_params, i);
                const ConvertResult converted = convert(item.image, convert_options, item.name);
                BenchItem& out = result.items[static_cast<std::size_t>(i)];
                out.row = {item.name, item.spec.pen_width, evaluate(item.truth, converted.trace, eval_options)};
                out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };

    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::vector<CorpusRow> rows;
    rows.reserve(result.items.size());
    for (const BenchItem& item : result.items) {
        rows.push_back(item.row);
    }
    result.summary = summarize(rows);
    return result;
}

} // namespace stroketrace
