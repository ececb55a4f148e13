#ifndef STROKETRACE_METRICS_HPP
#define STROKETRACE_METRICS_HPP

#include "stroketrace/geometry.hpp"
#include "stroketrace/trace_model.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <span>
#include <vector>

namespace stroketrace {

/// Full-alignment dynamic time warping with Euclidean point cost. Returns
/// the total cost of the cheapest monotone alignment. Both inputs must be
/// non-empty.
double dtw(std::span<const Point> a, std::span<const Point> b);

/// dtw(a, b) / max(|a|, |b|).
double dtw_per_point(std::span<const Point> a, std::span<const Point> b);

/// Forward DTW does not exceed reversed DTW.
bool direction_agreement(const Stroke& truth, const Stroke& recovered);

struct MatchedPair {
    int truth_id = 0;
    int recovered_id = 0;
    double dtw_per_point = 0.0;  ///< cheaper of the two orientations
    bool direction_correct = false;
};

struct EvalReport {
    int truth_strokes = 0;
    int recovered_strokes = 0;
    std::vector<MatchedPair> matched_pairs;
    std::vector<int> unmatched_truth;
    std::vector<int> unmatched_recovered;
    std::optional<double> mean_dtw_per_point;  ///< nullopt when nothing matched
    std::optional<double> direction_accuracy;  ///< nullopt when nothing matched

    bool stroke_count_exact() const { return truth_strokes == recovered_strokes; }
};

/// Greedy assignment in ascending min-orientation cost; pairs costlier than
/// `max_dtw_per_point` are left unmatched. Strokes should already be
/// resampled. Fills the pairs and unmatched lists plus the aggregates.
EvalReport match_strokes(const std::vector<Stroke>& truth, const std::vector<Stroke>& recovered,
                         double max_dtw_per_point);

struct EvalOptions {
    double match_threshold_scale = 3.0;  ///< multiples of the pen width estimate
    double spacing = 1.0;                ///< resampling step before DTW
};

/// Resamples both traces and compares them. Throws ValidationError when the
/// image sizes differ.
EvalReport evaluate(const OnlineTrace& truth, const OnlineTrace& recovered, const EvalOptions& options = {});

void to_json(nlohmann::json& j, const EvalReport& report);

/// One row of a corpus-level summary.
struct CorpusRow {
    std::string name;
    double pen_width = 0.0;
    EvalReport report;
};

struct CorpusSummary {
    int items = 0;
    double stroke_count_exact_fraction = 0.0;
    std::optional<double> direction_accuracy;  ///< pooled over all matched pairs
    std::optional<double> mean_direction_accuracy;  ///< mean of per-item accuracies
    std::optional<double> mean_dtw_per_point;  ///< mean of per-item means
    /// Items whose mean dtw per point is at most one pen width.
    double dtw_within_pen_fraction = 0.0;
};

CorpusSummary summarize(const std::vector<CorpusRow>& rows);

void to_json(nlohmann::json& j, const CorpusSummary& summary);
void to_json(nlohmann::json& j, const CorpusRow& row);

} // namespace stroketrace

#endif
