#include "stroketrace/metrics.hpp"

#include "stroketrace/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>
#include <tuple>

namespace stroketrace {

double dtw(std::span<const Point> a, std::span<const Point> b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("dtw", "dtw needs two non-empty sequences");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t m = b.size();
    // rolling rows of the (|a|+1) x (|b|+1) cost matrix
    std::vector<double> prev(m + 1, inf);
    std::vector<double> curr(m + 1, inf);
    prev[0] = 0.0;
    for (const Point& p : a) {
        curr[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
            curr[j] = best + distance(p, b[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

double dtw_per_point(std::span<const Point> a, std::span<const Point> b) {
    return dtw(a, b) / static_cast<double>(std::max(a.size(), b.size()));
}

namespace {

struct PairCost {
    double forward = 0.0;
    double reversed = 0.0;
};

PairCost pair_cost(const std::vector<Point>& truth, const std::vector<Point>& recovered) {
    std::vector<Point> flipped(recovered.rbegin(), recovered.rend());
    return {dtw_per_point(truth, recovered), dtw_per_point(truth, flipped)};
}

} // namespace

bool direction_agreement(const Stroke& truth, const Stroke& recovered) {
    const PairCost cost = pair_cost(positions(truth), positions(recovered));
    return cost.forward <= cost.reversed;
}

EvalReport match_strokes(const std::vector<Stroke>& truth, const std::vector<Stroke>& recovered,
                         double max_dtw_per_point) {
    EvalReport report;
    report.truth_strokes = static_cast<int>(truth.size());
    report.recovered_strokes = static_cast<int>(recovered.size());

    struct Candidate {
        double cost;
        int truth;
        int recovered;
        bool forward;
    };
    std::vector<Candidate> candidates;
    std::vector<std::vector<Point>> rec_points;
    rec_points.reserve(recovered.size());
    for (const Stroke& r : recovered) {
        rec_points.push_back(positions(r));
    }
    for (std::size_t t = 0; t < truth.size(); ++t) {
        const std::vector<Point> tp = positions(truth[t]);
        for (std::size_t r = 0; r < recovered.size(); ++r) {
            const PairCost c = pair_cost(tp, rec_points[r]);
            candidates.push_back({std::min(c.forward, c.reversed), static_cast<int>(t), static_cast<int>(r),
                                  c.forward <= c.reversed});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        return std::tie(x.cost, x.truth, x.recovered) < std::tie(y.cost, y.truth, y.recovered);
    });

    std::vector<bool> truth_used(truth.size(), false);
    std::vector<bool> rec_used(recovered.size(), false);
    for (const Candidate& c : candidates) {
        if (c.cost > max_dtw_per_point) {
            break;
        }
        if (truth_used[static_cast<std::size_t>(c.truth)] || rec_used[static_cast<std::size_t>(c.recovered)]) {
            continue;
        }
        truth_used[static_cast<std::size_t>(c.truth)] = true;
        rec_used[static_cast<std::size_t>(c.recovered)] = true;
        report.matched_pairs.push_back({truth[static_cast<std::size_t>(c.truth)].id,
                                        recovered[static_cast<std::size_t>(c.recovered)].id, c.cost, c.forward});
    }
    std::sort(report.matched_pairs.begin(), report.matched_pairs.end(),
              [](const MatchedPair& x, const MatchedPair& y) { return x.truth_id < y.truth_id; });

    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (!truth_used[t]) {
            report.unmatched_truth.push_back(truth[t].id);
        }
    }
    for (std::size_t r = 0; r < recovered.size(); ++r) {
        if (!rec_used[r]) {
            report.unmatched_recovered.push_back(recovered[r].id);
        }
    }

    if (!report.matched_pairs.empty()) {
        double cost = 0.0;
        int correct = 0;
        for (const MatchedPair& p : report.matched_pairs) {
            cost += p.dtw_per_point;
            correct += p.direction_correct ? 1 : 0;
        }
        const auto n = static_cast<double>(report.matched_pairs.size());
        report.mean_dtw_per_point = cost / n;
        report.direction_accuracy = correct / n;
    }
    return report;
}

EvalReport evaluate(const OnlineTrace& truth, const OnlineTrace& recovered, const EvalOptions& options) {
    if (truth.width != recovered.width || truth.height != recovered.height) {
        throw ValidationError("image_size", "truth and recovered traces have different image_size");
    }
    const auto resample_all = [&](const OnlineTrace& trace) {
        std::vector<Stroke> out;
        out.reserve(trace.strokes.size());
        for (const Stroke& s : trace.strokes) {
            out.push_back(resample(s, options.spacing));
        }
        return out;
    };
    double pen = recovered.avg_width > 0.0 ? recovered.avg_width : truth.avg_width;
    if (!(pen > 0.0)) {
        pen = 1.0;
    }
    return match_strokes(resample_all(truth), resample_all(recovered), options.match_threshold_scale * pen);
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

void to_json(nlohmann::json& j, const EvalReport& report) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const MatchedPair& p : report.matched_pairs) {
        pairs.push_back({{"truth_id", p.truth_id},
                         {"recovered_id", p.recovered_id},
                         {"dtw_per_point", quantize(p.dtw_per_point)},
                         {"direction_correct", p.direction_correct}});
    }
    j = nlohmann::json{
        {"truth_strokes", report.truth_strokes},
        {"recovered_strokes", report.recovered_strokes},
        {"matched_pairs", std::move(pairs)},
        {"unmatched_truth", report.unmatched_truth},
        {"unmatched_recovered", report.unmatched_recovered},
        {"mean_dtw_per_point",
         report.mean_dtw_per_point ? nlohmann::json(quantize(*report.mean_dtw_per_point)) : nlohmann::json(nullptr)},
        {"direction_accuracy", optional_number(report.direction_accuracy)},
    };
}

CorpusSummary summarize(const std::vector<CorpusRow>& rows) {
    CorpusSummary s;
    s.items = static_cast<int>(rows.size());
    if (rows.empty()) {
        return s;
    }
    int exact = 0;
    int within = 0;
    int pairs = 0;
    int correct = 0;
    int items_with_pairs = 0;
    double accuracy_sum = 0.0;
    double dtw_sum = 0.0;
    for (const CorpusRow& row : rows) {
        exact += row.report.stroke_count_exact() ? 1 : 0;
        if (row.report.mean_dtw_per_point) {
            ++items_with_pairs;
            dtw_sum += *row.report.mean_dtw_per_point;
            accuracy_sum += *row.report.direction_accuracy;
            within += *row.report.mean_dtw_per_point <= row.pen_width ? 1 : 0;
        }
        for (const MatchedPair& p : row.report.matched_pairs) {
            ++pairs;
            correct += p.direction_correct ? 1 : 0;
        }
    }
    const auto n = static_cast<double>(rows.size());
    s.stroke_count_exact_fraction = exact / n;
    s.dtw_within_pen_fraction = within / n;
    if (pairs > 0) {
        s.direction_accuracy = static_cast<double>(correct) / pairs;
    }
    if (items_with_pairs > 0) {
        s.mean_direction_accuracy = accuracy_sum / items_with_pairs;
        s.mean_dtw_per_point = dtw_sum / items_with_pairs;
    }
    return s;
}

void to_json(nlohmann::json& j, const CorpusSummary& summary) {
    const auto q = [](const std::optional<double>& v) {
        return v ? nlohmann::json(quantize(*v)) : nlohmann::json(nullptr);
    };
    j = nlohmann::json{
        {"items", summary.items},
        {"stroke_count_exact_fraction", quantize(summary.stroke_count_exact_fraction)},
        {"direction_accuracy", q(summary.direction_accuracy)},
        {"mean_direction_accuracy", q(summary.mean_direction_accuracy)},
        {"mean_dtw_per_point", q(summary.mean_dtw_per_point)},
        {"dtw_within_pen_fraction", quantize(summary.dtw_within_pen_fraction)},
    };
}

void to_json(nlohmann::json& j, const CorpusRow& row) {
    j = nlohmann::json{{"name", row.name}, {"pen_width", quantize(row.pen_width)}, {"report", row.report}};
}

} // namespace stroketrace
