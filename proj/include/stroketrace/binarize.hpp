#ifndef STROKETRACE_BINARIZE_HPP
#define STROKETRACE_BINARIZE_HPP

#include "stroketrace/raster.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace stroketrace {

using Histogram = std::array<std::uint64_t, 256>;
using SmoothedHistogram = std::array<double, 256>;

inline constexpr int kSmoothingWindow = 5;
inline constexpr int kMinPeakSeparation = 16;

struct PeakPair {
    int lo = 0;
    int hi = 0;
};

struct HistogramReport {
    Histogram counts{};
    SmoothedHistogram smoothed{};
    std::optional<PeakPair> peaks;  ///< nullopt when no second peak qualified
    int threshold = 0;
    bool inverted = false;
};

struct BinarizeResult {
    BinaryImage image;
    HistogramReport report;
};

Histogram histogram(const GrayImage& img);

/// Centered moving average over kSmoothingWindow bins, ends replicated.
SmoothedHistogram smooth_histogram(const Histogram& counts);

/// Local maxima of the smoothed curve: a bin (or run of equal bins) strictly
/// above both neighbouring values. The histogram ends never qualify. Each
/// plateau is reported once, at its highest raw count (leftmost on ties).
std::vector<int> local_maxima(const Histogram& counts, const SmoothedHistogram& smoothed);

/// Two highest local maxima at least kMinPeakSeparation apart, ordered by
/// intensity. nullopt means there is no second qualifying peak.
std::optional<PeakPair> find_two_peaks(const Histogram& counts);

/// Midpoint thresholding. Foreground is the dark side (v <= T). With
/// `invert` the image is complemented first, so light ink on a dark page
/// binarizes like dark ink on a light one; the report is then expressed in
/// complemented intensities.
BinarizeResult binarize(const GrayImage& img, bool invert = false);

void to_json(nlohmann::json& j, const HistogramReport& report);

} // namespace stroketrace

#endif
