#ifndef STROKETRACE_SYNTH_HPP
#define STROKETRACE_SYNTH_HPP

#include "stroketrace/geometry.hpp"
#include "stroketrace/raster.hpp"
#include "stroketrace/trace_model.hpp"

#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace stroketrace {

/// A known online script to be rendered as an offline bitmap.
struct ScriptSpec {
    int width = 0;
    int height = 0;
    double pen_width = 3.0;
    std::vector<std::vector<Point>> strokes;  ///< ground-truth polylines, in writing order
    double noise = 0.0;                       ///< salt-and-pepper probability, [0, 0.2]
    int background = 230;
    int foreground = 25;
    double jitter_sigma = 8.0;                ///< Gaussian intensity jitter; 0 disables it
    std::uint64_t seed = 0;
};

/// Throws ValidationError naming the violated invariant.
void validate(const ScriptSpec& spec);

/// Pixels whose centres lie within pen_width / 2 of some stroke polyline.
BinaryImage stamp_mask(const ScriptSpec& spec);

struct SynthSample {
    GrayImage image;
    OnlineTrace truth;  ///< the script's polylines, ticks = point indices
};

SynthSample rasterize(const ScriptSpec& spec);

struct CorpusParams {
    int count = 50;
    std::uint64_t seed = 42;
    int min_strokes = 1;
    int max_strokes = 5;
    int min_width = 160;
    int max_width = 512;
    int min_height = 96;
    int max_height = 256;
    double min_pen = 2.0;
    double max_pen = 6.0;
    double min_length = 40.0;
    double max_length = 180.0;
    double segment_length = 6.0;
    double max_turn = std::numbers::pi / 8.0;  ///< heading change per segment
    /// Headings stay within [pi/2 - cone, pi/2 + cone]: strokes are written
    /// downward from their topmost point. Set to pi for unconstrained walks.
    double writing_cone = 5.0 * std::numbers::pi / 12.0;
    double max_noise = 0.02;
};

struct CorpusItem {
    std::string name;
    GrayImage image;
    OnlineTrace truth;
    ScriptSpec spec;
};

/// Deterministic in params.seed; item i depends only on (seed, i).
std::vector<CorpusItem> corpus(const CorpusParams& params);
CorpusItem corpus_item(const CorpusParams& params, int index);

std::string spec_to_json(const ScriptSpec& spec);
/// Throws FormatError / ValidationError.
ScriptSpec spec_from_json(std::string_view bytes);

} // namespace stroketrace

#endif
