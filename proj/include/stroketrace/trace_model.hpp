#ifndef STROKETRACE_TRACE_MODEL_HPP
#define STROKETRACE_TRACE_MODEL_HPP

#include "stroketrace/geometry.hpp"
#include "stroketrace/raster.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stroketrace {

struct TracePoint {
    double x = 0.0;
    double y = 0.0;
    std::int64_t t = 0;  ///< tick index; synthetic, offline images carry no timing

    Point position() const { return {x, y}; }
};

/// One pen-down segment, in the order it was traversed.
struct Stroke {
    int id = 0;
    std::vector<TracePoint> points;
};

/// A recovered (or ground-truth) online signature.
struct OnlineTrace {
    std::string source;
    int width = 0;
    int height = 0;
    double avg_width = 0.0;
    std::vector<Stroke> strokes;
};

/// Serializes with coordinates and avg_width rounded to 4 decimals.
std::string to_json(const OnlineTrace& trace);

/// Throws FormatError (carrying the byte offset) for malformed JSON and
/// ValidationError naming the field for schema violations.
OnlineTrace trace_from_json(std::string_view bytes);

struct SvgOptions {
    /// Source bitmap drawn underneath the strokes, embedded as PNG.
    std::optional<GrayImage> underlay;
    double stroke_width = 1.5;
};

std::string to_svg(const OnlineTrace& trace, const SvgOptions& options = {});

/// "stroke_id,x,y,t" rows.
std::string to_csv(const OnlineTrace& trace);

/// Arc-length uniform resampling at `spacing` px. Keeps the first and last
/// point; the final gap may be shorter than `spacing`.
Stroke resample(const Stroke& stroke, double spacing);

double arc_length(const Stroke& stroke);

/// Points as a plain polyline.
std::vector<Point> positions(const Stroke& stroke);

/// Rounds to 4 decimal places, the precision of the JSON schema.
double quantize(double value);

} // namespace stroketrace

#endif
