#include "stroketrace/trace_model.hpp"

#include "stroketrace/error.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdio>

namespace stroketrace {

using ordered_json = nlohmann::ordered_json;

double quantize(double value) {
    const double q = std::round(value * 1e4) / 1e4;
    return q == 0.0 ? 0.0 : q;  // no "-0.0" in output
}

std::string to_json(const OnlineTrace& trace) {
    ordered_json strokes = ordered_json::array();
    for (const Stroke& stroke : trace.strokes) {
        ordered_json points = ordered_json::array();
        for (const TracePoint& p : stroke.points) {
            points.push_back(ordered_json::array({quantize(p.x), quantize(p.y), p.t}));
        }
        strokes.push_back(ordered_json{{"id", stroke.id}, {"points", std::move(points)}});
    }
    const ordered_json doc{
        {"source", trace.source},
        {"image_size", {trace.width, trace.height}},
        {"avg_width", quantize(trace.avg_width)},
        {"timing", "synthetic-ticks"},
        {"strokes", std::move(strokes)},
    };
    return doc.dump() + "\n";
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* field) {
    const auto it = obj.find(field);
    if (it == obj.end()) {
        throw ValidationError(field, std::string("missing field \"") + field + "\"");
    }
    return *it;
}

[[noreturn]] void bad_type(const std::string& field, const char* expected) {
    throw ValidationError(field, "field \"" + field + "\" must be " + expected);
}

} // namespace

OnlineTrace trace_from_json(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("trace JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) {
        bad_type("<root>", "an object");
    }

    OnlineTrace trace;
    const auto& source = require(doc, "source");
    if (!source.is_string()) {
        bad_type("source", "a string");
    }
    trace.source = source.get<std::string>();

    const auto& size = require(doc, "image_size");
    if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() || !size[1].is_number_integer()) {
        bad_type("image_size", "[width, height] integers");
    }
    trace.width = size[0].get<int>();
    trace.height = size[1].get<int>();
    if (trace.width < 0 || trace.height < 0) {
        bad_type("image_size", "non-negative");
    }

    const auto& avg = require(doc, "avg_width");
    if (!avg.is_number()) {
        bad_type("avg_width", "a number");
    }
    trace.avg_width = avg.get<double>();

    if (const auto it = doc.find("timing"); it != doc.end() && !it->is_string()) {
        bad_type("timing", "a string");
    }

    const auto& strokes = require(doc, "strokes");
    if (!strokes.is_array()) {
        bad_type("strokes", "an array");
    }
    for (const auto& s : strokes) {
        if (!s.is_object()) {
            bad_type("strokes", "an array of objects");
        }
        Stroke stroke;
        const auto& id = require(s, "id");
        if (!id.is_number_integer()) {
            bad_type("id", "an integer");
        }
        stroke.id = id.get<int>();
        if (stroke.id != static_cast<int>(trace.strokes.size())) {
            throw ValidationError("id", "stroke ids must be 0..n-1 in order");
        }
        const auto& points = require(s, "points");
        if (!points.is_array() || points.empty()) {
            bad_type("points", "a non-empty array");
        }
        for (const auto& p : points) {
            if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
                !p[2].is_number_integer()) {
                bad_type("points", "[x, y, t] triples");
            }
            TracePoint tp{p[0].get<double>(), p[1].get<double>(), p[2].get<std::int64_t>()};
            if (!stroke.points.empty() && tp.t <= stroke.points.back().t) {
                throw ValidationError("points", "ticks must increase strictly within a stroke");
            }
            stroke.points.push_back(tp);
        }
        trace.strokes.push_back(std::move(stroke));
    }
    return trace;
}

namespace {

constexpr std::array<const char*, 8> kPalette{
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
};

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", quantize(v));
    return buf;
}

std::string base64(std::string_view bytes) {
    static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) | static_cast<unsigned char>(bytes[i + 2]);
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += table[v & 63];
    }
    if (i < bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) {
            v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
        }
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += i + 1 < bytes.size() ? table[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

} // namespace

std::string to_svg(const OnlineTrace& trace, const SvgOptions& options) {
    const std::string w = std::to_string(trace.width);
    const std::string h = std::to_string(trace.height);
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" "
                      "version=\"1.1\" width=\"" + w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";

    svg += "<defs>\n";
    for (const Stroke& stroke : trace.strokes) {
        const char* color = kPalette[static_cast<std::size_t>(stroke.id) % kPalette.size()];
        svg += "<marker id=\"arrow" + std::to_string(stroke.id) +
               "\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
               "orient=\"auto\" markerUnits=\"strokeWidth\"><polygon points=\"0,0 10,5 0,10\" fill=\"" +
               color + "\"/></marker>\n";
    }
    svg += "</defs>\n";

    if (options.underlay && !options.underlay->empty()) {
        // pixel centres sit on integer coordinates, so shift the raster by half a pixel
        svg += "<image x=\"-0.5\" y=\"-0.5\" width=\"" + std::to_string(options.underlay->width()) +
               "\" height=\"" + std::to_string(options.underlay->height()) +
               "\" opacity=\"0.5\" style=\"image-rendering:pixelated\" xlink:href=\"data:image/png;base64," +
               base64(encode_png(*options.underlay)) + "\"/>\n";
    }

    for (const Stroke& stroke : trace.strokes) {
        const char* color = kPalette[static_cast<std::size_t>(stroke.id) % kPalette.size()];
        std::string d;
        for (std::size_t i = 0; i < stroke.points.size(); ++i) {
            d += i == 0 ? "M" : " L";
            d += fmt4(stroke.points[i].x) + " " + fmt4(stroke.points[i].y);
        }
        svg += "<path id=\"stroke" + std::to_string(stroke.id) + "\" d=\"" + d + "\" fill=\"none\" stroke=\"" +
               color + "\" stroke-width=\"" + fmt4(options.stroke_width) +
               "\" stroke-linecap=\"round\" stroke-linejoin=\"round\" marker-end=\"url(#arrow" +
               std::to_string(stroke.id) + ")\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string to_csv(const OnlineTrace& trace) {
    std::string out = "stroke_id,x,y,t\n";
    for (const Stroke& stroke : trace.strokes) {
        for (const TracePoint& p : stroke.points) {
            out += std::to_string(stroke.id) + "," + fmt4(p.x) + "," + fmt4(p.y) + "," + std::to_string(p.t) + "\n";
        }
    }
    return out;
}

double arc_length(const Stroke& stroke) {
    double total = 0.0;
    for (std::size_t i = 1; i < stroke.points.size(); ++i) {
        total += distance(stroke.points[i - 1].position(), stroke.points[i].position());
    }
    return total;
}

std::vector<Point> positions(const Stroke& stroke) {
    std::vector<Point> out;
    out.reserve(stroke.points.size());
    for (const TracePoint& p : stroke.points) {
        out.push_back(p.position());
    }
    return out;
}

Stroke resample(const Stroke& stroke, double spacing) {
    if (!(spacing > 0.0)) {
        throw ValidationError("spacing", "resample spacing must be positive");
    }
    if (stroke.points.size() < 2) {
        return stroke;
    }
    Stroke out{stroke.id, {}};
    const double total = arc_length(stroke);
    const auto count = static_cast<std::size_t>(std::floor(total / spacing + 1e-9));

    // walk the polyline once, emitting a point every `spacing` of arc length
    std::size_t seg = 1;
    double seg_start = 0.0;
    for (std::size_t n = 0; n <= count; ++n) {
        const double s = static_cast<double>(n) * spacing;
        while (seg + 1 < stroke.points.size()) {
            const double len = distance(stroke.points[seg - 1].position(), stroke.points[seg].position());
            if (seg_start + len >= s) {
                break;
            }
            seg_start += len;
            ++seg;
        }
        const Point a = stroke.points[seg - 1].position();
        const Point b = stroke.points[seg].position();
        const double len = distance(a, b);
        const double u = len > 0.0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
        const Point p = a + u * (b - a);
        out.points.push_back({p.x, p.y, static_cast<std::int64_t>(n)});
    }
    const TracePoint& last = stroke.points.back();
    const double tail = distance(out.points.back().position(), last.position());
    if (tail > 1e-9 * std::max(1.0, total)) {
        out.points.push_back({last.x, last.y, static_cast<std::int64_t>(out.points.size())});
    } else {
        out.points.back().x = last.x;
        out.points.back().y = last.y;
    }
    return out;
}

} // namespace stroketrace
