#include "stroketrace/synth.hpp"

#include "stroketrace/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace stroketrace {

void validate(const ScriptSpec& spec) {
    if (spec.width < 1 || spec.height < 1) {
        throw ValidationError("image_size", "image_size must be at least 1x1");
    }
    if (!(spec.pen_width >= 1.0)) {
        throw ValidationError("pen_width", "pen_width must be >= 1");
    }
    if (!(spec.noise >= 0.0 && spec.noise <= 0.2)) {
        throw ValidationError("noise", "noise must lie in [0, 0.2]");
    }
    if (spec.background < 0 || spec.background > 255 || spec.foreground < 0 || spec.foreground > 255) {
        throw ValidationError("intensity", "intensities must lie in [0, 255]");
    }
    if (!(spec.jitter_sigma >= 0.0)) {
        throw ValidationError("jitter_sigma", "jitter_sigma must be >= 0");
    }
    for (const auto& stroke : spec.strokes) {
        if (stroke.empty()) {
            throw ValidationError("strokes", "every stroke needs at least one point");
        }
        for (const Point& p : stroke) {
            if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= spec.width - 1 && p.y <= spec.height - 1)) {
                throw ValidationError("strokes", "stroke point outside image bounds");
            }
        }
    }
}

BinaryImage stamp_mask(const ScriptSpec& spec) {
    validate(spec);
    BinaryImage mask(spec.width, spec.height);
    const double r = spec.pen_width / 2.0;
    const double reach = r + 1e-9;
    for (const auto& stroke : spec.strokes) {
        for (std::size_t i = 0; i < stroke.size(); ++i) {
            const Point a = stroke[i];
            const Point b = i + 1 < stroke.size() ? stroke[i + 1] : stroke[i];
            if (i + 1 == stroke.size() && stroke.size() > 1) {
                break;
            }
            const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x, b.x) - reach)));
            const int x1 = std::min(spec.width - 1, static_cast<int>(std::floor(std::max(a.x, b.x) + reach)));
            const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(a.y, b.y) - reach)));
            const int y1 = std::min(spec.height - 1, static_cast<int>(std::floor(std::max(a.y, b.y) + reach)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    if (point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, a, b) <= reach) {
                        mask.set(x, y, true);
                    }
                }
            }
        }
    }
    return mask;
}

SynthSample rasterize(const ScriptSpec& spec) {
    const BinaryImage ink = stamp_mask(spec);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> jitter(0.0, spec.jitter_sigma > 0.0 ? spec.jitter_sigma : 1.0);
    GrayImage image(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double v = ink.at(x, y) ? spec.foreground : spec.background;
            if (spec.jitter_sigma > 0.0) {
                v += jitter(rng);
            }
            image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    if (spec.noise > 0.0) {
        std::bernoulli_distribution hit(spec.noise);
        std::bernoulli_distribution salt(0.5);
        for (std::uint8_t& v : image.pixels()) {
            if (hit(rng)) {
                v = salt(rng) ? 255 : 0;
            }
        }
    }

    SynthSample sample{std::move(image), {}};
    sample.truth.source = "synth:" + std::to_string(spec.seed);
    sample.truth.width = spec.width;
    sample.truth.height = spec.height;
    sample.truth.avg_width = spec.pen_width;
    for (const auto& polyline : spec.strokes) {
        Stroke stroke{static_cast<int>(sample.truth.strokes.size()), {}};
        for (std::size_t i = 0; i < polyline.size(); ++i) {
            stroke.points.push_back({polyline[i].x, polyline[i].y, static_cast<std::int64_t>(i)});
        }
        sample.truth.strokes.push_back(std::move(stroke));
    }
    return sample;
}

namespace {

std::mt19937_64 item_rng(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

// Random walk with bounded turn per segment, kept inside `margin` of the
// image border and within the writing cone.
std::vector<Point> random_stroke(std::mt19937_64& rng, const CorpusParams& p, int width, int height,
                                 double margin) {
    constexpr double pi = std::numbers::pi;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cone_lo = pi / 2.0 - p.writing_cone;
    const double cone_hi = pi / 2.0 + p.writing_cone;
    const double min_len = std::min(p.min_length, p.max_length);

    std::vector<Point> best;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double length = p.min_length + (p.max_length - p.min_length) * unit(rng);
        Point pos{margin + (width - 1 - 2 * margin) * unit(rng), margin + (height - 1 - 2 * margin) * unit(rng)};
        double heading = cone_lo + (cone_hi - cone_lo) * unit(rng);
        std::vector<Point> pts{pos};
        double travelled = 0.0;
        while (travelled + 1e-9 < length) {
            heading += p.max_turn * (2.0 * unit(rng) - 1.0);
            if (p.writing_cone < pi) {
                heading = std::clamp(heading, cone_lo, cone_hi);
            }
            const double seg = std::min(p.segment_length, length - travelled);
            const Point next = pos + seg * direction(heading);
            if (next.x < margin || next.y < margin || next.x > width - 1 - margin || next.y > height - 1 - margin) {
                break;
            }
            pts.push_back(next);
            pos = next;
            travelled += seg;
        }
        if (travelled >= min_len) {
            return pts;
        }
        if (pts.size() > best.size()) {
            best = std::move(pts);
        }
    }
    return best;
}

} // namespace

CorpusItem corpus_item(const CorpusParams& p, int index) {
    std::mt19937_64 rng = item_rng(p.seed, index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    ScriptSpec spec;
    spec.width = uniform_int(p.min_width, p.max_width);
    spec.height = uniform_int(p.min_height, p.max_height);
    spec.pen_width = p.min_pen + (p.max_pen - p.min_pen) * unit(rng);
    spec.noise = p.max_noise * unit(rng);
    spec.seed = rng();
    const int strokes = uniform_int(p.min_strokes, p.max_strokes);
    const double margin = spec.pen_width / 2.0 + 2.0;
    for (int s = 0; s < strokes; ++s) {
        spec.strokes.push_back(random_stroke(rng, p, spec.width, spec.height, margin));
    }

    SynthSample sample = rasterize(spec);
    char name[32];
    std::snprintf(name, sizeof name, "item_%03d", index);
    sample.truth.source = name;
    return {name, std::move(sample.image), std::move(sample.truth), std::move(spec)};
}

std::vector<CorpusItem> corpus(const CorpusParams& params) {
    if (params.count < 1) {
        throw ValidationError("count", "corpus size must be at least 1");
    }
    std::vector<CorpusItem> items;
    items.reserve(static_cast<std::size_t>(params.count));
    for (int i = 0; i < params.count; ++i) {
        items.push_back(corpus_item(params, i));
    }
    return items;
}

std::string spec_to_json(const ScriptSpec& spec) {
    nlohmann::ordered_json strokes = nlohmann::ordered_json::array();
    for (const auto& polyline : spec.strokes) {
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const Point& p : polyline) {
            pts.push_back({p.x, p.y});
        }
        strokes.push_back(std::move(pts));
    }
    const nlohmann::ordered_json doc{
        {"image_size", {spec.width, spec.height}},
        {"pen_width", spec.pen_width},
        {"noise", spec.noise},
        {"background", spec.background},
        {"foreground", spec.foreground},
        {"jitter_sigma", spec.jitter_sigma},
        {"seed", spec.seed},
        {"strokes", std::move(strokes)},
    };
    return doc.dump(2) + "\n";
}

ScriptSpec spec_from_json(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("spec JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("<root>", "spec must be a JSON object");
    }
    ScriptSpec spec;
    const auto field = [&](const char* name) -> const nlohmann::json& {
        const auto it = doc.find(name);
        if (it == doc.end()) {
            throw ValidationError(name, std::string("missing field \"") + name + "\"");
        }
        return *it;
    };
    try {
        const auto& size = field("image_size");
        if (!size.is_array() || size.size() != 2) {
            throw ValidationError("image_size", "image_size must be [width, height]");
        }
        spec.width = size[0].get<int>();
        spec.height = size[1].get<int>();
        spec.pen_width = field("pen_width").get<double>();
        spec.noise = doc.value("noise", 0.0);
        spec.background = doc.value("background", 230);
        spec.foreground = doc.value("foreground", 25);
        spec.jitter_sigma = doc.value("jitter_sigma", 8.0);
        spec.seed = doc.value("seed", std::uint64_t{0});
        const auto& strokes = field("strokes");
        if (!strokes.is_array()) {
            throw ValidationError("strokes", "strokes must be an array of polylines");
        }
        for (const auto& polyline : strokes) {
            std::vector<Point> pts;
            for (const auto& p : polyline) {
                if (!p.is_array() || p.size() != 2) {
                    throw ValidationError("strokes", "stroke points must be [x, y] pairs");
                }
                pts.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            spec.strokes.push_back(std::move(pts));
        }
    } catch (const nlohmann::json::type_error& e) {
        throw ValidationError("spec", std::string("wrong field type: ") + e.what());
    }
    validate(spec);
    return spec;
}

} // namespace stroketrace
