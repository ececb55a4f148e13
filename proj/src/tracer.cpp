#include "stroketrace/tracer.hpp"

#include "stroketrace/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace stroketrace {

namespace {

// Pixel centres within `radius` of `centre`, clipped to the image.
template <typename Fn>
void for_each_in_disk(int width, int height, Point centre, double radius, Fn&& fn) {
    const double r2 = radius * radius + 1e-9;
    const int x0 = std::max(0, static_cast<int>(std::ceil(centre.x - radius - 1e-9)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(centre.x + radius + 1e-9)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(centre.y - radius - 1e-9)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(centre.y + radius + 1e-9)));
    for (int y = y0; y <= y1; ++y) {
        const double dy = y - centre.y;
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - centre.x;
            if (dx * dx + dy * dy <= r2) {
                fn(x, y);
            }
        }
    }
}

} // namespace

TraversalMask::TraversalMask(const BinaryImage& road) : road_(&road), visited_(road.size(), 0) {}

bool TraversalMask::mark(int x, int y) {
    if (!road_->foreground(x, y)) {
        return false;
    }
    std::uint8_t& cell = visited_[index(x, y)];
    if (cell != 0) {
        return false;
    }
    cell = 1;
    ++visited_total_;
    return true;
}

int TraversalMask::consume_disk(Point centre, double radius) {
    int marked = 0;
    for_each_in_disk(width(), height(), centre, radius, [&](int x, int y) {
        if (mark(x, y)) {
            ++marked;
        }
    });
    return marked;
}

TruckGeometry derive_geometry(double avg_width, double truck_scale, const TruckProportions& proportions) {
    if (!(avg_width >= 1.0)) {
        throw ValidationError("avg_width", "average width must be at least 1 px");
    }
    if (!(truck_scale > 0.0)) {
        throw ValidationError("truck_scale", "truck scale must be positive");
    }
    TruckGeometry g;
    g.track_width = std::max(1.0, truck_scale * avg_width);
    g.wheel_radius = std::max(0.5, proportions.wheel_radius * g.track_width);
    g.step = std::max(0.5, proportions.step * g.track_width);
    g.lookahead = std::max(g.step, proportions.lookahead * g.track_width);
    return g;
}

TruckGeometry derive_geometry(const WidthEstimate& width, double truck_scale, const TruckProportions& proportions) {
    return derive_geometry(width.avg_width, truck_scale, proportions);
}

std::optional<Pixel> find_start(const BinaryImage& img, const TraversalMask& mask) {
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (img.at(x, y) && !mask.visited(x, y)) {
                return Pixel{x, y};
            }
        }
    }
    return std::nullopt;
}

int corridor_count(const TraversalMask& mask, Point from, double heading, double length, double half_width) {
    const Point to = from + length * direction(heading);
    const double r = half_width + 1e-9;
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(from.x, to.x) - r)));
    const int x1 = std::min(mask.width() - 1, static_cast<int>(std::floor(std::max(from.x, to.x) + r)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(from.y, to.y) - r)));
    const int y1 = std::min(mask.height() - 1, static_cast<int>(std::floor(std::max(from.y, to.y) + r)));
    int count = 0;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (mask.unvisited_road(x, y) &&
                point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, from, to) <= r) {
                ++count;
            }
        }
    }
    return count;
}

double initial_heading(const TraversalMask& mask, Point start, const TruckGeometry& geom, int probes) {
    probes = std::max(1, probes);
    constexpr double pi = std::numbers::pi;
    double best_heading = 0.0;
    int best_count = -1;
    double best_from_right = 0.0;
    double best_from_down = 0.0;
    for (int k = 0; k < probes; ++k) {
        const double heading = 2.0 * pi * k / probes;
        const int count = corridor_count(mask, start, heading, geom.lookahead, geom.wheel_radius);
        const double from_right = std::abs(angle_difference(0.0, heading));
        const double from_down = std::abs(angle_difference(pi / 2.0, heading));
        const bool better = count > best_count ||
                            (count == best_count && (from_right < best_from_right - 1e-12 ||
                                                     (std::abs(from_right - best_from_right) <= 1e-12 &&
                                                      from_down < best_from_down - 1e-12)));
        if (better) {
            best_heading = heading;
            best_count = count;
            best_from_right = from_right;
            best_from_down = from_down;
        }
    }
    return best_heading;
}

WheelCounts wheel_balance(const BinaryImage& img, const TruckState& state, const TruckGeometry& geom) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double offset = geom.track_width / 2.0;
    const Point left = state.position + offset * direction(state.heading - half_pi);
    const Point right = state.position + offset * direction(state.heading + half_pi);
    WheelCounts counts;
    for_each_in_disk(img.width(), img.height(), left, geom.wheel_radius, [&](int x, int y) {
        counts.left += img.at(x, y) ? 1 : 0;
        ++counts.left_area;
    });
    for_each_in_disk(img.width(), img.height(), right, geom.wheel_radius, [&](int x, int y) {
        counts.right += img.at(x, y) ? 1 : 0;
        ++counts.right_area;
    });
    return counts;
}

namespace {

double imbalance(const WheelCounts& w) {
    const int total = w.left + w.right;
    return total > 0 ? static_cast<double>(w.right - w.left) / total : 0.0;
}

double steering_turn(const BinaryImage& road, const TruckState& state, const TruckGeometry& geom,
                     const TracerParams& params, const WheelCounts& here) {
    if (params.law == SteeringLaw::Proportional) {
        return std::clamp(params.gain * imbalance(here), -params.max_turn, params.max_turn);
    }
    if (here.left >= params.junction_fill * here.left_area && here.right >= params.junction_fill * here.right_area) {
        return 0.0;
    }
    int road_cells = 0;
    int cells = 0;
    for_each_in_disk(road.width(), road.height(), state.position, geom.track_width, [&](int x, int y) {
        road_cells += road.at(x, y) ? 1 : 0;
        ++cells;
    });
    if (cells > 0 && road_cells >= params.junction_density * cells) {
        return 0.0;
    }
    // The proportional suggestion breaks ties, so a truck with one wheel
    // off the road still turns toward the loaded wheel.
    const double suggested = std::clamp(params.gain * imbalance(here), -params.max_turn, params.max_turn);
    const int n = std::max(1, params.turn_candidates);
    double best_turn = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    double best_gap = std::numeric_limits<double>::infinity();
    for (int k = -n; k <= n; ++k) {
        const double turn = params.max_turn * k / n;
        TruckState probe = state;
        probe.heading = state.heading + turn;
        probe.position = state.position + geom.step * direction(probe.heading);
        const WheelCounts w = wheel_balance(road, probe, geom);
        if (w.left + w.right == 0) {
            continue;
        }
        const double score = std::abs(imbalance(w)) + params.turn_penalty * std::abs(turn);
        const double gap = std::abs(turn - suggested);
        if (score < best_score - 1e-12 || (std::abs(score - best_score) <= 1e-12 && gap < best_gap - 1e-12)) {
            best_score = score;
            best_turn = turn;
            best_gap = gap;
        }
    }
    return best_turn;
}

} // namespace

std::optional<TruckState> steer_step(TraversalMask& mask, const TruckState& state, const TruckGeometry& geom,
                                     const TracerParams& params) {
    const WheelCounts wheels = wheel_balance(mask.road(), state, geom);
    const int total = wheels.left + wheels.right;
    TruckState next = state;

    if (total > 0) {
        next.heading = normalize_angle(state.heading + steering_turn(mask.road(), state, geom, params, wheels));
    } else if (corridor_count(mask, state.position, state.heading, geom.lookahead, geom.track_width / 2.0) == 0) {
        return std::nullopt;
    }

    next.position = state.position + geom.step * direction(next.heading);
    next.ticks = state.ticks + 1;
    const int consumed = mask.consume_disk(next.position, geom.track_width / 2.0);
    next.stale_distance = consumed > 0 ? 0.0 : state.stale_distance + geom.step;

    // Driving on road that is already covered: keep going only while there
    // is fresh road ahead (a crossing), otherwise the stroke has closed on
    // itself or run into an earlier one.
    if (next.stale_distance > geom.lookahead &&
        corridor_count(mask, next.position, next.heading, geom.lookahead, geom.track_width / 2.0) == 0) {
        return std::nullopt;
    }
    return next;
}

Point centre_on_road(const TraversalMask& mask, Pixel start, double radius) {
    Point centre = to_point(start);
    for (int iter = 0; iter < 3; ++iter) {
        Point sum{};
        int n = 0;
        for_each_in_disk(mask.width(), mask.height(), centre, radius, [&](int x, int y) {
            if (mask.unvisited_road(x, y)) {
                sum = sum + Point{static_cast<double>(x), static_cast<double>(y)};
                ++n;
            }
        });
        if (n == 0) {
            break;
        }
        centre = (1.0 / n) * sum;
    }
    return centre;
}

Stroke trace_stroke(TraversalMask& mask, Pixel start, const TruckGeometry& geom, const TracerParams& params,
                    const TickObserver& observer) {
    TruckState state;
    state.position = centre_on_road(mask, start, geom.track_width / 2.0);
    state.heading = initial_heading(mask, state.position, geom, params.heading_probes);
    mask.mark(start.x, start.y);
    mask.consume_disk(state.position, geom.track_width / 2.0);

    Stroke stroke;
    stroke.points.push_back({state.position.x, state.position.y, 0});

    const auto foreground = static_cast<double>(mask.road().count_foreground());
    const auto max_ticks = static_cast<std::int64_t>(std::ceil(params.runaway_factor * foreground / geom.step));
    while (state.ticks < max_ticks) {
        const std::optional<TruckState> next = steer_step(mask, state, geom, params);
        if (!next) {
            break;
        }
        state = *next;
        stroke.points.push_back({state.position.x, state.position.y, state.ticks});
        if (observer) {
            observer(mask, state);
        }
    }
    return stroke;
}

namespace {

// The 8-connected piece of unvisited road holding `seed` is residue when it
// touches road already covered and either hugs it (at least `fraction` of
// the piece lies within `reach` of covered road) or is smaller than
// `min_area`: a sliver or stub left by a traced stroke rather than a
// stroke of its own. Isolated pieces are never residue.
bool is_residue(const TraversalMask& mask, Pixel seed, double reach, double fraction, double min_area,
                std::vector<Pixel>& piece) {
    const int w = mask.width();
    piece.clear();
    std::vector<std::uint8_t> seen(mask.road().size(), 0);
    const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };
    std::deque<Pixel> queue{seed};
    seen[idx(seed.x, seed.y)] = 1;
    while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        piece.push_back(p);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = p.x + dx;
                const int ny = p.y + dy;
                if (mask.road().contains(nx, ny) && mask.unvisited_road(nx, ny) && seen[idx(nx, ny)] == 0) {
                    seen[idx(nx, ny)] = 1;
                    queue.push_back({nx, ny});
                }
            }
        }
    }
    std::size_t hugging = 0;
    for (const Pixel& p : piece) {
        bool near = false;
        for_each_in_disk(mask.width(), mask.height(), to_point(p), reach, [&](int x, int y) {
            near = near || (mask.road().at(x, y) && mask.visited(x, y));
        });
        hugging += near ? 1 : 0;
    }
    if (hugging == 0) {
        return false;
    }
    const auto size = static_cast<double>(piece.size());
    return static_cast<double>(hugging) >= fraction * size || size < min_area;
}

} // namespace

OnlineTrace trace_all(const BinaryImage& img, const TruckGeometry& geom, const TracerParams& params,
                      const TickObserver& observer) {
    OnlineTrace trace;
    trace.width = img.width();
    trace.height = img.height();

    TraversalMask mask(img);
    std::vector<Pixel> piece;
    const double reach = std::max(1.5, geom.track_width / 2.0);
    // owner[i] is the index of the stroke that consumed pixel i, or -1.
    std::vector<int> owner(mask.cells().size(), -1);
    std::vector<Stroke> strokes;
    while (const std::optional<Pixel> start = find_start(img, mask)) {
        if (is_residue(mask, *start, reach, params.residue_fraction, geom.track_width * geom.lookahead, piece)) {
            for (const Pixel& p : piece) {
                mask.mark(p.x, p.y);
            }
            continue;
        }
        const std::vector<std::uint8_t> before(mask.cells().begin(), mask.cells().end());
        strokes.push_back(trace_stroke(mask, *start, geom, params, observer));
        const auto after = mask.cells();
        for (std::size_t i = 0; i < after.size(); ++i) {
            if (after[i] != 0 && before[i] == 0) {
                owner[i] = static_cast<int>(strokes.size()) - 1;
            }
        }
    }

    const int w = img.width();
    const int h = img.height();
    const auto borders_other = [&](int id) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (owner[static_cast<std::size_t>(y) * w + x] != id) {
                    continue;
                }
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                            continue;
                        }
                        const int o = owner[static_cast<std::size_t>(ny) * w + nx];
                        if (o >= 0 && o != id) {
                            return true;
                        }
                    }
                }
            }
        }
        return false;
    };
    const double spur_length = params.spur_lookaheads * geom.lookahead;
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        if (arc_length(strokes[i]) < spur_length && borders_other(static_cast<int>(i))) {
            continue;
        }
        strokes[i].id = static_cast<int>(trace.strokes.size());
        trace.strokes.push_back(std::move(strokes[i]));
    }
    return trace;
}

} // namespace stroketrace
