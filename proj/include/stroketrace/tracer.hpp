#ifndef STROKETRACE_TRACER_HPP
#define STROKETRACE_TRACER_HPP

#include "stroketrace/geometry.hpp"
#include "stroketrace/raster.hpp"
#include "stroketrace/trace_model.hpp"
#include "stroketrace/width.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace stroketrace {

/// Size of the virtual truck, all in pixels.
struct TruckGeometry {
    double track_width = 1.0;   ///< separation of the two wheel centres
    double wheel_radius = 0.5;  ///< radius of each wheel's sensing disk
    double step = 0.5;          ///< advance per tick
    double lookahead = 2.0;     ///< length of the dead-end probe corridor
};

/// Multiples of the track width used to size the rest of the truck.
struct TruckProportions {
    double wheel_radius = 0.25;
    double step = 0.5;
    double lookahead = 2.0;
};

enum class SteeringLaw {
    /// Pick the heading within the clamp whose next position best balances
    /// the wheels; ties go to the smallest turn.
    Balance,
    /// heading += gain * (R - L) / (R + L), clamped.
    Proportional,
};

/// Steering and bookkeeping constants. Defaults are the tuned values the
/// CLI exposes under --expert.
struct TracerParams {
    SteeringLaw law = SteeringLaw::Balance;
    double gain = 0.35;                        ///< proportional law, rad per unit imbalance
    double max_turn = std::numbers::pi / 6.0;  ///< per-tick heading clamp
    int turn_candidates = 6;                   ///< balance law: headings tried per side
    double turn_penalty = 0.0;                 ///< balance law: score cost per radian turned
    /// Both wheels at least this full means the road is wider than the
    /// truck (a crossing): hold the heading.
    double junction_fill = 0.75;
    /// Fraction of the disk of radius track_width around the truck covered by
    /// road at or above which the truck is at a crossing and holds its heading.
    double junction_density = 0.65;
    int heading_probes = 16;
    double residue_fraction = 0.7;
    /// Strokes shorter than this many lookaheads that border another stroke's
    /// road are spurs left over at crossings and are dropped.
    double spur_lookaheads = 3.0;
    double runaway_factor = 20.0;              ///< max_ticks = factor * foreground / step
};

struct TruckState {
    Point position;
    double heading = 0.0;  ///< radians in [0, 2pi), 0 = +x, pi/2 = +y
    std::int64_t ticks = 0;
    /// Distance driven since the footprint last consumed a new pixel.
    double stale_distance = 0.0;
};

struct WheelCounts {
    int left = 0;
    int right = 0;
    int left_area = 0;   ///< in-image pixel centres under the left wheel
    int right_area = 0;
};

/// Record of road already covered by emitted strokes. Views `road`, which
/// must outlive it. Only foreground pixels are ever marked.
class TraversalMask {
public:
    explicit TraversalMask(const BinaryImage& road);

    const BinaryImage& road() const noexcept { return *road_; }
    int width() const noexcept { return road_->width(); }
    int height() const noexcept { return road_->height(); }

    bool visited(int x, int y) const { return visited_[index(x, y)] != 0; }
    bool unvisited_road(int x, int y) const noexcept {
        return road_->foreground(x, y) && visited_[index(x, y)] == 0;
    }

    /// Marks a foreground pixel; returns true if it was newly marked.
    bool mark(int x, int y);
    /// Marks every foreground pixel whose centre lies within `radius` of
    /// `centre`; returns the number newly marked.
    int consume_disk(Point centre, double radius);

    std::size_t visited_count() const noexcept { return visited_total_; }
    std::span<const std::uint8_t> cells() const noexcept { return visited_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(road_->width()) + static_cast<std::size_t>(x);
    }

    const BinaryImage* road_;
    std::vector<std::uint8_t> visited_;
    std::size_t visited_total_ = 0;
};

/// Truck sized from the average stroke width. Throws ValidationError when
/// avg_width < 1 or truck_scale <= 0.
TruckGeometry derive_geometry(double avg_width, double truck_scale = 1.0, const TruckProportions& proportions = {});
TruckGeometry derive_geometry(const WidthEstimate& width, double truck_scale = 1.0,
                              const TruckProportions& proportions = {});

/// First unvisited foreground pixel in row-major order (top to bottom,
/// left to right within a row).
std::optional<Pixel> find_start(const BinaryImage& img, const TraversalMask& mask);

/// Number of unvisited foreground pixels within `half_width` of the segment
/// from `from` along `heading` for `length` pixels.
int corridor_count(const TraversalMask& mask, Point from, double heading, double length, double half_width);

/// Direction (one of `probes` evenly spaced headings) whose lookahead
/// corridor holds the most unvisited road. Ties prefer the heading closest
/// to 0, then closest to pi/2.
double initial_heading(const TraversalMask& mask, Point start, const TruckGeometry& geom, int probes = 16);

/// Foreground pixels (visited or not) under each wheel. The left wheel sits
/// at heading - pi/2, the right at heading + pi/2.
WheelCounts wheel_balance(const BinaryImage& img, const TruckState& state, const TruckGeometry& geom);

/// One tick of driving. Returns nullopt at the end of a stroke.
std::optional<TruckState> steer_step(TraversalMask& mask, const TruckState& state, const TruckGeometry& geom,
                                     const TracerParams& params = {});

/// Start point refined by a few mean-shift passes over the unvisited road
/// within `radius`, so a stroke found at its edge starts on its centre line.
Point centre_on_road(const TraversalMask& mask, Pixel start, double radius);

/// Per-tick hook used for stage dumps.
using TickObserver = std::function<void(const TraversalMask& mask, const TruckState& state)>;

/// Drives one stroke from `start` until it ends, consuming the road.
Stroke trace_stroke(TraversalMask& mask, Pixel start, const TruckGeometry& geom, const TracerParams& params = {},
                    const TickObserver& observer = {});

/// Traces every stroke in the image, in start-discovery order. Per-point
/// ticks count from 0 within each stroke. Only the image size is filled in
/// the result's header.
OnlineTrace trace_all(const BinaryImage& img, const TruckGeometry& geom, const TracerParams& params = {},
                      const TickObserver& observer = {});

} // namespace stroketrace

#endif
