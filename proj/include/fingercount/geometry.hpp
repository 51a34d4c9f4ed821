#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace fingercount {

struct Point {
    double x = 0;
    double y = 0;
    bool operator==(const Point&) const = default;
};

/// Integer pixel coordinate on a raster grid.
struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

/// A straight line in normalized general form a*x + b*y + c = 0.
///
/// Invariants: a^2 + b^2 = 1, and the sign is canonical (a > 0, or a == 0
/// and b > 0), so two equal lines always compare equal coefficient-wise.
/// For b != 0 the slope-intercept view is m = -a/b, y0 = -c/b; see
/// slope_intercept(). The general form has no vertical-line singularity.
class LineG {
public:
    /// Placeholder line y = 0; meaningful lines come from the factories below.
    LineG() : a_(0), b_(1), c_(0) {}

    static LineG from_coefficients(double a, double b, double c);

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }

    /// Signed distance from p to the line (coefficients are unit-normalized).
    double signed_value(Point p) const { return a_ * p.x + b_ * p.y + c_; }

    /// (slope, y-intercept) when b != 0; empty for vertical lines.
    std::optional<std::pair<double, double>> slope_intercept() const;

    bool operator==(const LineG&) const = default;

private:
    double a_, b_, c_;
};

enum class Side { same, opposite, on_line };

/// Line through two distinct points. Throws on coincident points.
LineG line_through(Point p1, Point p2);

/// Line through p perpendicular to l.
LineG perpendicular_at(const LineG& l, Point p);

/// Sign-product side test: `same` iff the signed values of p1 and p2 have
/// the same sign; `on_line` if either magnitude is below 1e-9.
Side same_side(const LineG& l, Point p1, Point p2);

/// Deterministic rasterization over a width x height grid. For lines within
/// 45 degrees of horizontal (|b| >= |a|) there is exactly one pixel per
/// column, ordered by increasing x; otherwise one pixel per row, ordered by
/// increasing y. Rounding is half-away-from-zero; pixels falling outside
/// the grid are omitted.
std::vector<Pixel> raster_locus(const LineG& l, int width, int height);

/// The line with identical direction whose y-intercept is shifted by k rows
/// (negative k moves toward smaller y, i.e. image-up). Requires
/// |b| >= |a|; steeper lines have no usable y-intercept step and throw.
LineG translate_intercept(const LineG& l, int k);

/// Line through p whose direction is (cos theta, -sin theta): theta is
/// measured from the +x axis, positive toward image-up, so theta = 90 is
/// vertical and theta = 180 horizontal. Requires theta in (0, 180].
LineG line_at_angle(Point p, double theta_deg);

enum class RunColor { black, white };

/// Maximal same-color stretch of samples along a rasterized locus;
/// `start` indexes into the locus list.
struct PixelRun {
    std::size_t start = 0;
    std::size_t length = 0;
    RunColor color = RunColor::black;
};

}  // namespace fingercount
