#include "fingercount/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fingercount {

LineG LineG::from_coefficients(double a, double b, double c) {
    const double norm = std::hypot(a, b);
    if (!(norm > 0) || !std::isfinite(norm) || !std::isfinite(c)) {
        throw std::invalid_argument("degenerate line coefficients");
    }
    // idempotent for already-unit coefficients: dividing by 1 +- 1ulp would
    // perturb the last bit and break coefficient-wise equality
    if (std::abs(norm - 1.0) > 1e-15) {
        a /= norm;
        b /= norm;
        c /= norm;
    }
    if (a < 0 || (a == 0 && b < 0)) {
        a = -a;
        b = -b;
        c = -c;
    }
    // flush -0.0 so equal lines compare equal bit-wise
    if (a == 0) a = 0;
    if (b == 0) b = 0;
    if (c == 0) c = 0;
    LineG l;
    l.a_ = a;
    l.b_ = b;
    l.c_ = c;
    return l;
}

std::optional<std::pair<double, double>> LineG::slope_intercept() const {
    if (b_ == 0) return std::nullopt;
    return std::make_pair(-a_ / b_, -c_ / b_);
}

LineG line_through(Point p1, Point p2) {
    const double dx = p2.x - p1.x;
    const double dy = p2.y - p1.y;
    if (dx == 0 && dy == 0) throw std::invalid_argument("line_through: coincident points");
    // normal (dy, -dx) is perpendicular to the direction (dx, dy)
    const double a = dy;
    const double b = -dx;
    return LineG::from_coefficients(a, b, -(a * p1.x + b * p1.y));
}

LineG perpendicular_at(const LineG& l, Point p) {
    const double a = -l.b();
    const double b = l.a();
    return LineG::from_coefficients(a, b, -(a * p.x + b * p.y));
}

Side same_side(const LineG& l, Point p1, Point p2) {
    const double s1 = l.signed_value(p1);
    const double s2 = l.signed_value(p2);
    if (std::abs(s1) < 1e-9 || std::abs(s2) < 1e-9) return Side::on_line;
    return s1 * s2 > 0 ? Side::same : Side::opposite;
}

std::vector<Pixel> raster_locus(const LineG& l, int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("raster_locus: bad grid");
    std::vector<Pixel> out;
    if (std::abs(l.b()) >= std::abs(l.a())) {
        // within 45 degrees of horizontal: exactly one sample per column
        out.reserve(static_cast<std::size_t>(width));
        for (int x = 0; x < width; ++x) {
            const long y = std::lround((-l.c() - l.a() * x) / l.b());
            if (y >= 0 && y < height) out.push_back({x, static_cast<int>(y)});
        }
    } else {
        out.reserve(static_cast<std::size_t>(height));
        for (int y = 0; y < height; ++y) {
            const long x = std::lround((-l.c() - l.b() * y) / l.a());
            if (x >= 0 && x < width) out.push_back({static_cast<int>(x), y});
        }
    }
    return out;
}

LineG translate_intercept(const LineG& l, int k) {
    if (std::abs(l.b()) < std::abs(l.a())) {
        throw std::invalid_argument("translate_intercept: base line steeper than 45 degrees");
    }
    // y-intercept is -c/b; shifting it by k rows keeps (a, b) canonical
    return LineG::from_coefficients(l.a(), l.b(), l.c() - k * l.b());
}

LineG line_at_angle(Point p, double theta_deg) {
    if (!(theta_deg > 0) || theta_deg > 180) {
        throw std::invalid_argument("line_at_angle: theta must be in (0, 180]");
    }
    const double t = theta_deg * std::numbers::pi / 180.0;
    // direction (cos t, -sin t), normal (sin t, cos t); sin/cos residue at
    // the axes (e.g. cos(pi/2) ~ 6e-17) is snapped so 90 and 180 degree
    // lines come out exactly vertical/horizontal
    double a = std::sin(t);
    double b = std::cos(t);
    if (std::abs(a) < 1e-15) a = 0;
    if (std::abs(b) < 1e-15) b = 0;
    return LineG::from_coefficients(a, b, -(a * p.x + b * p.y));
}

}  // namespace fingercount
