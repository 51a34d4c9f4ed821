#include "fingercount/segmenter.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fingercount {

void ScanParams::validate() const {
    if (min_white_run < 1) throw std::invalid_argument("min_white_run must be >= 1");
    if (min_black_run < 1) throw std::invalid_argument("min_black_run must be >= 1");
    if (!(hw_ratio > 0)) throw std::invalid_argument("hw_ratio must be positive");
    if (!(angle_step_deg > 0) || angle_step_deg > 45) {
        throw std::invalid_argument("angle_step_deg must be in (0, 45]");
    }
    if (lift_offset < 0) throw std::invalid_argument("lift_offset must be >= 0");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
}

Point centroid(const BinaryImage& img) {
    std::int64_t sx = 0, sy = 0, n = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) throw std::runtime_error("empty region");
    return {static_cast<double>(sx) / n, static_cast<double>(sy) / n};
}

Point row_anchor_centroid(const BinaryImage& img) {
    for (int y = img.height - 1; y >= 0; --y) {
        std::int64_t sx = 0, n = 0;
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y)) {
                sx += x;
                ++n;
            }
        }
        if (n > 0) return {static_cast<double>(sx) / n, static_cast<double>(y)};
    }
    throw std::runtime_error("empty region");
}

std::optional<Point> line_anchor_centroid(const BinaryImage& img, const LineG& l) {
    std::int64_t sx = 0, sy = 0, n = 0;
    for (const Pixel& px : raster_locus(l, img.width, img.height)) {
        if (img.at(px.x, px.y)) {
            sx += px.x;
            sy += px.y;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return Point{static_cast<double>(sx) / n, static_cast<double>(sy) / n};
}

LineG initial_base_line(const BinaryImage& img) {
    const Point anchor = row_anchor_centroid(img);
    const Point center = centroid(img);
    if (std::abs(anchor.x - center.x) < 1e-12 && std::abs(anchor.y - center.y) < 1e-12) {
        // single-row region: the join line is undefined, use a horizontal base
        return LineG::from_coefficients(0, 1, -anchor.y);
    }
    return perpendicular_at(line_through(anchor, center), anchor);
}

double orientation_of(const LineG& base) {
    double nx = base.a();
    double ny = base.b();
    if (ny > 0) {  // point the normal image-up (negative y)
        nx = -nx;
        ny = -ny;
    }
    if (ny == 0) nx = std::abs(nx);  // vertical base line -> +90 by convention
    return std::atan2(nx, -ny) * 180.0 / std::numbers::pi;
}

std::vector<PixelRun> runs_along(const BinaryImage& img, std::span<const Pixel> locus) {
    std::vector<PixelRun> runs;
    for (std::size_t i = 0; i < locus.size(); ++i) {
        const RunColor color = img.at(locus[i].x, locus[i].y) ? RunColor::white : RunColor::black;
        if (!runs.empty() && runs.back().color == color) {
            ++runs.back().length;
        } else {
            runs.push_back({i, 1, color});
        }
    }
    return runs;
}

namespace {

// True when some white pixel lies strictly above the scan line, i.e. would
// be covered by a later upward translate of it.
bool white_above_line(const BinaryImage& img, const LineG& line) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.at(x, y)) continue;
            const long line_y = std::lround((-line.c() - line.a() * x) / line.b());
            if (y < line_y) return true;
        }
    }
    return false;
}

struct ScanOutcome {
    std::optional<ValleyPoint> valley;
    int k = 0;  // intercept offset of the last line examined
};

// Scans upward from translate k = start_k, blackening fully scanned lines
// in `working`, until a valley is found or no white remains at or above the
// current line.
ScanOutcome scan_for_valley(BinaryImage& working, const LineG& base,
                            const ScanParams& params, int start_k) {
    for (int k = start_k;; ++k) {
        const LineG line = translate_intercept(base, -k);
        const std::vector<Pixel> locus = raster_locus(line, working.width, working.height);

        bool any_white = false;
        for (const Pixel& px : locus) {
            if (working.at(px.x, px.y)) {
                any_white = true;
                break;
            }
        }
        if (!any_white) {
            if (!white_above_line(working, line)) return {std::nullopt, k};
            continue;
        }

        const std::vector<PixelRun> runs = runs_along(working, locus);
        for (std::size_t i = 1; i + 1 < runs.size(); ++i) {
            const PixelRun& gap = runs[i];
            if (gap.color != RunColor::black) continue;
            if (gap.length < static_cast<std::size_t>(params.min_black_run)) continue;
            if (runs[i - 1].length < static_cast<std::size_t>(params.min_white_run)) continue;
            if (runs[i + 1].length < static_cast<std::size_t>(params.min_white_run)) continue;
            std::int64_t sx = 0, sy = 0;
            for (std::size_t j = gap.start; j < gap.start + gap.length; ++j) {
                sx += locus[j].x;
                sy += locus[j].y;
            }
            const double n = static_cast<double>(gap.length);
            return {ValleyPoint{{sx / n, sy / n}, line}, k};
        }

        for (const Pixel& px : locus) working.set(px.x, px.y, false);
    }
}

LineG parallel_through(const LineG& l, Point p) {
    return LineG::from_coefficients(l.a(), l.b(), -(l.a() * p.x + l.b() * p.y));
}

}  // namespace

ValleyScan find_lowest_valley(const BinaryImage& img, const LineG& base,
                              const ScanParams& params) {
    params.validate();
    BinaryImage working = img;
    ScanOutcome outcome = scan_for_valley(working, base, params, 0);
    return {outcome.valley, std::move(working)};
}

std::optional<LineG> find_split_line(const BinaryImage& img, const ValleyPoint& valley,
                                     const ScanParams& params) {
    for (int i = 0;; ++i) {
        const double theta = 180.0 - i * params.angle_step_deg;
        if (theta < 1.0 - 1e-9) break;
        const LineG candidate = line_at_angle(valley.position, theta);
        bool blocked = false;
        for (const Pixel& px : raster_locus(candidate, img.width, img.height)) {
            if (img.at(px.x, px.y)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) return candidate;
    }
    return std::nullopt;
}

std::pair<BinaryImage, BinaryImage> split_regions(const BinaryImage& img, const LineG& split) {
    BinaryImage positive = BinaryImage::blank(img.width, img.height);
    BinaryImage negative = BinaryImage::blank(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.at(x, y)) continue;
            const double s = split.signed_value({static_cast<double>(x), static_cast<double>(y)});
            if (std::abs(s) < 1e-9) continue;  // exactly on the split line: dropped
            (s > 0 ? positive : negative).set(x, y, true);
        }
    }
    return {std::move(positive), std::move(negative)};
}

LineG child_base_line(const BinaryImage& child, const LineG& parent_scan_line,
                      const ValleyPoint& valley, const ScanParams& params) {
    if (count_white(child) == 0) throw std::runtime_error("empty region");
    const LineG fallback = parallel_through(parent_scan_line, valley.position);
    for (int k = 0;; ++k) {
        const LineG lift = translate_intercept(parent_scan_line, -(params.lift_offset + k));
        if (raster_locus(lift, child.width, child.height).empty()) {
            return fallback;  // lift line left the canvas without meeting the child
        }
        if (const auto anchor = line_anchor_centroid(child, lift)) {
            const Point center = centroid(child);
            if (std::abs(center.x - anchor->x) < 1e-9 && std::abs(center.y - anchor->y) < 1e-9) {
                return fallback;
            }
            return perpendicular_at(line_through(center, *anchor), valley.position);
        }
    }
}

LeafVerdict is_finger(const BinaryImage& img, const LineG& base, const ScanParams& params) {
    const std::int64_t area = count_white(img);
    if (area < params.area_threshold()) return LeafVerdict::rejected_area;

    const Point center = centroid(img);
    const LineG width_line = parallel_through(base, center);
    const LineG height_line = perpendicular_at(width_line, center);

    auto whites_on = [&](const LineG& l) {
        int n = 0;
        for (const Pixel& px : raster_locus(l, img.width, img.height)) {
            if (img.at(px.x, px.y)) ++n;
        }
        return n;
    };
    const int w = whites_on(width_line);
    const int h = whites_on(height_line);
    if (w == 0) return LeafVerdict::rejected_ratio;
    return h > params.hw_ratio * w ? LeafVerdict::finger : LeafVerdict::rejected_ratio;
}

namespace {

SegmentNode make_empty_leaf(BinaryImage img, const LineG& base) {
    SegmentNode node;
    node.image = std::move(img);
    node.centroid = {0, 0};
    node.base_line = base;
    node.verdict = LeafVerdict::rejected_area;
    return node;
}

// Child base lines follow the child's own axis and may exceed 45 degrees
// (an outer finger leans by fan spread plus hand tilt). Such a line cannot
// step its y-intercept, so the valley scan runs along the nearest 45-degree
// direction through the same anchor; classification still uses the natural
// base.
LineG scannable_direction(const LineG& base, Point anchor) {
    if (std::abs(base.b()) >= std::abs(base.a())) return base;
    const double a = base.a() > 0 ? 1 : -1;
    const double b = base.b() >= 0 ? 1 : -1;
    return LineG::from_coefficients(a, b, -(a * anchor.x + b * anchor.y));
}

// A tilted base line through the bottom-row anchor leaves one corner of the
// canvas below itself. The scan starts low enough that every pixel lies on
// some scan line, otherwise that corner never gets blackened and its pixels
// leak into the children.
int scan_start_offset(const LineG& scan_base, int width, int height) {
    const double y_left = -scan_base.c() / scan_base.b();
    const double y_right = (-scan_base.c() - scan_base.a() * (width - 1)) / scan_base.b();
    const int lowest = static_cast<int>(std::floor(std::min(y_left, y_right)));
    return std::min(0, lowest - (height - 1));
}

SegmentNode build_node(BinaryImage img, const LineG& base, const LineG& scan_base,
                       const ScanParams& params, int depth) {
    if (depth > params.max_depth) throw std::runtime_error("split did not converge");

    SegmentNode node;
    node.centroid = centroid(img);
    node.base_line = base;

    BinaryImage working = img;
    int resume_k = scan_start_offset(scan_base, img.width, img.height);
    for (;;) {
        const ScanOutcome scan = scan_for_valley(working, scan_base, params, resume_k);
        if (!scan.valley) {
            node.verdict = is_finger(img, base, params);
            break;
        }
        // The split line may not cross any remaining white pixel, so it is
        // searched on the blackened working copy, not the original image.
        const std::optional<LineG> split = find_split_line(working, *scan.valley, params);
        if (!split) {
            // rejected valley: blacken its line like any other fully scanned
            // one, then resume on the next line up
            for (const Pixel& px :
                 raster_locus(scan.valley->scan_line, working.width, working.height)) {
                working.set(px.x, px.y, false);
            }
            resume_k = scan.k + 1;
            continue;
        }
        node.valley = scan.valley;
        node.split_line = split;
        const LineG scan_line = scan.valley->scan_line;

        // Children are carved out of the working image, scanned-black rows
        // included. A child must not inherit pixels below its base line:
        // its own upward scan would never blacken them and they would veto
        // every split candidate of the next level.
        auto [side_a, side_b] = split_regions(working, *split);
        for (BinaryImage* side : {&side_a, &side_b}) {
            if (count_white(*side) == 0) {
                node.children.push_back(make_empty_leaf(
                    std::move(*side), parallel_through(scan_line, scan.valley->position)));
            } else {
                const LineG child_base =
                    child_base_line(*side, scan_line, *scan.valley, params);
                const LineG child_scan =
                    scannable_direction(child_base, scan.valley->position);
                node.children.push_back(
                    build_node(std::move(*side), child_base, child_scan, params, depth + 1));
            }
        }
        node.verdict = LeafVerdict::internal;
        break;
    }
    node.image = std::move(img);
    return node;
}

int count_finger_leaves(const SegmentNode& node) {
    if (node.children.empty()) return node.verdict == LeafVerdict::finger ? 1 : 0;
    int n = 0;
    for (const SegmentNode& child : node.children) n += count_finger_leaves(child);
    return n;
}

}  // namespace

DetectionResult count_fingers(const BinaryImage& img, const ScanParams& params) {
    params.validate();
    if (img.width < 1 || img.height < 1) {
        throw std::invalid_argument("count_fingers: empty canvas");
    }
    DetectionResult result;
    if (count_white(img) == 0) {
        result.root = make_empty_leaf(img, LineG::from_coefficients(0, 1, -(img.height - 1)));
        return result;
    }
    const LineG base = initial_base_line(img);
    result.root = build_node(img, base, base, params, 0);
    result.orientation_deg = orientation_of(base);
    result.finger_count = count_finger_leaves(result.root);
    return result;
}

}  // namespace fingercount
