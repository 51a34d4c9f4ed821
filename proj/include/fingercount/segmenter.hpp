#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fingercount/geometry.hpp"
#include "fingercount/raster.hpp"

namespace fingercount {

/// Tunables for the valley scan and the finger test. Run lengths are in
/// pixels of the (possibly downsampled) working image.
struct ScanParams {
    int min_white_run = 4;      // narrowest stretch that still counts as a finger crossing
    int min_black_run = 2;      // narrowest gap that still counts as finger spread
    double hw_ratio = 1.3;      // leaf is a finger when H > hw_ratio * W
    double angle_step_deg = 1;  // split-line angle scan step
    int lift_offset = 2;        // rows the child anchor line starts above the parent scan line
    int max_depth = 32;

    /// Minimum white-pixel count for a leaf to be considered at all.
    int area_threshold() const { return min_white_run * min_white_run; }

    void validate() const;  // throws std::invalid_argument
};

/// Spatial mean of a qualifying black run between two white runs, together
/// with the scan line it was found on.
struct ValleyPoint {
    Point position;
    LineG scan_line;
};

enum class LeafVerdict { internal, finger, rejected_area, rejected_ratio };

/// One node of the recursive split tree. Images keep full-frame dimensions
/// and global coordinates; a child holds only the white pixels on its side
/// of the parent's split line. `centroid` is {0,0} for an empty region.
struct SegmentNode {
    BinaryImage image;
    Point centroid;
    LineG base_line;
    std::optional<ValleyPoint> valley;   // the valley that produced the split
    std::optional<LineG> split_line;
    std::vector<SegmentNode> children;   // empty, or exactly two
    LeafVerdict verdict = LeafVerdict::internal;
};

struct DetectionResult {
    int finger_count = 0;
    /// Degrees from vertical, in (-90, 90]; positive = hand leaning toward +x.
    double orientation_deg = 0;
    SegmentNode root;
};

/// Arithmetic mean of the white pixel coordinates. Throws "empty region"
/// when the image has no white pixel.
Point centroid(const BinaryImage& img);

/// Mean of the white pixels on the lowest (maximum-y) row that contains any.
Point row_anchor_centroid(const BinaryImage& img);

/// Mean of the white pixels on the rasterized locus of l; empty when none.
std::optional<Point> line_anchor_centroid(const BinaryImage& img, const LineG& l);

/// Perpendicular, at the bottom-row anchor, to the line joining the anchor
/// with the hand centroid. Falls back to a horizontal line through the
/// anchor row when the two centroids coincide (single-row region).
LineG initial_base_line(const BinaryImage& img);

/// Signed angle between the base line's image-up normal and the vertical
/// axis, in (-90, 90]. Positive values mean the hand leans toward +x;
/// a vertical base line maps to +90.
double orientation_of(const LineG& base);

/// Run-length encoding of the image values along a locus.
std::vector<PixelRun> runs_along(const BinaryImage& img, std::span<const Pixel> locus);

struct ValleyScan {
    std::optional<ValleyPoint> valley;
    BinaryImage scanned;  // working copy: valley-less scan lines blackened
};

/// Scans upward from the base line, one intercept step at a time, until a
/// scan line shows a white/black/white run triple meeting the minimum
/// widths (leftmost triple wins). Fully scanned lines without a valley are
/// blackened in the returned copy; the valley's own line is left intact.
/// Returns an empty valley when a scan line has no white pixel left and no
/// white pixel remains above it.
ValleyScan find_lowest_valley(const BinaryImage& img, const LineG& base,
                              const ScanParams& params);

/// First angle theta in {180, 180-step, ...} down to 1 whose line through
/// the valley point has no white pixel on its locus; empty if none.
std::optional<LineG> find_split_line(const BinaryImage& img, const ValleyPoint& valley,
                                     const ScanParams& params);

/// Partitions the white pixels by the sign of the split line: positive side
/// first, negative side second. Pixels within 1e-9 of the line are dropped.
/// Both outputs keep the parent dimensions.
std::pair<BinaryImage, BinaryImage> split_regions(const BinaryImage& img,
                                                  const LineG& split);

/// Base line for a freshly split child region: the parent scan line is
/// lifted row by row (starting lift_offset above) until it meets white
/// pixels of the child; the base is then the perpendicular, through the
/// valley, to the line joining the child centroid with that anchor. When no
/// anchor exists or the two points coincide, the result is the parent scan
/// line translated through the valley point.
LineG child_base_line(const BinaryImage& child, const LineG& parent_scan_line,
                      const ValleyPoint& valley, const ScanParams& params);

/// Leaf classification: regions below area_threshold() white pixels are
/// rejected outright; otherwise W counts white pixels on the base-parallel
/// line through the centroid, H on the perpendicular, and the leaf is a
/// finger iff H > hw_ratio * W.
LeafVerdict is_finger(const BinaryImage& img, const LineG& base, const ScanParams& params);

/// Builds the full split tree and counts the finger leaves. An image with
/// no white pixel yields count 0 and orientation 0. Throws
/// "split did not converge" if recursion exceeds max_depth.
DetectionResult count_fingers(const BinaryImage& img, const ScanParams& params);

}  // namespace fingercount
