#include "fingercount/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace fingercount {

void PipelineConfig::validate() const {
    if (bg_threshold < 1 || bg_threshold > 255) {
        throw std::invalid_argument("bg_threshold must be in [1,255]");
    }
    if (downsample_factor < 1) throw std::invalid_argument("downsample_factor must be >= 1");
    scan.validate();
}

PipelineResult process_frame(const GrayImage& background, const GrayImage& frame,
                             const PipelineConfig& cfg) {
    cfg.validate();
    if (!background.same_size(frame)) {
        throw std::invalid_argument("process_frame: frame/background dimension mismatch");
    }
    const GrayImage bg = gaussian_blur_5x5(background);
    BinaryImage mask = cfg.blur_frame
                           ? background_subtract(gaussian_blur_5x5(frame), bg, cfg.bg_threshold)
                           : background_subtract(frame, bg, cfg.bg_threshold);
    mask = denoise_7of9(mask);
    mask = downsample(mask, cfg.downsample_factor);
    return {count_fingers(mask, cfg.scan), cfg.downsample_factor};
}

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kGreen{0, 255, 0};
constexpr Rgb kYellow{255, 255, 0};
constexpr Rgb kRed{255, 0, 0};

void draw_line(ColorImage& img, const LineG& line, Rgb color) {
    for (const Pixel& px : raster_locus(line, img.width, img.height)) {
        img.set_rgb(px.x, px.y, color.r, color.g, color.b);
    }
}

void draw_dot(ColorImage& img, Point p, Rgb color) {
    const long cx = std::lround(p.x);
    const long cy = std::lround(p.y);
    for (long y = cy - 1; y <= cy + 1; ++y) {
        for (long x = cx - 1; x <= cx + 1; ++x) {
            if (x >= 0 && x < img.width && y >= 0 && y < img.height) {
                img.set_rgb(static_cast<int>(x), static_cast<int>(y), color.r, color.g, color.b);
            }
        }
    }
}

void collect_nodes(const SegmentNode& node, std::vector<const SegmentNode*>& out) {
    out.push_back(&node);
    for (const SegmentNode& child : node.children) collect_nodes(child, out);
}

}  // namespace

ColorImage annotate(const DetectionResult& result, const BinaryImage& base) {
    ColorImage out = ColorImage::blank(base.width, base.height);
    for (int y = 0; y < base.height; ++y) {
        for (int x = 0; x < base.width; ++x) {
            if (base.at(x, y)) out.set_rgb(x, y, 255, 255, 255);
        }
    }

    std::vector<const SegmentNode*> nodes;
    collect_nodes(result.root, nodes);

    // hand, base lines, split lines, then dots — dots must stay visible
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (count_white(nodes[i]->image) == 0) continue;
        draw_line(out, nodes[i]->base_line, i == 0 ? kWhite : kGreen);
    }
    for (const SegmentNode* node : nodes) {
        if (node->split_line) draw_line(out, *node->split_line, kYellow);
    }
    for (const SegmentNode* node : nodes) {
        if (node->valley) draw_dot(out, node->valley->position, kYellow);
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (count_white(nodes[i]->image) == 0) continue;
        draw_dot(out, nodes[i]->centroid, kRed);
    }
    return out;
}

}  // namespace fingercount
