#include "doctest.h"
#include "fingercount/pipeline.hpp"
#include "fingercount/synth.hpp"
#include "oracles.hpp"

using namespace fingercount;

namespace {

GrayImage paint(const BinaryImage& mask, std::uint8_t level) {
    GrayImage frame = GrayImage::blank(mask.width, mask.height, 0);
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        if (mask.data[i]) frame.data[i] = level;
    }
    return frame;
}

// a full-resolution three-finger hand that still resolves after 3x sampling
BinaryImage full_res_hand(int count) {
    HandSpec spec = scale_spec(canonical_hand_spec(count), 3);
    spec.canvas_width = 640;
    spec.canvas_height = 480;
    spec.palm_center = {320, 318};
    return gen_hand_mask(spec);
}

}  // namespace

TEST_CASE("process_frame: identical frames detect nothing") {
    const GrayImage bg = GrayImage::blank(60, 45, 80);
    const PipelineResult res = process_frame(bg, bg, PipelineConfig{});
    CHECK(res.detection.finger_count == 0);
    CHECK(res.downsample_factor == 3);
    CHECK(res.detection.root.image.width == 20);
    CHECK(res.detection.root.image.height == 15);
}

TEST_CASE("process_frame: painted hand is counted") {
    const BinaryImage hand = full_res_hand(3);
    const GrayImage bg = GrayImage::blank(640, 480, 0);
    const PipelineResult res = process_frame(bg, paint(hand, 255), PipelineConfig{});
    CHECK(res.detection.finger_count == 3);
}

TEST_CASE("process_frame: hand below the difference threshold vanishes") {
    const BinaryImage hand = full_res_hand(3);
    const GrayImage bg = GrayImage::blank(640, 480, 0);
    PipelineConfig cfg;  // threshold 30
    const PipelineResult res = process_frame(bg, paint(hand, 25), cfg);
    CHECK(res.detection.finger_count == 0);
}

TEST_CASE("process_frame: deterministic output") {
    const BinaryImage hand = full_res_hand(2);
    const GrayImage bg = GrayImage::blank(640, 480, 10);
    const GrayImage frame = paint(hand, 200);
    const PipelineResult a = process_frame(bg, frame, PipelineConfig{});
    const PipelineResult b = process_frame(bg, frame, PipelineConfig{});
    CHECK(a.detection.finger_count == b.detection.finger_count);
    CHECK(a.detection.root.image == b.detection.root.image);
    CHECK(encode_pnm(annotate(a.detection, a.detection.root.image)) ==
          encode_pnm(annotate(b.detection, b.detection.root.image)));
}

TEST_CASE("process_frame: factors 1 and 3 agree on wide-enough fingers") {
    const BinaryImage hand = full_res_hand(4);
    const GrayImage bg = GrayImage::blank(640, 480, 0);
    const GrayImage frame = paint(hand, 255);
    PipelineConfig cfg;
    cfg.downsample_factor = 3;
    const int at3 = process_frame(bg, frame, cfg).detection.finger_count;
    cfg.downsample_factor = 1;
    const int at1 = process_frame(bg, frame, cfg).detection.finger_count;
    CHECK(at3 == 4);
    CHECK(at1 == 4);
}

TEST_CASE("process_frame: errors") {
    const GrayImage bg = GrayImage::blank(30, 30);
    CHECK_THROWS_AS(process_frame(bg, GrayImage::blank(31, 30), PipelineConfig{}),
                    std::invalid_argument);
    PipelineConfig cfg;
    cfg.downsample_factor = 64;
    CHECK_THROWS_AS(process_frame(bg, bg, cfg), std::invalid_argument);
}

namespace {

enum class PixelClass { black, hand_or_line_white, green, yellow, red, other };

PixelClass classify(const ColorImage& img, int x, int y) {
    const std::size_t i = img.index(x, y);
    const std::uint8_t r = img.data[i], g = img.data[i + 1], b = img.data[i + 2];
    if (r == 0 && g == 0 && b == 0) return PixelClass::black;
    if (r == 255 && g == 255 && b == 255) return PixelClass::hand_or_line_white;
    if (r == 0 && g == 255 && b == 0) return PixelClass::green;
    if (r == 255 && g == 255 && b == 0) return PixelClass::yellow;
    if (r == 255 && g == 0 && b == 0) return PixelClass::red;
    return PixelClass::other;
}

int count_class(const ColorImage& img, PixelClass want) {
    int n = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (classify(img, x, y) == want) ++n;
        }
    }
    return n;
}

}  // namespace

TEST_CASE("annotate: no-valley result has only the white base line") {
    BinaryImage bar = BinaryImage::blank(10, 10);
    for (int y = 0; y < 10; ++y) {
        for (int x = 3; x <= 6; ++x) bar.set(x, y, true);
    }
    const DetectionResult res = count_fingers(bar, ScanParams{});
    REQUIRE(res.root.children.empty());
    const ColorImage img = annotate(res, bar);
    CHECK(count_class(img, PixelClass::green) == 0);
    CHECK(count_class(img, PixelClass::yellow) == 0);
    CHECK(count_class(img, PixelClass::red) == 0);
    CHECK(count_class(img, PixelClass::other) == 0);
    // base line extends beyond the hand over the black background
    int off_hand_white = 0;
    for (int x = 0; x < 10; ++x) {
        if (!bar.at(x, 9) && classify(img, x, 9) == PixelClass::hand_or_line_white) {
            ++off_hand_white;
        }
    }
    CHECK(off_hand_white == 6);
}

TEST_CASE("annotate: split produces yellow line and valley dot, red child centroids") {
    BinaryImage img = BinaryImage::blank(12, 10);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x <= 3; ++x) img.set(x, y, true);
        for (int x = 8; x <= 11; ++x) img.set(x, y, true);
    }
    const DetectionResult res = count_fingers(img, ScanParams{});
    REQUIRE(res.root.split_line.has_value());
    REQUIRE(res.root.valley.has_value());
    const ColorImage out = annotate(res, img);
    CHECK(count_class(out, PixelClass::yellow) > 0);
    CHECK(count_class(out, PixelClass::red) > 0);
    CHECK(count_class(out, PixelClass::green) > 0);

    // every yellow pixel is either on the split locus or in the 3x3 valley dot
    const auto locus = raster_locus(*res.root.split_line, 12, 10);
    const long vx = std::lround(res.root.valley->position.x);
    const long vy = std::lround(res.root.valley->position.y);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) {
            if (classify(out, x, y) != PixelClass::yellow) continue;
            const bool on_locus =
                std::find(locus.begin(), locus.end(), Pixel{x, y}) != locus.end();
            const bool in_dot = std::abs(x - vx) <= 1 && std::abs(y - vy) <= 1;
            CHECK((on_locus || in_dot));
        }
    }

    // draw order: the valley dot is intact even where lines cross it
    for (long y = vy - 1; y <= vy + 1; ++y) {
        for (long x = vx - 1; x <= vx + 1; ++x) {
            if (x >= 0 && x < 12 && y >= 0 && y < 10) {
                CHECK(classify(out, int(x), int(y)) == PixelClass::yellow);
            }
        }
    }
}

TEST_CASE("annotate: empty detection is pure black") {
    const BinaryImage empty = BinaryImage::blank(8, 8);
    const DetectionResult res = count_fingers(empty, ScanParams{});
    const ColorImage img = annotate(res, empty);
    CHECK(count_class(img, PixelClass::black) == 64);
}
