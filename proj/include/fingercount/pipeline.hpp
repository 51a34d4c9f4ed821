#pragma once

#include "fingercount/raster.hpp"
#include "fingercount/segmenter.hpp"

namespace fingercount {

struct PipelineConfig {
    int bg_threshold = 30;      // luminance delta for background subtraction
    int downsample_factor = 3;  // speed/range trade-off
    bool blur_frame = false;    // blur incoming frames too, not just the background
    ScanParams scan;

    void validate() const;
};

/// Detection plus the factor needed to map result coordinates (which live
/// in downsampled space) back to frame coordinates.
struct PipelineResult {
    DetectionResult detection;
    int downsample_factor = 1;
};

/// blur(background) -> subtract -> denoise -> downsample -> count_fingers.
/// The binary image the detection ran on is detection.root.image.
PipelineResult process_frame(const GrayImage& background, const GrayImage& frame,
                             const PipelineConfig& cfg);

/// Debug rendering: hand in white on black, first base line white, child
/// base lines green, split lines yellow, valley dots yellow, child
/// centroids red. Lines are drawn before dots so dots stay visible.
ColorImage annotate(const DetectionResult& result, const BinaryImage& base);

}  // namespace fingercount
