#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fingercount/geometry.hpp"
#include "fingercount/raster.hpp"

namespace fingercount {

/// Parametric synthetic hand: a filled palm rectangle with finger
/// rectangles fanned about the palm top, the whole figure rotated by
/// `orientation_deg` about the palm center (positive = leaning toward +x).
/// With wrist_to_bottom the palm is extended downward past the canvas
/// bottom edge and clipped, so the lowest white row always lies on the
/// hand axis.
struct HandSpec {
    int canvas_width = 224;
    int canvas_height = 160;
    Point palm_center{112, 106};
    double palm_half_width = 20;
    double palm_height = 30;
    int finger_count = 5;  // 0..5
    double finger_width = 7;
    double finger_length = 42;
    double spread_deg = 12;  // angle between adjacent fingers
    double orientation_deg = 0;
    bool wrist_to_bottom = false;

    void validate() const;  // throws std::invalid_argument
};

/// Deterministic rasterization of a HandSpec. Throws when the palm or a
/// finger would leave the canvas (the wrist is clipped by design).
BinaryImage gen_hand_mask(const HandSpec& spec);

/// Two hands on one shared canvas (specs must agree on canvas size). The
/// horizontal clearance between the hands' column extents must be at least
/// `gap` pixels; overlapping or too-close hands are an error.
BinaryImage gen_two_hands(const HandSpec& a, const HandSpec& b, int gap);

/// Flips floor(density * w * h) distinct, uniformly chosen pixels.
/// Deterministic per seed; density must be in [0, 0.05].
BinaryImage add_salt_noise(const BinaryImage& img, double density, std::uint64_t seed);

/// Number of 4-connected white components (exhaustive flood fill).
int cc_count(const BinaryImage& img);

/// Fixed reference geometry for upright test hands, finger_count 0..5.
HandSpec canonical_hand_spec(int finger_count, double orientation_deg = 0);

/// Reference mask for any count 0..10; counts above 5 compose two hands
/// side by side on a double-width canvas.
BinaryImage canonical_mask(int count, double orientation_deg = 0);

/// Same hand, every length scaled by `factor` (canvas included).
HandSpec scale_spec(const HandSpec& spec, double factor);

/// Corpus-style mask with geometry jittered from `seed`, count 0..10.
BinaryImage randomized_mask(std::uint64_t seed, int count, double orientation_deg);

struct CorpusEntry {
    std::string path;  // relative to the manifest location
    int expected_count = 0;
    double orientation_deg = 0;
    double noise_density = 0;
    std::uint64_t seed = 0;
};

struct CorpusManifest {
    std::vector<CorpusEntry> entries;
};

struct CorpusParams {
    std::uint64_t seed = 1;
    int size = 500;
    int count_min = 1;
    int count_max = 10;
    double orientation_max_deg = 40;
    double noise_density = 0;
};

/// Writes `size` mask files (P4 PBM) into out_dir, counts cycling over
/// [count_min, count_max], orientations uniform in +-orientation_max_deg.
/// Byte-identical output for identical parameters.
CorpusManifest gen_corpus(const CorpusParams& params, const std::string& out_dir);

/// CSV with header `path,expected_count,orientation_deg,noise_density,seed`.
void write_manifest_csv(const CorpusManifest& manifest, const std::string& path);
CorpusManifest read_manifest_csv(const std::string& path);

}  // namespace fingercount
