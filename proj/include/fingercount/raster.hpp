#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fingercount {

// All rasters share one coordinate convention: origin at the top-left
// corner, x = column index increasing rightward, y = row index increasing
// downward. "Up" therefore means decreasing y.

/// Row-major single-channel luminance raster, values in [0, 255].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static GrayImage blank(int width, int height, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, std::uint8_t v) {
        data[static_cast<std::size_t>(y) * width + x] = v;
    }
    bool same_size(const GrayImage& o) const {
        return width == o.width && height == o.height;
    }
    bool operator==(const GrayImage&) const = default;
};

/// Row-major RGB raster, three bytes per pixel, each channel in [0, 255].
struct ColorImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // length 3 * width * height

    static ColorImage blank(int width, int height);

    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
    void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::size_t i = index(x, y);
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
    bool operator==(const ColorImage&) const = default;
};

/// Binary raster: 1 = white = foreground ("hand"), 0 = black = background.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // each element 0 or 1

    static BinaryImage blank(int width, int height, bool white = false);

    bool at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v) {
        data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    bool same_size(const BinaryImage& o) const {
        return width == o.width && height == o.height;
    }
    bool operator==(const BinaryImage&) const = default;
};

std::int64_t count_white(const BinaryImage& img);

/// BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255].
GrayImage to_grayscale(const ColorImage& img);

/// 5x5 binomial blur (outer product of 1,4,6,4,1 over 256). Samples outside
/// the image replicate the nearest border pixel; results round half-up.
GrayImage gaussian_blur_5x5(const GrayImage& img);

/// Pixel is white iff |frame - background| > threshold. Threshold must be
/// in [1, 255]; both images must have identical dimensions.
BinaryImage background_subtract(const GrayImage& frame,
                                const GrayImage& background_blurred,
                                int threshold);

/// Majority filter: output pixel is white iff at least 7 of the 9 pixels in
/// its 3x3 window are white. Window cells outside the image count as black.
BinaryImage denoise_7of9(const BinaryImage& img);

/// Point sampling: output (i, j) = input (factor*i, factor*j), output
/// dimensions (w/factor, h/factor). The input must be at least
/// factor x factor pixels.
BinaryImage downsample(const BinaryImage& img, int factor);

inline BinaryImage downsample3(const BinaryImage& img) { return downsample(img, 3); }

using AnyImage = std::variant<BinaryImage, GrayImage, ColorImage>;

/// Thrown on malformed PNM input; byte_offset() is the position in the
/// input where parsing failed.
class PnmParseError : public std::runtime_error {
public:
    PnmParseError(const std::string& what, std::size_t byte_offset);
    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Decodes binary-format PNM: P4 bitmap, P5 graymap (maxval 255), P6 pixmap
/// (maxval 255). PBM polarity: a stored 0 bit is a white (hand) pixel,
/// matching the PBM convention that 1 means black ink.
AnyImage decode_pnm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_pnm(const GrayImage& img);   // P5
std::vector<std::uint8_t> encode_pnm(const ColorImage& img);  // P6
std::vector<std::uint8_t> encode_pnm(const BinaryImage& img); // P4

AnyImage read_pnm_file(const std::string& path);
void write_bytes_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace fingercount
