#include "fingercount/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace fingercount {

namespace {

void require_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("image dimensions must be at least 1x1");
    }
}

}  // namespace

GrayImage GrayImage::blank(int width, int height, std::uint8_t fill) {
    require_dims(width, height);
    GrayImage img;
    img.width = width;
    img.height = height;
    img.data.assign(static_cast<std::size_t>(width) * height, fill);
    return img;
}

ColorImage ColorImage::blank(int width, int height) {
    require_dims(width, height);
    ColorImage img;
    img.width = width;
    img.height = height;
    img.data.assign(static_cast<std::size_t>(width) * height * 3, 0);
    return img;
}

BinaryImage BinaryImage::blank(int width, int height, bool white) {
    require_dims(width, height);
    BinaryImage img;
    img.width = width;
    img.height = height;
    img.data.assign(static_cast<std::size_t>(width) * height, white ? 1 : 0);
    return img;
}

std::int64_t count_white(const BinaryImage& img) {
    std::int64_t n = 0;
    for (std::uint8_t v : img.data) n += v;
    return n;
}

GrayImage to_grayscale(const ColorImage& img) {
    require_dims(img.width, img.height);
    GrayImage out = GrayImage::blank(img.width, img.height);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t r = img.data[i * 3];
        const std::uint8_t g = img.data[i * 3 + 1];
        const std::uint8_t b = img.data[i * 3 + 2];
        long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
        out.data[i] = static_cast<std::uint8_t>(std::clamp(y, 0L, 255L));
    }
    return out;
}

GrayImage gaussian_blur_5x5(const GrayImage& img) {
    require_dims(img.width, img.height);
    static constexpr int kTap[5] = {1, 4, 6, 4, 1};
    const int w = img.width;
    const int h = img.height;

    // Separable passes with a single final rounding, so the result is
    // bit-identical to the full 5x5 convolution.
    std::vector<int> horiz(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sum = 0;
            for (int t = -2; t <= 2; ++t) {
                int xs = std::clamp(x + t, 0, w - 1);
                sum += kTap[t + 2] * img.at(xs, y);
            }
            horiz[static_cast<std::size_t>(y) * w + x] = sum;
        }
    }
    GrayImage out = GrayImage::blank(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sum = 0;
            for (int t = -2; t <= 2; ++t) {
                int ys = std::clamp(y + t, 0, h - 1);
                sum += kTap[t + 2] * horiz[static_cast<std::size_t>(ys) * w + x];
            }
            out.set(x, y, static_cast<std::uint8_t>((sum + 128) >> 8));
        }
    }
    return out;
}

BinaryImage background_subtract(const GrayImage& frame,
                                const GrayImage& background_blurred,
                                int threshold) {
    if (!frame.same_size(background_blurred)) {
        throw std::invalid_argument("background_subtract: dimension mismatch");
    }
    if (threshold < 1 || threshold > 255) {
        throw std::invalid_argument("background_subtract: threshold must be in [1,255]");
    }
    BinaryImage out = BinaryImage::blank(frame.width, frame.height);
    const std::size_t n = frame.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        int delta = static_cast<int>(frame.data[i]) - static_cast<int>(background_blurred.data[i]);
        out.data[i] = std::abs(delta) > threshold ? 1 : 0;
    }
    return out;
}

BinaryImage denoise_7of9(const BinaryImage& img) {
    require_dims(img.width, img.height);
    const int w = img.width;
    const int h = img.height;
    BinaryImage out = BinaryImage::blank(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int whites = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    int xs = x + dx;
                    int ys = y + dy;
                    if (xs >= 0 && xs < w && ys >= 0 && ys < h && img.at(xs, ys)) ++whites;
                }
            }
            out.set(x, y, whites >= 7);
        }
    }
    return out;
}

BinaryImage downsample(const BinaryImage& img, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
    if (img.width < factor || img.height < factor) {
        throw std::invalid_argument("downsample: image smaller than sampling factor");
    }
    const int ow = img.width / factor;
    const int oh = img.height / factor;
    BinaryImage out = BinaryImage::blank(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            out.set(x, y, img.at(x * factor, y * factor));
        }
    }
    return out;
}

PnmParseError::PnmParseError(const std::string& what, std::size_t byte_offset)
    : std::runtime_error(what + " (at byte " + std::to_string(byte_offset) + ")"),
      offset_(byte_offset) {}

namespace {

struct ByteReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    int peek() const { return pos < bytes.size() ? bytes[pos] : -1; }
    int get() { return pos < bytes.size() ? bytes[pos++] : -1; }
};

bool is_pnm_space(int c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

void skip_space_and_comments(ByteReader& r) {
    for (;;) {
        int c = r.peek();
        if (is_pnm_space(c)) {
            r.get();
        } else if (c == '#') {
            while (r.peek() != -1 && r.peek() != '\n') r.get();
        } else {
            return;
        }
    }
}

int parse_header_int(ByteReader& r, const char* what) {
    skip_space_and_comments(r);
    const std::size_t at = r.pos;
    if (r.peek() < '0' || r.peek() > '9') {
        throw PnmParseError(std::string("expected ") + what, at);
    }
    long v = 0;
    while (r.peek() >= '0' && r.peek() <= '9') {
        v = v * 10 + (r.get() - '0');
        if (v > 1000000000L) throw PnmParseError(std::string(what) + " out of range", at);
    }
    return static_cast<int>(v);
}

std::span<const std::uint8_t> take_raster(ByteReader& r, std::size_t need) {
    if (r.bytes.size() - r.pos < need) {
        throw PnmParseError("truncated pixel data", r.bytes.size());
    }
    auto out = r.bytes.subspan(r.pos, need);
    r.pos += need;
    return out;
}

}  // namespace

AnyImage decode_pnm(std::span<const std::uint8_t> bytes) {
    ByteReader r{bytes};
    if (bytes.size() < 2 || bytes[0] != 'P') throw PnmParseError("unsupported magic", 0);
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '4' && kind != '5' && kind != '6') throw PnmParseError("unsupported magic", 0);
    r.pos = 2;

    const int w = parse_header_int(r, "width");
    const int h = parse_header_int(r, "height");
    if (w < 1 || h < 1) throw PnmParseError("bad dimensions", r.pos);
    if (kind != '4') {
        skip_space_and_comments(r);
        const std::size_t at = r.pos;
        const int maxval = parse_header_int(r, "maxval");
        if (maxval != 255) throw PnmParseError("unsupported maxval", at);
    }
    if (!is_pnm_space(r.peek())) throw PnmParseError("missing raster separator", r.pos);
    r.get();  // exactly one whitespace byte before the raster

    if (kind == '5') {
        auto raster = take_raster(r, static_cast<std::size_t>(w) * h);
        GrayImage img = GrayImage::blank(w, h);
        std::copy(raster.begin(), raster.end(), img.data.begin());
        return img;
    }
    if (kind == '6') {
        auto raster = take_raster(r, static_cast<std::size_t>(w) * h * 3);
        ColorImage img = ColorImage::blank(w, h);
        std::copy(raster.begin(), raster.end(), img.data.begin());
        return img;
    }
    // P4: rows packed MSB-first, padded to whole bytes; bit 1 = PBM black.
    const std::size_t row_bytes = static_cast<std::size_t>((w + 7) / 8);
    auto raster = take_raster(r, row_bytes * h);
    BinaryImage img = BinaryImage::blank(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint8_t byte = raster[y * row_bytes + x / 8];
            const bool ink = (byte >> (7 - x % 8)) & 1;
            img.set(x, y, !ink);
        }
    }
    return img;
}

namespace {

std::vector<std::uint8_t> header_bytes(char kind, int w, int h, bool with_maxval) {
    char buf[64];
    int n = with_maxval ? std::snprintf(buf, sizeof buf, "P%c\n%d %d\n255\n", kind, w, h)
                        : std::snprintf(buf, sizeof buf, "P%c\n%d %d\n", kind, w, h);
    return std::vector<std::uint8_t>(buf, buf + n);
}

}  // namespace

std::vector<std::uint8_t> encode_pnm(const GrayImage& img) {
    require_dims(img.width, img.height);
    auto out = header_bytes('5', img.width, img.height, true);
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

std::vector<std::uint8_t> encode_pnm(const ColorImage& img) {
    require_dims(img.width, img.height);
    auto out = header_bytes('6', img.width, img.height, true);
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

std::vector<std::uint8_t> encode_pnm(const BinaryImage& img) {
    require_dims(img.width, img.height);
    auto out = header_bytes('4', img.width, img.height, false);
    const std::size_t row_bytes = static_cast<std::size_t>((img.width + 7) / 8);
    for (int y = 0; y < img.height; ++y) {
        std::size_t row_at = out.size();
        out.insert(out.end(), row_bytes, 0);
        for (int x = 0; x < img.width; ++x) {
            if (!img.at(x, y)) {  // black hand pixel -> PBM ink bit
                out[row_at + x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
            }
        }
    }
    return out;
}

AnyImage read_pnm_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return decode_pnm(bytes);
}

void write_bytes_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open file for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace fingercount
