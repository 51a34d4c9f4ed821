#include "fingercount/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fingercount {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Rotation about a fixed center, mapping local (upright) coordinates to
// global ones. Positive angles lean the local "up" direction toward +x,
// which in top-left image coordinates is the matrix [[c, -s], [s, c]].
struct Rotation {
    double c = 1, s = 0;
    Point center;

    static Rotation about(Point center, double angle_deg) {
        return {std::cos(angle_deg * kDegToRad), std::sin(angle_deg * kDegToRad), center};
    }
    Point to_global(Point local) const {
        const double dx = local.x - center.x;
        const double dy = local.y - center.y;
        return {center.x + c * dx - s * dy, center.y + s * dx + c * dy};
    }
    Point to_local(Point global) const {
        const double dx = global.x - center.x;
        const double dy = global.y - center.y;
        return {center.x + c * dx + s * dy, center.y - s * dx + c * dy};
    }
};

// Axis-aligned inclusive pixel rectangle; membership of real points is
// decided on half-away-from-zero rounded coordinates.
struct IntRect {
    long x0, x1, y0, y1;

    static IntRect of(double xa, double xb, double ya, double yb) {
        return {std::lround(xa), std::lround(xb), std::lround(ya), std::lround(yb)};
    }
    bool contains(Point p) const {
        const long x = std::lround(p.x);
        const long y = std::lround(p.y);
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
    void corners(Point out[4]) const {
        out[0] = {static_cast<double>(x0), static_cast<double>(y0)};
        out[1] = {static_cast<double>(x1), static_cast<double>(y0)};
        out[2] = {static_cast<double>(x0), static_cast<double>(y1)};
        out[3] = {static_cast<double>(x1), static_cast<double>(y1)};
    }
};

struct FingerShape {
    IntRect rect;
    Rotation fan;  // rotation about the finger base, relative to the palm
};

struct HandShapes {
    Rotation global;
    IntRect palm;
    bool has_wrist = false;
    IntRect wrist;
    std::vector<FingerShape> fingers;

    bool contains(Point g) const {
        const Point q = global.to_local(g);
        if (palm.contains(q)) return true;
        if (has_wrist && wrist.contains(q)) return true;
        for (const FingerShape& f : fingers) {
            if (f.rect.contains(f.fan.to_local(q))) return true;
        }
        return false;
    }
};

HandShapes build_shapes(const HandSpec& spec) {
    HandShapes shapes;
    shapes.global = Rotation::about(spec.palm_center, spec.orientation_deg);

    const double cx = spec.palm_center.x;
    const double cy = spec.palm_center.y;
    const double palm_top = cy - spec.palm_height / 2;
    const double palm_bottom = cy + spec.palm_height / 2;
    shapes.palm = IntRect::of(cx - spec.palm_half_width, cx + spec.palm_half_width,
                              palm_top, palm_bottom);

    if (spec.wrist_to_bottom) {
        // long enough that both end corners stay below the canvas bottom at
        // any tilt up to 45 degrees; the length is orientation-independent
        // so rotating a spec rotates a rigid shape, and the sampling loop
        // clips the excess
        const double reach =
            (spec.canvas_height - cy) * 1.415 + spec.palm_half_width + 2;
        shapes.has_wrist = true;
        shapes.wrist = IntRect::of(cx - spec.palm_half_width, cx + spec.palm_half_width,
                                   palm_bottom, cy + reach);
    }

    const int n = spec.finger_count;
    for (int i = 0; i < n; ++i) {
        const double pitch = 2 * spec.palm_half_width / n;
        const double base_x = cx - spec.palm_half_width + (i + 0.5) * pitch;
        const double angle = (i - (n - 1) / 2.0) * spec.spread_deg;
        FingerShape finger;
        finger.fan = Rotation::about({base_x, palm_top}, angle);
        const long left = std::lround(base_x - (spec.finger_width - 1) / 2);
        // two rows of overlap into the palm keep the finger attached at any fan angle
        finger.rect = {left, left + std::lround(spec.finger_width) - 1,
                       std::lround(palm_top - spec.finger_length), std::lround(palm_top) + 2};
        shapes.fingers.push_back(finger);
    }
    return shapes;
}

void check_fits_canvas(const HandSpec& spec, const HandShapes& shapes) {
    auto check = [&](Point global) {
        if (global.x < 0 || global.x > spec.canvas_width - 1 || global.y < 0 ||
            global.y > spec.canvas_height - 1) {
            throw std::invalid_argument("hand geometry overflows canvas");
        }
    };
    Point corners[4];
    shapes.palm.corners(corners);
    for (const Point& p : corners) check(shapes.global.to_global(p));
    for (const FingerShape& f : shapes.fingers) {
        f.rect.corners(corners);
        for (const Point& p : corners) check(shapes.global.to_global(f.fan.to_global(p)));
    }
}

}  // namespace

void HandSpec::validate() const {
    if (canvas_width < 1 || canvas_height < 1) throw std::invalid_argument("bad canvas");
    if (finger_count < 0 || finger_count > 5) {
        throw std::invalid_argument("finger_count must be in [0,5]");
    }
    if (!(palm_half_width > 0) || !(palm_height > 0)) throw std::invalid_argument("bad palm");
    if (finger_count > 0) {
        if (!(finger_width >= 1)) throw std::invalid_argument("bad finger width");
        if (!(finger_length > finger_width)) {
            throw std::invalid_argument("finger_length must exceed finger_width");
        }
        if (spread_deg < 0 || spread_deg > 45) throw std::invalid_argument("bad spread");
    }
    if (std::abs(orientation_deg) > 60) throw std::invalid_argument("orientation too steep");
}

BinaryImage gen_hand_mask(const HandSpec& spec) {
    spec.validate();
    const HandShapes shapes = build_shapes(spec);
    check_fits_canvas(spec, shapes);

    BinaryImage mask = BinaryImage::blank(spec.canvas_width, spec.canvas_height);
    for (int y = 0; y < spec.canvas_height; ++y) {
        for (int x = 0; x < spec.canvas_width; ++x) {
            if (shapes.contains({static_cast<double>(x), static_cast<double>(y)})) {
                mask.set(x, y, true);
            }
        }
    }
    return mask;
}

BinaryImage gen_two_hands(const HandSpec& a, const HandSpec& b, int gap) {
    if (gap < 1) throw std::invalid_argument("gap must be at least 1 pixel");
    if (a.canvas_width != b.canvas_width || a.canvas_height != b.canvas_height) {
        throw std::invalid_argument("two-hand specs must share one canvas");
    }
    const BinaryImage ma = gen_hand_mask(a);
    const BinaryImage mb = gen_hand_mask(b);

    auto column_extent = [](const BinaryImage& m) {
        int lo = m.width, hi = -1;
        for (int y = 0; y < m.height; ++y) {
            for (int x = 0; x < m.width; ++x) {
                if (m.at(x, y)) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
            }
        }
        return std::make_pair(lo, hi);
    };
    const auto [a_lo, a_hi] = column_extent(ma);
    const auto [b_lo, b_hi] = column_extent(mb);
    int clearance;
    if (a_hi < b_lo) {
        clearance = b_lo - a_hi - 1;
    } else if (b_hi < a_lo) {
        clearance = a_lo - b_hi - 1;
    } else {
        throw std::invalid_argument("hands overlap");
    }
    if (clearance < gap) throw std::invalid_argument("hands closer than the required gap");

    BinaryImage out = ma;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = out.data[i] | mb.data[i];
    }
    return out;
}

BinaryImage add_salt_noise(const BinaryImage& img, double density, std::uint64_t seed) {
    if (!(density >= 0) || density > 0.05) {
        throw std::invalid_argument("noise density must be in [0, 0.05]");
    }
    const std::size_t total = img.data.size();
    const std::size_t flips = static_cast<std::size_t>(density * static_cast<double>(total));
    BinaryImage out = img;
    if (flips == 0) return out;

    // partial Fisher-Yates: sampling without replacement, reproducible
    // across platforms (raw mt19937_64 output is fully specified)
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> index(total);
    for (std::size_t i = 0; i < total; ++i) index[i] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < flips; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng() % (total - j));
        std::swap(index[j], index[pick]);
        out.data[index[j]] ^= 1;
    }
    return out;
}

int cc_count(const BinaryImage& img) {
    std::vector<std::uint8_t> seen(img.data.size(), 0);
    std::vector<Pixel> stack;
    int components = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
            if (!img.data[i] || seen[i]) continue;
            ++components;
            seen[i] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                const Pixel neighbors[4] = {
                    {p.x - 1, p.y}, {p.x + 1, p.y}, {p.x, p.y - 1}, {p.x, p.y + 1}};
                for (const Pixel& q : neighbors) {
                    if (!img.in_bounds(q.x, q.y)) continue;
                    const std::size_t j = static_cast<std::size_t>(q.y) * img.width + q.x;
                    if (img.data[j] && !seen[j]) {
                        seen[j] = 1;
                        stack.push_back(q);
                    }
                }
            }
        }
    }
    return components;
}

HandSpec canonical_hand_spec(int finger_count, double orientation_deg) {
    if (finger_count < 0 || finger_count > 5) {
        throw std::invalid_argument("canonical_hand_spec: finger_count must be in [0,5]");
    }
    HandSpec spec;
    spec.canvas_width = 224;
    spec.canvas_height = 160;
    spec.palm_center = {112, 106};
    spec.finger_count = finger_count;
    spec.finger_width = 7;
    spec.finger_length = 42;
    spec.spread_deg = 12;
    spec.orientation_deg = orientation_deg;
    if (finger_count == 0) {
        // bare palm, wider than tall so the ratio test rejects it
        spec.palm_half_width = 20;
        spec.palm_height = 24;
        spec.wrist_to_bottom = false;
    } else {
        const double pitch = 13;  // finger width 7 + gap 6
        spec.palm_half_width = finger_count * pitch / 2 + 1.5;
        spec.palm_height = 30;
        spec.wrist_to_bottom = true;
    }
    return spec;
}

BinaryImage canonical_mask(int count, double orientation_deg) {
    if (count < 0 || count > 10) {
        throw std::invalid_argument("canonical_mask: count must be in [0,10]");
    }
    if (count <= 5) return gen_hand_mask(canonical_hand_spec(count, orientation_deg));
    const int left_count = count / 2;
    HandSpec left = canonical_hand_spec(left_count, orientation_deg);
    HandSpec right = canonical_hand_spec(count - left_count, orientation_deg);
    left.canvas_width = right.canvas_width = 448;
    left.palm_center.x = 112;
    right.palm_center.x = 336;
    return gen_two_hands(left, right, 8);
}

HandSpec scale_spec(const HandSpec& spec, double factor) {
    if (!(factor > 0)) throw std::invalid_argument("scale factor must be positive");
    HandSpec out = spec;
    out.canvas_width = static_cast<int>(std::lround(spec.canvas_width * factor));
    out.canvas_height = static_cast<int>(std::lround(spec.canvas_height * factor));
    out.palm_center = {spec.palm_center.x * factor, spec.palm_center.y * factor};
    out.palm_half_width = spec.palm_half_width * factor;
    out.palm_height = spec.palm_height * factor;
    out.finger_width = spec.finger_width * factor;
    out.finger_length = spec.finger_length * factor;
    return out;
}

namespace {

// engine output scaled by hand: std distributions are not portable
double uniform_pm(std::mt19937_64& rng, double magnitude) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
    return (2 * unit - 1) * magnitude;
}

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t options) {
    return rng() % options;
}

HandSpec corpus_hand(std::mt19937_64& rng, int finger_count, double orientation_deg,
                     int canvas_width, double center_x) {
    HandSpec spec;
    spec.canvas_width = canvas_width;
    spec.canvas_height = 160;
    const double finger_width = 6 + static_cast<double>(pick(rng, 3));   // 6..8
    const double gap = 5 + static_cast<double>(pick(rng, 3));            // 5..7
    spec.palm_center = {center_x, 100 + static_cast<double>(pick(rng, 9))};
    spec.finger_count = finger_count;
    spec.finger_width = finger_width;
    spec.finger_length = 34 + static_cast<double>(pick(rng, 13));        // 34..46
    spec.spread_deg = 10 + static_cast<double>(pick(rng, 5));            // 10..14
    spec.palm_half_width = finger_count * (finger_width + gap) / 2 + 1.5;
    spec.palm_height = 26 + static_cast<double>(pick(rng, 9));           // 26..34
    spec.orientation_deg = orientation_deg;
    spec.wrist_to_bottom = true;
    return spec;
}

BinaryImage corpus_mask(std::mt19937_64& rng, int count, double orientation_deg) {
    if (count <= 5) return gen_hand_mask(corpus_hand(rng, count, orientation_deg, 224, 112));
    const int left_count = count / 2;
    const HandSpec left = corpus_hand(rng, left_count, orientation_deg, 448, 112);
    const HandSpec right = corpus_hand(rng, count - left_count, orientation_deg, 448, 336);
    return gen_two_hands(left, right, 8);
}

}  // namespace

BinaryImage randomized_mask(std::uint64_t seed, int count, double orientation_deg) {
    if (count < 0 || count > 10) {
        throw std::invalid_argument("randomized_mask: count must be in [0,10]");
    }
    std::mt19937_64 rng(seed);
    return corpus_mask(rng, count, orientation_deg);
}

CorpusManifest gen_corpus(const CorpusParams& params, const std::string& out_dir) {
    if (params.size < 1) throw std::invalid_argument("corpus size must be >= 1");
    if (params.count_min < 0 || params.count_max > 10 || params.count_min > params.count_max) {
        throw std::invalid_argument("corpus counts must lie in [0,10]");
    }
    if (params.orientation_max_deg < 0 || params.orientation_max_deg > 45) {
        throw std::invalid_argument("orientation_max_deg must be in [0,45]");
    }
    std::filesystem::create_directories(out_dir);

    CorpusManifest manifest;
    std::mt19937_64 seed_stream(params.seed);
    const int span = params.count_max - params.count_min + 1;
    for (int i = 0; i < params.size; ++i) {
        const int count = params.count_min + i % span;
        const std::uint64_t file_seed = seed_stream();
        std::mt19937_64 rng(file_seed);
        const double orientation = uniform_pm(rng, params.orientation_max_deg);

        BinaryImage mask = corpus_mask(rng, count, orientation);
        if (params.noise_density > 0) {
            mask = add_salt_noise(mask, params.noise_density, file_seed ^ 0x9e3779b97f4a7c15ULL);
        }

        char name[64];
        std::snprintf(name, sizeof name, "mask_%04d_c%02d.pbm", i, count);
        const auto bytes = encode_pnm(mask);
        write_bytes_file((std::filesystem::path(out_dir) / name).string(), bytes);
        manifest.entries.push_back({name, count, orientation, params.noise_density, file_seed});
    }
    return manifest;
}

void write_manifest_csv(const CorpusManifest& manifest, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open manifest for writing: " + path);
    f << "path,expected_count,orientation_deg,noise_density,seed\n";
    char line[256];
    for (const CorpusEntry& e : manifest.entries) {
        std::snprintf(line, sizeof line, "%s,%d,%.4f,%.6g,%llu\n", e.path.c_str(),
                      e.expected_count, e.orientation_deg, e.noise_density,
                      static_cast<unsigned long long>(e.seed));
        f << line;
    }
    if (!f) throw std::runtime_error("manifest write failed: " + path);
}

CorpusManifest read_manifest_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open manifest: " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("path,expected_count", 0) != 0) {
        throw std::runtime_error("manifest missing expected CSV header: " + path);
    }
    CorpusManifest manifest;
    std::size_t line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        CorpusEntry e;
        std::string field;
        auto next = [&](const char* what) {
            if (!std::getline(row, field, ',')) {
                throw std::runtime_error("manifest line " + std::to_string(line_no) +
                                         ": missing field " + what);
            }
            return field;
        };
        e.path = next("path");
        try {
            e.expected_count = std::stoi(next("expected_count"));
            e.orientation_deg = std::stod(next("orientation_deg"));
            e.noise_density = std::stod(next("noise_density"));
            e.seed = std::stoull(next("seed"));
        } catch (const std::exception&) {
            throw std::runtime_error("manifest line " + std::to_string(line_no) +
                                     ": malformed numeric field");
        }
        if (e.expected_count < 0 || e.expected_count > 10) {
            throw std::runtime_error("manifest line " + std::to_string(line_no) +
                                     ": expected_count out of range");
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

}  // namespace fingercount
