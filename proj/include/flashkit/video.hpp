#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "flashkit/errors.hpp"

namespace flashkit {

using Frame = std::vector<std::uint8_t>;  // row-major RGB24, width*height*3 bytes

// Non-owning view of one frame.
struct FrameView {
    const std::uint8_t* data = nullptr;
    int width = 0;
    int height = 0;

    const std::uint8_t* pixel(int x, int y) const {
        return data + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    std::size_t byte_size() const { return static_cast<std::size_t>(width) * height * 3; }
};

// Fixed-size raw RGB24 frame sequence. Immutable by convention once built;
// all analysis operates on views into it.
struct VideoBuffer {
    int width = 0;
    int height = 0;
    int fps = 1;
    std::vector<Frame> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    double duration_seconds() const { return static_cast<double>(frames.size()) / fps; }
    std::size_t frame_bytes() const { return static_cast<std::size_t>(width) * height * 3; }

    FrameView view(int i) const { return FrameView{frames[i].data(), width, height}; }

    void validate() const {
        if (width < 1 || width > 65535 || height < 1 || height > 65535)
            throw std::invalid_argument("video dimensions out of range");
        if (fps < 1) throw std::invalid_argument("fps must be >= 1");
        if (frames.empty()) throw std::invalid_argument("video must have at least one frame");
        for (const Frame& f : frames)
            if (f.size() != frame_bytes())
                throw std::invalid_argument("frame byte size does not match dimensions");
    }
};

inline VideoBuffer make_video(int width, int height, int fps) {
    VideoBuffer v;
    v.width = width;
    v.height = height;
    v.fps = fps;
    if (width < 1 || width > 65535 || height < 1 || height > 65535)
        throw std::invalid_argument("video dimensions out of range");
    if (fps < 1) throw std::invalid_argument("fps must be >= 1");
    return v;
}

// ---------------------------------------------------------------------------
// Region masks

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;
    bool operator==(const Rect&) const = default;
};

// Pixel mask over one frame, kept both as a bitmap (exact membership) and as
// the rectangle list it was built from (for mask logs).
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // width*height, 0/1
    std::vector<Rect> rects;

    bool contains(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    std::size_t pixel_count() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits) n += b;
        return n;
    }
    bool empty() const {
        for (std::uint8_t b : bits)
            if (b) return false;
        return true;
    }

    static RegionMask none(int w, int h) {
        RegionMask m;
        m.width = w;
        m.height = h;
        m.bits.assign(static_cast<std::size_t>(w) * h, 0);
        return m;
    }

    static RegionMask full(int w, int h) {
        RegionMask m;
        m.width = w;
        m.height = h;
        m.bits.assign(static_cast<std::size_t>(w) * h, 1);
        m.rects.push_back(Rect{0, 0, w, h});
        return m;
    }

    static RegionMask from_rects(int w, int h, const std::vector<Rect>& rects) {
        RegionMask m = none(w, h);
        m.rects = rects;
        for (const Rect& r : rects) {
            int x0 = std::max(0, r.x), y0 = std::max(0, r.y);
            int x1 = std::min(w, r.x + r.w), y1 = std::min(h, r.y + r.h);
            for (int y = y0; y < y1; ++y)
                std::memset(m.bits.data() + static_cast<std::size_t>(y) * w + x0, 1,
                            static_cast<std::size_t>(std::max(0, x1 - x0)));
        }
        return m;
    }
};

// ---------------------------------------------------------------------------
// FGRV1 container
//
//   "FGRV1\n"            ASCII magic
//   "W H FPS N\n"        ASCII decimal, single spaces
//   N frames             raw RGB24, no padding
//
// Bytes only, no endianness, bit-identical across platforms.

inline void write_video(const VideoBuffer& v, const std::string& path) {
    v.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "FGRV1\n"
        << v.width << ' ' << v.height << ' ' << v.fps << ' ' << v.frames.size() << '\n';
    for (const Frame& f : v.frames)
        out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size()));
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

inline VideoBuffer read_video(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);

    char magic[6];
    in.read(magic, 6);
    if (in.gcount() != 6 || std::memcmp(magic, "FGRV1\n", 6) != 0)
        throw format_error("bad magic, not an FGRV1 file: " + path);

    std::string header;
    if (!std::getline(in, header) || header.size() > 64)
        throw format_error("bad header line: " + path);
    long long w = 0, h = 0, fps = 0, n = 0;
    char trailing = 0;
    if (std::sscanf(header.c_str(), "%lld %lld %lld %lld %c", &w, &h, &fps, &n, &trailing) != 4)
        throw format_error("bad header fields: " + path);
    if (w < 1 || w > 65535 || h < 1 || h > 65535 || fps < 1 || n < 1)
        throw format_error("header values out of range: " + path);

    VideoBuffer v = make_video(static_cast<int>(w), static_cast<int>(h), static_cast<int>(fps));
    const std::size_t fb = v.frame_bytes();
    v.frames.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        Frame f(fb);
        in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(fb));
        if (static_cast<std::size_t>(in.gcount()) != fb)
            throw truncation_error("payload shorter than header promises: " + path);
        v.frames.push_back(std::move(f));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Frame classing
//
// Synthetic corpora repeat a handful of distinct frame images hundreds of
// times; grouping frames into identity classes lets per-frame analysis run
// once per class. Hash first, confirm with memcmp, so identical output is
// guaranteed for arbitrary content.

namespace detail {

inline std::uint64_t hash_bytes(const std::uint8_t* p, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        std::uint64_t word;
        std::memcpy(&word, p + i, 8);
        h ^= word;
        h *= 0x100000001b3ull;
        h ^= h >> 32;
    }
    for (; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

struct FrameClasses {
    std::vector<int> class_of;            // frame index -> class id
    std::vector<int> representative;      // class id -> first frame index
    int count() const { return static_cast<int>(representative.size()); }
};

inline FrameClasses classify_frames(const VideoBuffer& v) {
    FrameClasses fc;
    fc.class_of.resize(v.frames.size());
    std::unordered_map<std::uint64_t, std::vector<int>> buckets;
    for (std::size_t i = 0; i < v.frames.size(); ++i) {
        const Frame& f = v.frames[i];
        std::uint64_t h = hash_bytes(f.data(), f.size());
        auto& bucket = buckets[h];
        int cls = -1;
        for (int c : bucket) {
            if (v.frames[fc.representative[c]] == f) {
                cls = c;
                break;
            }
        }
        if (cls < 0) {
            cls = fc.count();
            fc.representative.push_back(static_cast<int>(i));
            bucket.push_back(cls);
        }
        fc.class_of[i] = cls;
    }
    return fc;
}

}  // namespace detail
}  // namespace flashkit
