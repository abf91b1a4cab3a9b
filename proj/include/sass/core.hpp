#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sass {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cell {
    int x = 0;
    int y = 0;
    auto operator<=>(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline int chebyshev(Cell a, Cell b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

// 4-neighborhood in a fixed order (east, west, north, south). Order matters
// for deterministic tie-breaking everywhere neighbors are scanned.
inline std::vector<Cell> neighbors4(Cell c) {
    return {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
}

class Grid {
public:
    Grid() = default;
    Grid(int width, int height) : width_(width), height_(height), obstacle_(static_cast<size_t>(width) * height, 0) {
        if (width < 1 || height < 1) throw ValidationError("grid dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    bool is_obstacle(Cell c) const { return obstacle_[index(c)] != 0; }
    bool is_free(Cell c) const { return in_bounds(c) && !is_obstacle(c); }
    void set_obstacle(Cell c, bool v = true) { obstacle_[index(c)] = v ? 1 : 0; }

    int perimeter() const { return 2 * (width_ + height_); }

private:
    size_t index(Cell c) const {
        if (!in_bounds(c)) throw ValidationError("cell out of bounds");
        return static_cast<size_t>(c.y) * width_ + c.x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> obstacle_;
};

// xoshiro256++ seeded through splitmix64. Fully specified so that seeded runs
// reproduce bit-for-bit; the standard distributions are implementation-defined
// and are deliberately not used anywhere.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) {
        uint64_t x = seed;
        for (auto& s : s_) {
            x += 0x9e3779b97f4a7c15ull;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            s = z ^ (z >> 31);
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps it unbiased.
    int uniform_int(int lo, int hi) {
        if (lo > hi) throw ValidationError("uniform_int: empty range");
        uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return lo + static_cast<int>(v % span);
    }

    double normal() {
        // Box-Muller, no caching: two draws in, one value out.
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Marsaglia-Tsang; shape < 1 boosted through gamma(shape + 1).
    double gamma(double shape) {
        if (shape <= 0.0) throw ValidationError("gamma: shape must be positive");
        if (shape < 1.0) {
            double u = uniform01();
            while (u <= 0.0) u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        double x = gamma(a);
        double y = gamma(b);
        return x / (x + y);
    }

private:
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    uint64_t s_[4];
};

class Fnv1a64 {
public:
    void update(const void* data, size_t n) {
        auto p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ull;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    uint64_t digest() const { return h_; }

    static uint64_t of(const std::string& s) {
        Fnv1a64 h;
        h.update(s);
        return h.digest();
    }

private:
    uint64_t h_ = 0xcbf29ce484222325ull;
};

// Locale-independent shortest round-trip formatting; trace determinism
// depends on every number going through these.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string format_int(long long v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string format_hex64(uint64_t v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
    return "0x" + std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
    const char* b = s.data();
    char* end = nullptr;
    double v = std::strtod(b, &end);
    if (end != b + s.size() || s.empty()) throw ValidationError("bad number: '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("bad integer: '" + s + "'");
    return v;
}

}  // namespace sass
