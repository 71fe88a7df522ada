#pragma once

#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ra3c {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct ValueError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct ProtocolError : Error {
    using Error::Error;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based seed splitting: every consumer of randomness gets its own
// (stream, counter) pair hashed against the master seed, so adding workers
// or episodes never perturbs unrelated streams.
enum class SeedStream : uint64_t {
    WeightsInit = 1,
    WorkerPolicy = 2,
    WorkerRespawn = 3,
    TrackGen = 4,
    Episode = 5,
    Eval = 6,
    PhysicsJitter = 7,
    Palette = 8,
};

inline uint64_t derive_seed(uint64_t master, SeedStream stream, uint64_t counter = 0) {
    return splitmix64(splitmix64(master ^ (static_cast<uint64_t>(stream) << 56)) + counter);
}

// mt19937_64 with portable float mapping (we never use std distributions,
// whose output is implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n)
    int uniform_int(int n) { return static_cast<int>(uniform() * n); }

private:
    std::mt19937_64 gen_;
};

// --- little-endian packing -------------------------------------------------

inline void put_u8(std::vector<uint8_t>& b, uint8_t v) { b.push_back(v); }
inline void put_u16le(std::vector<uint8_t>& b, uint16_t v) {
    b.push_back(uint8_t(v & 0xff));
    b.push_back(uint8_t(v >> 8));
}
inline void put_u32le(std::vector<uint8_t>& b, uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(uint8_t((v >> (8 * i)) & 0xff));
}
inline void put_u64le(std::vector<uint8_t>& b, uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(uint8_t((v >> (8 * i)) & 0xff));
}
inline void put_f32le(std::vector<uint8_t>& b, float v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32le(b, u);
}

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16le() {
        auto p = take(2);
        return uint16_t(p[0]) | uint16_t(p[1]) << 8;
    }
    uint32_t u32le() {
        auto p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
        return v;
    }
    uint64_t u64le() {
        auto p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
        return v;
    }
    float f32le() {
        uint32_t u = u32le();
        float v;
        std::memcpy(&v, &u, 4);
        return v;
    }
    std::span<const uint8_t> take(size_t n) {
        if (remaining() < n) throw ProtocolError("byte stream underflow");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

// Standard reflected CRC-32 (poly 0xEDB88320); crc32("123456789") == 0xCBF43926.
inline uint32_t crc32(std::span<const uint8_t> data, uint32_t seed = 0) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    uint32_t c = ~seed;
    for (uint8_t byte : data) c = table[(c ^ byte) & 0xff] ^ (c >> 8);
    return ~c;
}

inline double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

constexpr double kPi = 3.14159265358979323846;

// Wrap angle to (-pi, pi].
inline double wrap_angle(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a <= -kPi) a += 2 * kPi;
    return a;
}

}  // namespace ra3c
