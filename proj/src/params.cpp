#include "ra3c/params.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

namespace ra3c {

template <typename T>
void rmsprop_apply(ParamSetT<T>& params, const ParamSetT<T>& grads, OptStateT<T>& opt) {
    if (!params.same_layout(grads) || !params.same_layout(opt.accum))
        throw ShapeError("rmsprop_apply: parameter/gradient/accumulator layouts disagree");
    for (size_t s = 0; s < params.segments.size(); ++s) {
        auto& p = params.segments[s].tensor.data;
        const auto& g = grads.segments[s].tensor.data;
        auto& a = opt.accum.segments[s].tensor.data;
        for (size_t i = 0; i < p.size(); ++i) {
            a[i] = opt.decay * a[i] + (T(1) - opt.decay) * g[i] * g[i];
            p[i] -= opt.learning_rate * g[i] / std::sqrt(a[i] + opt.epsilon);
        }
    }
    params.version += 1;
}

template <typename T>
double global_norm(const ParamSetT<T>& grads) {
    double sq = 0;
    for (const auto& s : grads.segments)
        for (T v : s.tensor.data) sq += double(v) * double(v);
    return std::sqrt(sq);
}

template <typename T>
void clip_global_norm(ParamSetT<T>& grads, double max_norm) {
    if (max_norm <= 0) return;
    const double norm = global_norm(grads);
    if (norm <= max_norm) return;
    const T k = T(max_norm / norm);
    for (auto& s : grads.segments)
        for (auto& v : s.tensor.data) v *= k;
}

template void rmsprop_apply<float>(ParamSetT<float>&, const ParamSetT<float>&, OptStateT<float>&);
template void rmsprop_apply<double>(ParamSetT<double>&, const ParamSetT<double>&, OptStateT<double>&);
template double global_norm<float>(const ParamSetT<float>&);
template double global_norm<double>(const ParamSetT<double>&);
template void clip_global_norm<float>(ParamSetT<float>&, double);
template void clip_global_norm<double>(ParamSetT<double>&, double);

static const char kMagic[4] = {'R', 'A', '3', 'C'};
static constexpr uint32_t kFormatVersion = 1;

std::vector<uint8_t> encode_checkpoint(const ParamSet& params) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32le(out, kFormatVersion);
    std::vector<uint8_t> payload;
    for (const auto& s : params.segments) {
        if (s.name.size() > 0xffff) throw ValueError("segment name too long");
        put_u16le(payload, uint16_t(s.name.size()));
        payload.insert(payload.end(), s.name.begin(), s.name.end());
        put_u8(payload, uint8_t(s.tensor.rank()));
        for (int d : s.tensor.shape) put_u32le(payload, uint32_t(d));
        for (float v : s.tensor.data) put_f32le(payload, v);
    }
    const uint32_t crc = crc32(payload);
    out.insert(out.end(), payload.begin(), payload.end());
    put_u32le(out, crc);
    return out;
}

ParamSet decode_checkpoint(std::span<const uint8_t> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw IoError("not a RA3C checkpoint");
    ByteReader hdr(bytes.subspan(4, 4));
    const uint32_t version = hdr.u32le();
    if (version != kFormatVersion) throw IoError("unsupported checkpoint format version " + std::to_string(version));
    auto payload = bytes.subspan(8, bytes.size() - 12);
    ByteReader crc_rd(bytes.subspan(bytes.size() - 4, 4));
    if (crc32(payload) != crc_rd.u32le()) throw IoError("checkpoint CRC mismatch");

    ParamSet out;
    ByteReader rd(payload);
    while (!rd.done()) {
        const uint16_t name_len = rd.u16le();
        auto name_bytes = rd.take(name_len);
        std::string name(name_bytes.begin(), name_bytes.end());
        const uint8_t rank = rd.u8();
        std::vector<int> shape;
        size_t count = 1;
        for (int i = 0; i < rank; ++i) {
            const uint32_t d = rd.u32le();
            if (d == 0 || d > (1u << 24)) throw IoError("checkpoint segment dimension out of range");
            shape.push_back(int(d));
            count *= d;
        }
        TensorT<float> t(shape);
        if (rd.remaining() < count * 4) throw IoError("checkpoint truncated inside segment " + name);
        for (size_t i = 0; i < count; ++i) t.data[i] = rd.f32le();
        out.segments.push_back({std::move(name), std::move(t)});
    }
    return out;
}

void save_checkpoint(const ParamSet& params, const std::string& path) {
    auto bytes = encode_checkpoint(params);
    std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!f) throw IoError("cannot open " + path + " for writing");
    if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size())
        throw IoError("short write to " + path);
}

ParamSet load_checkpoint(const std::string& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!f) throw IoError("cannot open " + path);
    std::vector<uint8_t> bytes;
    uint8_t buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f.get())) > 0) bytes.insert(bytes.end(), buf, buf + n);
    return decode_checkpoint(bytes);
}

}  // namespace ra3c
