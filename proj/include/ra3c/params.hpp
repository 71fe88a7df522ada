#pragma once

#include <string>
#include <vector>

#include "ra3c/tensor.hpp"

namespace ra3c {

// Ordered, named parameter segments plus a monotone update counter. The flat
// layout (concatenation of segments in order) is what travels on the wire and
// into checkpoints.
template <typename T>
struct ParamSetT {
    struct Segment {
        std::string name;
        TensorT<T> tensor;
    };
    std::vector<Segment> segments;
    uint64_t version = 0;

    size_t flat_count() const {
        size_t n = 0;
        for (const auto& s : segments) n += s.tensor.count();
        return n;
    }

    std::vector<T> flatten() const {
        std::vector<T> out;
        out.reserve(flat_count());
        for (const auto& s : segments) out.insert(out.end(), s.tensor.data.begin(), s.tensor.data.end());
        return out;
    }

    void unflatten(std::span<const T> flat) {
        if (flat.size() != flat_count())
            throw ShapeError("flat weight count " + std::to_string(flat.size()) + " does not match parameter set (" +
                             std::to_string(flat_count()) + ")");
        size_t off = 0;
        for (auto& s : segments) {
            std::copy(flat.begin() + off, flat.begin() + off + s.tensor.count(), s.tensor.data.begin());
            off += s.tensor.count();
        }
    }

    // Same segment names/shapes, zero values.
    ParamSetT zeros_like() const {
        ParamSetT z;
        z.segments.reserve(segments.size());
        for (const auto& s : segments) z.segments.push_back({s.name, TensorT<T>(s.tensor.shape)});
        return z;
    }

    bool same_layout(const ParamSetT& o) const {
        if (segments.size() != o.segments.size()) return false;
        for (size_t i = 0; i < segments.size(); ++i)
            if (segments[i].name != o.segments[i].name || segments[i].tensor.shape != o.segments[i].tensor.shape)
                return false;
        return true;
    }

    const Segment* find(const std::string& name) const {
        for (const auto& s : segments)
            if (s.name == name) return &s;
        return nullptr;
    }
};

using ParamSet = ParamSetT<float>;

// RMSProp state: one squared-gradient accumulator per parameter segment.
template <typename T>
struct OptStateT {
    ParamSetT<T> accum;  // shapes mirror the parameter set; entries stay >= 0
    T learning_rate = T(7e-4);
    T decay = T(0.99);
    T epsilon = T(0.1);

    static OptStateT for_params(const ParamSetT<T>& params, T lr, T decay, T eps) {
        OptStateT s;
        s.accum = params.zeros_like();
        s.learning_rate = lr;
        s.decay = decay;
        s.epsilon = eps;
        return s;
    }
};

using OptState = OptStateT<float>;

// accum <- decay*accum + (1-decay)*g^2 ; p <- p - lr*g/sqrt(accum+eps);
// bumps params.version by one.
template <typename T>
void rmsprop_apply(ParamSetT<T>& params, const ParamSetT<T>& grads, OptStateT<T>& opt);

template <typename T>
double global_norm(const ParamSetT<T>& grads);

// Scales all gradients so the global L2 norm is at most max_norm.
template <typename T>
void clip_global_norm(ParamSetT<T>& grads, double max_norm);

// Checkpoint file: magic "RA3C", format version u32, then per segment
// name_len u16 + name + rank u8 + dims u32... + f32 data (little-endian),
// then CRC32 of everything after the 8-byte header. No segment count: the
// reader consumes segments until only the CRC remains.
void save_checkpoint(const ParamSet& params, const std::string& path);
ParamSet load_checkpoint(const std::string& path);

std::vector<uint8_t> encode_checkpoint(const ParamSet& params);
ParamSet decode_checkpoint(std::span<const uint8_t> bytes);

}  // namespace ra3c
