#include "ra3c/tape.hpp"

#include <algorithm>
#include <cmath>

namespace ra3c {

template <typename T>
void TapeT<T>::check_id(Id id) const {
    if (id < 0 || size_t(id) >= nodes_.size()) throw ValueError("tape node id out of range");
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::push(Node n) {
    for (int i = 0; i < n.nin; ++i) {
        check_id(n.in[size_t(i)]);
        n.needs_grad = n.needs_grad || nodes_[size_t(n.in[size_t(i)])].needs_grad;
    }
    nodes_.push_back(std::move(n));
    return Id(nodes_.size() - 1);
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::leaf(TensorT<T> value, bool requires_grad) {
    Node n;
    n.op = Op::Leaf;
    n.needs_grad = requires_grad;
    n.val = std::move(value);
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::conv2d(Id input, Id kernels, Id bias, int stride) {
    check_id(input);
    check_id(kernels);
    check_id(bias);
    const auto& x = node(input).val;
    const auto& k = node(kernels).val;
    const auto& b = node(bias).val;
    if (x.rank() != 3 || k.rank() != 4 || b.rank() != 1)
        throw ShapeError("conv2d expects input [C,H,W], kernels [F,C,kh,kw], bias [F]");
    const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const int F = k.shape[0], KC = k.shape[1], KH = k.shape[2], KW = k.shape[3];
    if (KC != C)
        throw ShapeError("conv2d channel mismatch: input " + x.shape_str() + " vs kernels " + k.shape_str());
    if (b.shape[0] != F) throw ShapeError("conv2d bias length must equal filter count");
    if (stride < 1) throw ValueError("conv2d stride must be >= 1");
    if (H < KH || W < KW)
        throw ShapeError("conv2d input " + x.shape_str() + " smaller than kernel " + k.shape_str());
    const int OH = (H - KH) / stride + 1;
    const int OW = (W - KW) / stride + 1;

    Node n;
    n.op = Op::Conv2d;
    n.nin = 3;
    n.in = {input, kernels, bias};
    n.i0 = stride;
    n.val = TensorT<T>({F, OH, OW});
    const T* xp = x.data.data();
    const T* kp = k.data.data();
    T* op = n.val.data.data();
    for (int f = 0; f < F; ++f) {
        const T bf = b.data[size_t(f)];
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                T acc = bf;
                for (int c = 0; c < C; ++c) {
                    for (int ky = 0; ky < KH; ++ky) {
                        const T* xrow = xp + (size_t(c) * H + size_t(oy * stride + ky)) * W + size_t(ox * stride);
                        const T* krow = kp + ((size_t(f) * C + c) * KH + ky) * KW;
                        for (int kx = 0; kx < KW; ++kx) acc += xrow[kx] * krow[kx];
                    }
                }
                op[(size_t(f) * OH + oy) * OW + ox] = acc;
            }
        }
    }
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::maxpool2d(Id input, int window) {
    check_id(input);
    const auto& x = node(input).val;
    if (x.rank() != 3) throw ShapeError("maxpool2d expects input [C,H,W]");
    if (window < 1) throw ValueError("maxpool2d window must be >= 1");
    const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
    if (H % window != 0 || W % window != 0)
        throw ShapeError("maxpool2d input " + x.shape_str() + " not divisible by window " + std::to_string(window));
    const int OH = H / window, OW = W / window;

    Node n;
    n.op = Op::MaxPool2d;
    n.nin = 1;
    n.in[0] = input;
    n.i0 = window;
    n.val = TensorT<T>({C, OH, OW});
    n.aux.resize(size_t(C) * OH * OW);
    for (int c = 0; c < C; ++c) {
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                int32_t best_idx = -1;
                T best = T(0);
                for (int ky = 0; ky < window; ++ky) {
                    for (int kx = 0; kx < window; ++kx) {
                        const size_t idx = (size_t(c) * H + size_t(oy * window + ky)) * W + size_t(ox * window + kx);
                        const T v = x.data[idx];
                        // first occurrence wins on ties
                        if (best_idx < 0 || v > best) {
                            best = v;
                            best_idx = int32_t(idx);
                        }
                    }
                }
                const size_t out_idx = (size_t(c) * OH + oy) * OW + ox;
                n.val.data[out_idx] = best;
                n.aux[out_idx] = best_idx;
            }
        }
    }
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::linear(Id input, Id weight, Id bias) {
    check_id(input);
    check_id(weight);
    check_id(bias);
    const auto& x = node(input).val;
    const auto& w = node(weight).val;
    const auto& b = node(bias).val;
    if (x.rank() != 1 || w.rank() != 2 || b.rank() != 1)
        throw ShapeError("linear expects input [N], weight [M,N], bias [M]");
    const int N = x.shape[0], M = w.shape[0];
    if (w.shape[1] != N)
        throw ShapeError("linear dimension mismatch: input " + x.shape_str() + " vs weight " + w.shape_str());
    if (b.shape[0] != M) throw ShapeError("linear bias length mismatch");

    Node n;
    n.op = Op::Linear;
    n.nin = 3;
    n.in = {input, weight, bias};
    n.val = TensorT<T>({M});
    const T* xp = x.data.data();
    for (int m = 0; m < M; ++m) {
        const T* wrow = w.data.data() + size_t(m) * N;
        T acc = b.data[size_t(m)];
        for (int i = 0; i < N; ++i) acc += wrow[i] * xp[i];
        n.val.data[size_t(m)] = acc;
    }
    return push(std::move(n));
}

template <typename T>
static TensorT<T> elementwise(const TensorT<T>& x, T (*fn)(T)) {
    TensorT<T> out(x.shape);
    for (size_t i = 0; i < x.count(); ++i) out.data[i] = fn(x.data[i]);
    return out;
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::relu(Id x) {
    check_id(x);
    Node n;
    n.op = Op::Relu;
    n.nin = 1;
    n.in[0] = x;
    n.val = elementwise<T>(node(x).val, [](T v) { return v > T(0) ? v : T(0); });
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::sigmoid(Id x) {
    check_id(x);
    Node n;
    n.op = Op::Sigmoid;
    n.nin = 1;
    n.in[0] = x;
    n.val = elementwise<T>(node(x).val, [](T v) { return T(1) / (T(1) + std::exp(-v)); });
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::tanh_(Id x) {
    check_id(x);
    Node n;
    n.op = Op::Tanh;
    n.nin = 1;
    n.in[0] = x;
    n.val = elementwise<T>(node(x).val, [](T v) { return std::tanh(v); });
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::exp_(Id x) {
    check_id(x);
    Node n;
    n.op = Op::Exp;
    n.nin = 1;
    n.in[0] = x;
    n.val = elementwise<T>(node(x).val, [](T v) { return std::exp(v); });
    return push(std::move(n));
}

template <typename T>
static void check_softmax_input(const TensorT<T>& x) {
    if (x.rank() != 1 || x.shape[0] < 1) throw ShapeError("softmax expects a non-empty vector");
    if (!x.all_finite()) throw ValueError("softmax rejects non-finite logits");
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::softmax(Id logits) {
    check_id(logits);
    const auto& x = node(logits).val;
    check_softmax_input(x);
    Node n;
    n.op = Op::Softmax;
    n.nin = 1;
    n.in[0] = logits;
    n.val = TensorT<T>(x.shape);
    const T mx = *std::max_element(x.data.begin(), x.data.end());
    T denom = T(0);
    for (size_t i = 0; i < x.count(); ++i) {
        n.val.data[i] = std::exp(x.data[i] - mx);
        denom += n.val.data[i];
    }
    for (auto& v : n.val.data) v /= denom;
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::log_softmax(Id logits) {
    check_id(logits);
    const auto& x = node(logits).val;
    check_softmax_input(x);
    Node n;
    n.op = Op::LogSoftmax;
    n.nin = 1;
    n.in[0] = logits;
    n.val = TensorT<T>(x.shape);
    const T mx = *std::max_element(x.data.begin(), x.data.end());
    T denom = T(0);
    for (size_t i = 0; i < x.count(); ++i) denom += std::exp(x.data[i] - mx);
    const T lse = mx + std::log(denom);
    for (size_t i = 0; i < x.count(); ++i) n.val.data[i] = x.data[i] - lse;
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::add(Id a, Id b) {
    check_id(a);
    check_id(b);
    if (!node(a).val.same_shape(node(b).val))
        throw ShapeError("add shape mismatch: " + node(a).val.shape_str() + " vs " + node(b).val.shape_str());
    Node n;
    n.op = Op::Add;
    n.nin = 2;
    n.in = {a, b, -1};
    n.val = TensorT<T>(node(a).val.shape);
    for (size_t i = 0; i < n.val.count(); ++i) n.val.data[i] = node(a).val.data[i] + node(b).val.data[i];
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::mul(Id a, Id b) {
    check_id(a);
    check_id(b);
    if (!node(a).val.same_shape(node(b).val))
        throw ShapeError("mul shape mismatch: " + node(a).val.shape_str() + " vs " + node(b).val.shape_str());
    Node n;
    n.op = Op::Mul;
    n.nin = 2;
    n.in = {a, b, -1};
    n.val = TensorT<T>(node(a).val.shape);
    for (size_t i = 0; i < n.val.count(); ++i) n.val.data[i] = node(a).val.data[i] * node(b).val.data[i];
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::scale(Id x, T c) {
    check_id(x);
    Node n;
    n.op = Op::Scale;
    n.nin = 1;
    n.in[0] = x;
    n.f0 = c;
    n.val = TensorT<T>(node(x).val.shape);
    for (size_t i = 0; i < n.val.count(); ++i) n.val.data[i] = node(x).val.data[i] * c;
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::add_const(Id x, T c) {
    check_id(x);
    Node n;
    n.op = Op::AddC;
    n.nin = 1;
    n.in[0] = x;
    n.f0 = c;
    n.val = TensorT<T>(node(x).val.shape);
    for (size_t i = 0; i < n.val.count(); ++i) n.val.data[i] = node(x).val.data[i] + c;
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::sum(Id x) {
    check_id(x);
    Node n;
    n.op = Op::Sum;
    n.nin = 1;
    n.in[0] = x;
    T acc = T(0);
    for (T v : node(x).val.data) acc += v;
    n.val = scalar_tensor<T>(acc);
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::pick(Id x, int index) {
    check_id(x);
    const auto& v = node(x).val;
    if (v.rank() != 1) throw ShapeError("pick expects a vector");
    if (index < 0 || index >= v.shape[0]) throw ValueError("pick index out of range");
    Node n;
    n.op = Op::Pick;
    n.nin = 1;
    n.in[0] = x;
    n.i0 = index;
    n.val = scalar_tensor<T>(v.data[size_t(index)]);
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::concat2(Id a, Id b) {
    check_id(a);
    check_id(b);
    const auto& va = node(a).val;
    const auto& vb = node(b).val;
    if (va.rank() != 1 || vb.rank() != 1) throw ShapeError("concat2 expects vectors");
    Node n;
    n.op = Op::Concat2;
    n.nin = 2;
    n.in = {a, b, -1};
    n.val = TensorT<T>({va.shape[0] + vb.shape[0]});
    std::copy(va.data.begin(), va.data.end(), n.val.data.begin());
    std::copy(vb.data.begin(), vb.data.end(), n.val.data.begin() + va.shape[0]);
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::slice(Id x, int offset, int len) {
    check_id(x);
    const auto& v = node(x).val;
    if (v.rank() != 1) throw ShapeError("slice expects a vector");
    if (offset < 0 || len < 1 || offset + len > v.shape[0]) throw ValueError("slice range out of bounds");
    Node n;
    n.op = Op::Slice;
    n.nin = 1;
    n.in[0] = x;
    n.i0 = offset;
    n.i1 = len;
    n.val = TensorT<T>({len});
    std::copy(v.data.begin() + offset, v.data.begin() + offset + len, n.val.data.begin());
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::crop2d(Id x, int out_h, int out_w) {
    check_id(x);
    const auto& v = node(x).val;
    if (v.rank() != 3) throw ShapeError("crop2d expects input [C,H,W]");
    const int C = v.shape[0], H = v.shape[1], W = v.shape[2];
    if (out_h < 1 || out_w < 1 || out_h > H || out_w > W)
        throw ShapeError("crop2d target exceeds input " + v.shape_str());
    Node n;
    n.op = Op::Crop2d;
    n.nin = 1;
    n.in[0] = x;
    n.i0 = out_h;
    n.i1 = out_w;
    n.val = TensorT<T>({C, out_h, out_w});
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < out_h; ++y)
            std::copy(v.data.begin() + (size_t(c) * H + y) * W, v.data.begin() + (size_t(c) * H + y) * W + out_w,
                      n.val.data.begin() + (size_t(c) * out_h + y) * out_w);
    return push(std::move(n));
}

template <typename T>
typename TapeT<T>::Id TapeT<T>::reshape1d(Id x) {
    check_id(x);
    Node n;
    n.op = Op::Reshape1d;
    n.nin = 1;
    n.in[0] = x;
    n.val = TensorT<T>({int(node(x).val.count())}, node(x).val.data);
    return push(std::move(n));
}

template <typename T>
std::pair<typename TapeT<T>::Id, typename TapeT<T>::Id> TapeT<T>::lstm_step(Id x, Id h, Id c, const LstmParams& p) {
    const auto& hv = node(h).val;
    const auto& wv = node(p.w_h).val;
    if (hv.rank() != 1 || wv.rank() != 2) throw ShapeError("lstm_step expects h [M], w_h [4M,M]");
    const int M = hv.shape[0];
    if (wv.shape[0] != 4 * M || wv.shape[1] != M || node(c).val.shape != hv.shape)
        throw ShapeError("lstm_step parameter shapes disagree with hidden size " + std::to_string(M));

    Id zx = linear(x, p.w_x, p.bias);
    Id zh = linear(h, p.w_h, leaf(TensorT<T>({4 * M})));
    Id z = add(zx, zh);
    Id gate_i = sigmoid(slice(z, 0, M));
    Id gate_f = sigmoid(slice(z, M, M));
    Id cand = tanh_(slice(z, 2 * M, M));
    Id gate_o = sigmoid(slice(z, 3 * M, M));
    Id c_next = add(mul(gate_f, c), mul(gate_i, cand));
    Id h_next = mul(gate_o, tanh_(c_next));
    return {h_next, c_next};
}

template <typename T>
TensorT<T>& TapeT<T>::grad_buf(Id id) {
    auto& g = grads_[size_t(id)];
    if (g.data.empty()) g = TensorT<T>(nodes_[size_t(id)].val.shape);
    return g;
}

template <typename T>
TensorT<T> TapeT<T>::grad(Id id) const {
    check_id(id);
    if (size_t(id) < grads_.size() && !grads_[size_t(id)].data.empty()) return grads_[size_t(id)];
    return TensorT<T>(nodes_[size_t(id)].val.shape);
}

template <typename T>
void TapeT<T>::truncate(size_t m) {
    if (m > nodes_.size()) throw ValueError("truncate beyond tape size");
    nodes_.resize(m);
    grads_.clear();
}

template <typename T>
void TapeT<T>::backward(Id loss, bool guided) {
    check_id(loss);
    if (node(loss).val.count() != 1) throw ValueError("backward requires a scalar loss node");
    grads_.assign(nodes_.size(), TensorT<T>{});
    grad_buf(loss).data[0] = T(1);
    for (Id i = loss; i >= 0; --i) {
        if (!nodes_[size_t(i)].needs_grad) continue;
        if (grads_[size_t(i)].data.empty()) continue;
        backward_node(i, guided);
    }
}

template <typename T>
void TapeT<T>::backward_node(Id id, bool guided) {
    Node& n = nodes_[size_t(id)];
    const TensorT<T>& g = grads_[size_t(id)];
    auto wants = [&](int slot) { return nodes_[size_t(n.in[size_t(slot)])].needs_grad; };

    switch (n.op) {
        case Op::Leaf:
            break;
        case Op::Conv2d: {
            const auto& x = node(n.in[0]).val;
            const auto& k = node(n.in[1]).val;
            const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
            const int F = k.shape[0], KH = k.shape[2], KW = k.shape[3];
            const int OH = n.val.shape[1], OW = n.val.shape[2];
            const int stride = n.i0;
            const bool w_in = wants(0), w_k = wants(1), w_b = wants(2);
            T* dx = w_in ? grad_buf(n.in[0]).data.data() : nullptr;
            T* dk = w_k ? grad_buf(n.in[1]).data.data() : nullptr;
            T* db = w_b ? grad_buf(n.in[2]).data.data() : nullptr;
            const T* xp = x.data.data();
            const T* kp = k.data.data();
            for (int f = 0; f < F; ++f) {
                T bacc = T(0);
                for (int oy = 0; oy < OH; ++oy) {
                    for (int ox = 0; ox < OW; ++ox) {
                        const T gv = g.data[(size_t(f) * OH + oy) * OW + ox];
                        bacc += gv;
                        if (gv == T(0) || (!w_in && !w_k)) continue;
                        for (int c = 0; c < C; ++c) {
                            for (int ky = 0; ky < KH; ++ky) {
                                const size_t xoff = (size_t(c) * H + size_t(oy * stride + ky)) * W + size_t(ox * stride);
                                const size_t koff = ((size_t(f) * C + c) * KH + ky) * KW;
                                if (w_k) {
                                    const T* xrow = xp + xoff;
                                    for (int kx = 0; kx < KW; ++kx) dk[koff + kx] += gv * xrow[kx];
                                }
                                if (w_in) {
                                    const T* krow = kp + koff;
                                    for (int kx = 0; kx < KW; ++kx) dx[xoff + kx] += gv * krow[kx];
                                }
                            }
                        }
                    }
                }
                if (w_b) db[f] += bacc;
            }
            break;
        }
        case Op::MaxPool2d: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            for (size_t i = 0; i < n.val.count(); ++i) dx.data[size_t(n.aux[i])] += g.data[i];
            break;
        }
        case Op::Linear: {
            const auto& x = node(n.in[0]).val;
            const auto& w = node(n.in[1]).val;
            const int M = w.shape[0], N = w.shape[1];
            const bool w_in = wants(0), w_w = wants(1), w_b = wants(2);
            T* dx = w_in ? grad_buf(n.in[0]).data.data() : nullptr;
            T* dw = w_w ? grad_buf(n.in[1]).data.data() : nullptr;
            T* db = w_b ? grad_buf(n.in[2]).data.data() : nullptr;
            for (int m = 0; m < M; ++m) {
                const T gv = g.data[size_t(m)];
                if (gv == T(0)) continue;
                if (w_b) db[m] += gv;
                const T* wrow = w.data.data() + size_t(m) * N;
                T* dwrow = w_w ? dw + size_t(m) * N : nullptr;
                for (int i = 0; i < N; ++i) {
                    if (w_in) dx[i] += gv * wrow[i];
                    if (w_w) dwrow[i] += gv * x.data[size_t(i)];
                }
            }
            break;
        }
        case Op::Relu: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            for (size_t i = 0; i < n.val.count(); ++i) {
                T gv = g.data[i];
                if (guided && gv < T(0)) gv = T(0);
                if (n.val.data[i] > T(0)) dx.data[i] += gv;
            }
            break;
        }
        case Op::Sigmoid: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            for (size_t i = 0; i < n.val.count(); ++i)
                dx.data[i] += g.data[i] * n.val.data[i] * (T(1) - n.val.data[i]);
            break;
        }
        case Op::Tanh: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            for (size_t i = 0; i < n.val.count(); ++i)
                dx.data[i] += g.data[i] * (T(1) - n.val.data[i] * n.val.data[i]);
            break;
        }
        case Op::Exp: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            for (size_t i = 0; i < n.val.count(); ++i) dx.data[i] += g.data[i] * n.val.data[i];
            break;
        }
        case Op::Softmax: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            T dot = T(0);
            for (size_t i = 0; i < n.val.count(); ++i) dot += g.data[i] * n.val.data[i];
            for (size_t i = 0; i < n.val.count(); ++i) dx.data[i] += n.val.data[i] * (g.data[i] - dot);
            break;
        }
        case Op::LogSoftmax: {
            if (!wants(0)) break;
            auto& dx = grad_buf(n.in[0]);
            T gsum = T(0);
            for (size_t i = 0; i < n.val.count(); ++i) gsum += g.data[i];
            for (size_t i = 0; i < n.val.count(); ++i)
                dx.data[i] += g.data[i] - std::exp(n.val.data[i]) * gsum;
            break;
        }
        case Op::Add: {
            for (int s = 0; s < 2; ++s) {
                if (!wants(s)) continue;
                auto& d = grad_buf(n.in[size_t(s)]);
                for (size_t i = 0; i < g.count(); ++i) d.data[i] += g.data[i];
            }
            break;
        }
        case Op::Mul: {
            if (wants(0)) {
                auto& d = grad_buf(n.in[0]);
                const auto& other = node(n.in[1]).val;
                for (size_t i = 0; i < g.count(); ++i) d.data[i] += g.data[i] * other.data[i];
            }
            if (wants(1)) {
                auto& d = grad_buf(n.in[1]);
                const auto& other = node(n.in[0]).val;
                for (size_t i = 0; i < g.count(); ++i) d.data[i] += g.data[i] * other.data[i];
            }
            break;
        }
        case Op::Scale: {
            if (!wants(0)) break;
            auto& d = grad_buf(n.in[0]);
            for (size_t i = 0; i < g.count(); ++i) d.data[i] += g.data[i] * n.f0;
            break;
        }
        case Op::AddC:
        case Op::Reshape1d: {
            if (!wants(0)) break;
            auto& d = grad_buf(n.in[0]);
            for (size_t i = 0; i < g.count(); ++i) d.data[i] += g.data[i];
            break;
        }
        case Op::Sum: {
            if (!wants(0)) break;
            auto& d = grad_buf(n.in[0]);
            for (size_t i = 0; i < d.count(); ++i) d.data[i] += g.data[0];
            break;
        }
        case Op::Pick: {
            if (!wants(0)) break;
            grad_buf(n.in[0]).data[size_t(n.i0)] += g.data[0];
            break;
        }
        case Op::Concat2: {
            const size_t na = node(n.in[0]).val.count();
            if (wants(0)) {
                auto& d = grad_buf(n.in[0]);
                for (size_t i = 0; i < na; ++i) d.data[i] += g.data[i];
            }
            if (wants(1)) {
                auto& d = grad_buf(n.in[1]);
                for (size_t i = 0; i < d.count(); ++i) d.data[i] += g.data[na + i];
            }
            break;
        }
        case Op::Slice: {
            if (!wants(0)) break;
            auto& d = grad_buf(n.in[0]);
            for (int i = 0; i < n.i1; ++i) d.data[size_t(n.i0 + i)] += g.data[size_t(i)];
            break;
        }
        case Op::Crop2d: {
            if (!wants(0)) break;
            auto& d = grad_buf(n.in[0]);
            const auto& x = node(n.in[0]).val;
            const int H = x.shape[1], W = x.shape[2];
            const int C = x.shape[0];
            for (int c = 0; c < C; ++c)
                for (int y = 0; y < n.i0; ++y)
                    for (int x2 = 0; x2 < n.i1; ++x2)
                        d.data[(size_t(c) * H + y) * W + x2] += g.data[(size_t(c) * n.i0 + y) * n.i1 + x2];
            break;
        }
    }
}

template class TapeT<float>;
template class TapeT<double>;

}  // namespace ra3c
