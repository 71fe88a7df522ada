#include "ra3c/net.hpp"

#include <cmath>

namespace ra3c {

EncoderVariant encoder_from_string(const std::string& s) {
    if (s == "ours") return EncoderVariant::Ours;
    if (s == "mnih") return EncoderVariant::Mnih;
    throw ValueError("unknown encoder '" + s + "' (expected ours|mnih)");
}

std::string to_string(EncoderVariant v) {
    return v == EncoderVariant::Ours ? "ours" : "mnih";
}

NetConfig NetConfig::for_variant(EncoderVariant v) {
    NetConfig c;
    c.variant = v;
    c.feed_speed_action = (v == EncoderVariant::Ours);
    return c;
}

void NetConfig::validate() const {
    if (actions < 2) throw ValueError("net config: need at least 2 action classes");
    if (channels < 1 || height < 8 || width < 8)
        throw ValueError("net config: input must be at least 8x8 with one channel");
    if (lstm_size < 1) throw ValueError("net config: lstm size must be positive");
}

std::vector<float> NetConfig::to_floats() const {
    return {float(variant == EncoderVariant::Mnih ? 1 : 0), float(channels), float(height),
            float(width),  float(actions),                  float(lstm_size),
            float(feed_speed_action ? 1 : 0)};
}

NetConfig NetConfig::from_floats(std::span<const float> f) {
    if (f.size() != 7) throw IoError("net config segment must hold 7 values");
    NetConfig c;
    c.variant = f[0] != 0 ? EncoderVariant::Mnih : EncoderVariant::Ours;
    c.channels = int(f[1]);
    c.height = int(f[2]);
    c.width = int(f[3]);
    c.actions = int(f[4]);
    c.lstm_size = int(f[5]);
    c.feed_speed_action = f[6] != 0;
    c.validate();
    return c;
}

template <typename T>
std::vector<typename PolicyNetT<T>::ConvSpec> PolicyNetT<T>::conv_stack() const {
    if (cfg_.variant == EncoderVariant::Ours)
        return {{32, 8, 1, 2}, {32, 4, 1, 2}, {64, 3, 1, 2}};
    return {{16, 8, 4, 0}, {32, 4, 2, 0}};
}

template <typename T>
int PolicyNetT<T>::feature_count() const {
    int h = cfg_.height, w = cfg_.width, ch = cfg_.channels;
    for (const auto& l : conv_stack()) {
        if (h < l.ksize || w < l.ksize)
            throw ShapeError("input too small for the encoder stack (got " + std::to_string(h) + "x" +
                             std::to_string(w) + " before a " + std::to_string(l.ksize) + "x" +
                             std::to_string(l.ksize) + " conv)");
        h = (h - l.ksize) / l.stride + 1;
        w = (w - l.ksize) / l.stride + 1;
        if (l.pool > 0) {
            h -= h % l.pool;
            w -= w % l.pool;
            if (h == 0 || w == 0) throw ShapeError("input too small for the encoder stack (pooled away)");
            h /= l.pool;
            w /= l.pool;
        }
        ch = l.filters;
    }
    return ch * h * w;
}

template <typename T>
int PolicyNetT<T>::lstm_input_size() const {
    return 256 + (cfg_.feed_speed_action ? 1 + cfg_.actions : 0);
}

template <typename T>
PolicyNetT<T>::PolicyNetT(NetConfig cfg, uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    const int feat = feature_count();

    int counter = 0;
    auto uniform_init = [&](TensorT<T> t, int fan_in) {
        Rng rng(derive_seed(seed, SeedStream::WeightsInit, uint64_t(counter++)));
        const double bound = 1.0 / std::sqrt(double(fan_in));
        for (auto& v : t.data) v = T(rng.uniform(-bound, bound));
        return t;
    };

    int ch = cfg_.channels;
    int idx = 1;
    for (const auto& l : conv_stack()) {
        params_.segments.push_back({"conv" + std::to_string(idx) + ".w",
                                    uniform_init(TensorT<T>({l.filters, ch, l.ksize, l.ksize}),
                                                 ch * l.ksize * l.ksize)});
        params_.segments.push_back({"conv" + std::to_string(idx) + ".b", TensorT<T>({l.filters})});
        ch = l.filters;
        ++idx;
    }
    params_.segments.push_back({"fc.w", uniform_init(TensorT<T>({256, feat}), feat)});
    params_.segments.push_back({"fc.b", TensorT<T>({256})});

    const int M = cfg_.lstm_size;
    const int in = lstm_input_size();
    params_.segments.push_back({"lstm.wx", uniform_init(TensorT<T>({4 * M, in}), in)});
    params_.segments.push_back({"lstm.wh", uniform_init(TensorT<T>({4 * M, M}), M)});
    TensorT<T> lb({4 * M});
    for (int i = M; i < 2 * M; ++i) lb.data[size_t(i)] = T(1);  // forget gate opens
    params_.segments.push_back({"lstm.b", std::move(lb)});

    params_.segments.push_back({"policy.w", uniform_init(TensorT<T>({cfg_.actions, M}), M)});
    params_.segments.push_back({"policy.b", TensorT<T>({cfg_.actions})});
    params_.segments.push_back({"value.w", uniform_init(TensorT<T>({1, M}), M)});
    params_.segments.push_back({"value.b", TensorT<T>({1})});
}

template <typename T>
PolicyNetT<T>::PolicyNetT(NetConfig cfg, ParamSetT<T> params) : cfg_(cfg), params_(std::move(params)) {
    cfg_.validate();
    PolicyNetT<T> ref(cfg_, uint64_t(0));
    if (!ref.params_.same_layout(params_))
        throw ShapeError("parameter set does not match the configured architecture");
}

template <typename T>
typename PolicyNetT<T>::Mounted PolicyNetT<T>::mount(TapeT<T>& tape, bool trainable) const {
    Mounted m;
    m.param_ids.reserve(params_.segments.size());
    for (const auto& seg : params_.segments) m.param_ids.push_back(tape.leaf(seg.tensor, trainable));
    return m;
}

template <typename T>
typename TapeT<T>::Id PolicyNetT<T>::frame_leaf(TapeT<T>& tape, const Observation& obs, bool needs_grad) const {
    if (obs.h != cfg_.height || obs.w != cfg_.width)
        throw ShapeError("observation frame " + std::to_string(obs.h) + "x" + std::to_string(obs.w) +
                         " does not match configured input");
    return tape.leaf(frame_to_tensor<T>(obs.frame_rgb, obs.h, obs.w), needs_grad);
}

template <typename T>
typename PolicyNetT<T>::StepIds PolicyNetT<T>::build_step(TapeT<T>& tape, const Mounted& m,
                                                          typename TapeT<T>::Id frame, const Observation& obs,
                                                          typename TapeT<T>::Id h_in,
                                                          typename TapeT<T>::Id c_in) const {
    size_t p = 0;
    auto next_param = [&] { return m.param_ids.at(p++); };

    auto x = frame;
    for (const auto& l : conv_stack()) {
        auto w = next_param();
        auto b = next_param();
        x = tape.relu(tape.conv2d(x, w, b, l.stride));
        if (l.pool > 0) {
            const auto& shape = tape.val(x).shape;
            const int ch = shape[1] - shape[1] % l.pool;
            const int cw = shape[2] - shape[2] % l.pool;
            if (ch != shape[1] || cw != shape[2]) x = tape.crop2d(x, ch, cw);
            x = tape.maxpool2d(x, l.pool);
        }
    }
    auto fw = next_param();
    auto fb = next_param();
    auto features = tape.relu(tape.linear(tape.reshape1d(x), fw, fb));

    typename TapeT<T>::LstmParams lp;
    lp.w_x = next_param();
    lp.w_h = next_param();
    lp.bias = next_param();

    auto lstm_in = features;
    if (cfg_.feed_speed_action) {
        TensorT<T> extras({1 + cfg_.actions});
        extras.data[0] = T(obs.speed * 3.6 / 150.0);  // km/h scaled to ~[0,1]
        if (obs.prev_action >= 0 && obs.prev_action < cfg_.actions)
            extras.data[size_t(1 + obs.prev_action)] = T(1);
        lstm_in = tape.concat2(features, tape.leaf(std::move(extras)));
    }
    auto [h_out, c_out] = tape.lstm_step(lstm_in, h_in, c_in, lp);

    auto pw = next_param();
    auto pb = next_param();
    auto vw = next_param();
    auto vb = next_param();

    StepIds out;
    out.logits = tape.linear(h_out, pw, pb);
    out.policy = tape.softmax(out.logits);
    out.log_policy = tape.log_softmax(out.logits);
    out.value = tape.linear(h_out, vw, vb);
    out.h = h_out;
    out.c = c_out;
    return out;
}

template <typename T>
NetOutputT<T> PolicyNetT<T>::forward(const Observation& obs, const TensorT<T>& h, const TensorT<T>& c) const {
    TapeT<T> tape;
    auto m = mount(tape, false);
    auto frame = frame_leaf(tape, obs, false);
    if (!tape.val(frame).all_finite()) throw ValueError("observation frame has non-finite pixels");
    auto ids = build_step(tape, m, frame, obs, tape.leaf(h), tape.leaf(c));
    NetOutputT<T> out;
    out.policy = tape.val(ids.policy).data;
    out.value = tape.val(ids.value).data[0];
    out.h = tape.val(ids.h);
    out.c = tape.val(ids.c);
    return out;  // tape (and with it the whole graph) is discarded here
}

template <typename T>
TensorT<T> PolicyNetT<T>::guided_backprop(const Observation& obs, const TensorT<T>& h, const TensorT<T>& c,
                                          int action_class) const {
    if (action_class < 0 || action_class >= cfg_.actions)
        throw ValueError("guided_backprop: action class out of range");
    TapeT<T> tape;
    auto m = mount(tape, false);
    auto frame = frame_leaf(tape, obs, true);
    auto ids = build_step(tape, m, frame, obs, tape.leaf(h), tape.leaf(c));
    tape.backward(tape.pick(ids.logits, action_class), /*guided=*/true);
    const TensorT<T> g = tape.grad(frame);
    TensorT<T> out({cfg_.height, cfg_.width});
    const size_t plane = size_t(cfg_.height) * cfg_.width;
    for (size_t i = 0; i < plane; ++i) {
        T best = T(0);
        for (int ch = 0; ch < cfg_.channels; ++ch) best = std::max(best, g.data[size_t(ch) * plane + i]);
        out.data[i] = best;
    }
    return out;
}

template <typename T>
ParamSetT<T> PolicyNetT<T>::collect_grads(const TapeT<T>& tape, const Mounted& m) const {
    ParamSetT<T> grads = params_.zeros_like();
    for (size_t i = 0; i < m.param_ids.size(); ++i) grads.segments[i].tensor = tape.grad(m.param_ids[i]);
    return grads;
}

template class PolicyNetT<float>;
template class PolicyNetT<double>;

void save_net_checkpoint(const PolicyNet& net, const std::string& path) {
    ParamSet out;
    out.segments.push_back({kNetConfigSegment, Tensor({7}, net.config().to_floats())});
    for (const auto& s : net.params().segments) out.segments.push_back(s);
    save_checkpoint(out, path);
}

PolicyNet load_net_checkpoint(const std::string& path) {
    ParamSet all = load_checkpoint(path);
    if (all.segments.empty() || all.segments[0].name != kNetConfigSegment)
        throw IoError("checkpoint does not carry a net.config segment");
    NetConfig cfg = NetConfig::from_floats(all.segments[0].tensor.data);
    ParamSet weights;
    weights.segments.assign(all.segments.begin() + 1, all.segments.end());
    return PolicyNet(cfg, std::move(weights));
}

}  // namespace ra3c
