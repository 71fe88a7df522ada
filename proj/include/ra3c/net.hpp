#pragma once

#include <string>

#include "ra3c/params.hpp"
#include "ra3c/render.hpp"
#include "ra3c/tape.hpp"

namespace ra3c {

enum class EncoderVariant { Ours, Mnih };

EncoderVariant encoder_from_string(const std::string& s);
std::string to_string(EncoderVariant v);

struct NetConfig {
    EncoderVariant variant = EncoderVariant::Ours;
    int channels = 3;
    int height = 84;
    int width = 84;
    int actions = kActionCount;
    int lstm_size = 256;
    // Speed and one-hot previous action appended to the LSTM input. On by
    // default for Ours; the Mnih baseline sees pixels only.
    bool feed_speed_action = true;

    static NetConfig for_variant(EncoderVariant v);
    void validate() const;

    // Stored inside checkpoints as the reserved "net.config" segment.
    std::vector<float> to_floats() const;
    static NetConfig from_floats(std::span<const float> f);
};

constexpr const char* kNetConfigSegment = "net.config";

template <typename T>
struct NetOutputT {
    std::vector<T> policy;  // K probabilities
    T value = T(0);
    TensorT<T> h, c;
};

using NetOutput = NetOutputT<float>;

// Actor-critic state encoder: conv stack -> FC 256 -> LSTM -> two heads that
// share everything up to their own final fully connected layer.
template <typename T>
class PolicyNetT {
public:
    PolicyNetT(NetConfig cfg, uint64_t seed);
    PolicyNetT(NetConfig cfg, ParamSetT<T> params);

    const NetConfig& config() const { return cfg_; }
    const ParamSetT<T>& params() const { return params_; }
    ParamSetT<T>& params() { return params_; }

    TensorT<T> initial_hidden() const { return TensorT<T>({cfg_.lstm_size}); }

    // --- tape-level interface for training rollouts ---
    struct Mounted {
        std::vector<typename TapeT<T>::Id> param_ids;  // one per segment, same order
    };
    struct StepIds {
        typename TapeT<T>::Id logits, policy, log_policy, value, h, c;
    };

    Mounted mount(TapeT<T>& tape, bool trainable) const;
    typename TapeT<T>::Id frame_leaf(TapeT<T>& tape, const Observation& obs, bool needs_grad = false) const;
    StepIds build_step(TapeT<T>& tape, const Mounted& m, typename TapeT<T>::Id frame,
                       const Observation& obs, typename TapeT<T>::Id h_in, typename TapeT<T>::Id c_in) const;

    // --- inference ---
    NetOutputT<T> forward(const Observation& obs, const TensorT<T>& h, const TensorT<T>& c) const;

    // Guided backpropagation from the chosen class's pre-softmax logit:
    // ReLU backward passes only positive gradients through positive
    // activations; the result is the per-pixel channel max of the positive
    // input gradients, shaped [H, W].
    TensorT<T> guided_backprop(const Observation& obs, const TensorT<T>& h, const TensorT<T>& c,
                               int action_class) const;

    // Gradient ParamSet in segment order after tape.backward().
    ParamSetT<T> collect_grads(const TapeT<T>& tape, const Mounted& m) const;

private:
    struct ConvSpec {
        int filters, ksize, stride, pool;  // pool 0 = none
    };
    std::vector<ConvSpec> conv_stack() const;
    int feature_count() const;  // flattened conv output feeding the FC layer
    int lstm_input_size() const;

    NetConfig cfg_;
    ParamSetT<T> params_;
};

using PolicyNet = PolicyNetT<float>;

// Checkpoint wrappers that carry the architecture alongside the weights.
void save_net_checkpoint(const PolicyNet& net, const std::string& path);
PolicyNet load_net_checkpoint(const std::string& path);

}  // namespace ra3c
