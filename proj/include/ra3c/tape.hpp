#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ra3c/tensor.hpp"

namespace ra3c {

enum class Op : uint8_t {
    Leaf,
    Conv2d,
    MaxPool2d,
    Linear,
    Relu,
    Sigmoid,
    Tanh,
    Exp,
    Softmax,
    LogSoftmax,
    Add,
    Mul,
    Scale,
    AddC,
    Sum,
    Pick,
    Concat2,
    Slice,
    Crop2d,
    Reshape1d,
};

// Eager reverse-mode tape over TensorT<T>. Nodes are appended in execution
// order, so reverse creation order is a valid reverse topological order and
// backward() visits every node exactly once.
template <typename T>
class TapeT {
public:
    using Id = int;

    struct Node {
        Op op = Op::Leaf;
        bool needs_grad = false;
        int nin = 0;
        std::array<Id, 3> in{-1, -1, -1};
        int i0 = 0, i1 = 0;  // per-op integer attrs (stride, window, offset, index, ...)
        T f0 = T(0);         // per-op scalar attr
        TensorT<T> val;
        std::vector<int32_t> aux;  // maxpool argmax indices
    };

    Id leaf(TensorT<T> value, bool requires_grad = false);

    Id conv2d(Id input, Id kernels, Id bias, int stride);
    Id maxpool2d(Id input, int window);
    Id linear(Id input, Id weight, Id bias);
    Id relu(Id x);
    Id sigmoid(Id x);
    Id tanh_(Id x);
    Id exp_(Id x);
    Id softmax(Id logits);
    Id log_softmax(Id logits);
    Id add(Id a, Id b);
    Id mul(Id a, Id b);
    Id scale(Id x, T c);
    Id add_const(Id x, T c);
    Id sum(Id x);
    Id pick(Id x, int index);
    Id concat2(Id a, Id b);
    Id slice(Id x, int offset, int len);
    Id crop2d(Id x, int out_h, int out_w);
    Id reshape1d(Id x);  // flatten to [N]; layout is already row-major

    // Standard LSTM cell built from primitive ops. Gate order inside the
    // stacked [4M x ...] parameters is (input, forget, candidate, output).
    struct LstmParams {
        Id w_x;  // [4M, N]
        Id w_h;  // [4M, M]
        Id bias; // [4M]
    };
    std::pair<Id, Id> lstm_step(Id x, Id h, Id c, const LstmParams& p);

    // Accumulates gradients for every node that (transitively) depends on a
    // requires_grad leaf. `guided` switches ReLU backward to the
    // positive-gradient rule used for saliency maps.
    void backward(Id loss, bool guided = false);

    const TensorT<T>& val(Id id) const { return nodes_[size_t(id)].val; }
    // Zero tensor of the node's shape when the node was never reached.
    TensorT<T> grad(Id id) const;
    bool requires_grad(Id id) const { return nodes_[size_t(id)].needs_grad; }

    size_t mark() const { return nodes_.size(); }
    void truncate(size_t m);
    size_t size() const { return nodes_.size(); }

private:
    Id push(Node n);
    const Node& node(Id id) const { return nodes_[size_t(id)]; }
    void check_id(Id id) const;
    TensorT<T>& grad_buf(Id id);
    void backward_node(Id id, bool guided);

    std::vector<Node> nodes_;
    std::vector<TensorT<T>> grads_;
};

using Tape = TapeT<float>;

}  // namespace ra3c
