#pragma once

#include <cassert>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "dcrnn/tensor.hpp"

namespace dcrnn {

class Tape;

using NodeId = std::int32_t;
using BackwardFn = std::function<void(Tape&, NodeId)>;

// One recorded value. Parents always precede the node on the tape, so the
// node list is a topological order of the (acyclic) computation graph.
struct Node {
    Tensor value;
    std::optional<Tensor> grad;  // absent until backward reaches the node
    const char* op;
    std::vector<NodeId> parents;
    BackwardFn backward;  // empty for leaves
};

// Append-only record of one forward pass. Confined to a single thread for the
// duration of a forward/backward pair; the Tensors inside are plain values.
class Tape {
public:
    NodeId leaf(Tensor value) { return emplace(std::move(value), "leaf", {}, nullptr); }

    NodeId emplace(Tensor value, const char* op, std::vector<NodeId> parents, BackwardFn backward) {
        assert(value.all_finite());  // release builds skip forward NaN checks
        nodes_.push_back(Node{std::move(value), std::nullopt, op, std::move(parents), std::move(backward)});
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    i64 size() const { return static_cast<i64>(nodes_.size()); }
    const Tensor& value(NodeId id) const { return node(id).value; }
    const char* op(NodeId id) const { return node(id).op; }
    const std::vector<NodeId>& parents(NodeId id) const { return node(id).parents; }

    bool has_grad(NodeId id) const { return node(id).grad.has_value(); }

    const Tensor& grad(NodeId id) const {
        const Node& n = node(id);
        if (!n.grad) raise(ErrorKind::Contract, "node ", id, " (", n.op, ") has no gradient; it is unreachable from the backward root");
        return *n.grad;
    }

    // Zero-initialized gradient buffer, allocated on first touch.
    Tensor& grad_buffer(NodeId id) {
        Node& n = node(id);
        if (!n.grad) n.grad.emplace(n.value.shape());
        return *n.grad;
    }

    // Reverse-topological gradient accumulation from a scalar root.
    void backward(NodeId root);

private:
    Node& node(NodeId id) {
        assert(id >= 0 && id < size());
        return nodes_[static_cast<std::size_t>(id)];
    }
    const Node& node(NodeId id) const {
        assert(id >= 0 && id < size());
        return nodes_[static_cast<std::size_t>(id)];
    }

    std::deque<Node> nodes_;  // stable references across emplace
};

}  // namespace dcrnn
