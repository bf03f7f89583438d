#include "dcrnn/tape.hpp"

namespace dcrnn {

void Tape::backward(NodeId root) {
    if (root < 0 || root >= size()) raise(ErrorKind::Contract, "backward root ", root, " is not on the tape");
    if (value(root).size() != 1)
        raise(ErrorKind::Contract, "backward root must be scalar, got shape ", value(root).shape().str());

    // Mark ancestors of the root; everything else keeps an absent gradient.
    std::vector<char> reachable(static_cast<std::size_t>(size()), 0);
    std::vector<NodeId> stack{root};
    reachable[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        for (NodeId p : parents(id)) {
            if (!reachable[static_cast<std::size_t>(p)]) {
                reachable[static_cast<std::size_t>(p)] = 1;
                stack.push_back(p);
            }
        }
    }

    grad_buffer(root)[0] = 1.0;
    for (NodeId id = root; id >= 0; --id) {
        if (!reachable[static_cast<std::size_t>(id)]) continue;
        const Node& n = node(id);
        if (n.backward) n.backward(*this, id);
    }
}

}  // namespace dcrnn
