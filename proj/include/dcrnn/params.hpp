#pragma once

#include <string>
#include <vector>

#include "dcrnn/tape.hpp"

namespace dcrnn {

using ParamId = i64;

// Ordered registry of named trainable tensors. Every tensor belongs to
// exactly one group ("embedding", "task0.rnn", ...); the insertion order is
// the checkpoint record order.
class ParamSet {
public:
    struct Entry {
        std::string group;
        std::string name;  // full name: "<group>.<local>"
        Tensor value;
    };

    ParamId add(const std::string& group, const std::string& local, Tensor init);

    i64 size() const { return static_cast<i64>(entries_.size()); }
    const Entry& entry(ParamId id) const { return entries_[static_cast<std::size_t>(id)]; }
    Tensor& value(ParamId id) { return entries_[static_cast<std::size_t>(id)].value; }
    const Tensor& value(ParamId id) const { return entries_[static_cast<std::size_t>(id)].value; }

    i64 total_scalars() const;

private:
    std::vector<Entry> entries_;
};

// Leaf node per parameter for one tape pass, aligned with ParamIds.
struct TapeBinding {
    std::vector<NodeId> node_of;
    NodeId operator[](ParamId id) const { return node_of[static_cast<std::size_t>(id)]; }
};

TapeBinding bind_all(Tape& tape, const ParamSet& params);

// Gradient pointers per parameter after a backward pass; nullptr when the
// parameter was unreachable from the loss.
std::vector<const Tensor*> collect_grads(const Tape& tape, const TapeBinding& binding, const ParamSet& params);

// Flat checkpoint: ordered (name, shape, raw little-endian f64) records.
// Round-trips bit-exactly.
void save_checkpoint(const ParamSet& params, const std::string& path);
void load_checkpoint(ParamSet& params, const std::string& path);

}  // namespace dcrnn
