#pragma once

#include "dcrnn/ops.hpp"
#include "dcrnn/params.hpp"

namespace dcrnn {

// Learned per-position additive offsets applied to X0 when building the
// feature sequence. Zero-initialized, so an enabled bank starts out exactly
// equal to the disabled variant.
struct AdaptiveBank {
    bool enabled = false;
    i64 seq_len = 0;
    i64 width = 0;
    std::vector<ParamId> offsets;  // one [width] vector per position when enabled

    static AdaptiveBank create(ParamSet& ps, const std::string& group, i64 seq_len, i64 width, bool enabled);
};

// [X0, X1 ... Xn]; items share width and live on one tape.
struct FeatureSequence {
    i64 width = 0;
    std::vector<NodeId> items;
    i64 length() const { return static_cast<i64>(items.size()); }
};

// Partial-parameter-sharing geometry: n per-task windows of length L taken
// every I positions from one shared sequence.
struct SharingPlan {
    i64 n_tasks = 0;
    i64 window_len = 0;  // L
    i64 interval = 0;    // I
};

void validate_plan(const SharingPlan& plan);

// L + (n-1)*I
i64 required_len(const SharingPlan& plan);

enum class SharingKind { Hard, Soft, Partial };
const char* sharing_kind_name(SharingKind k);

// I = 0 degenerates to hard sharing, I = L to soft sharing.
SharingKind classify_plan(const SharingPlan& plan);

// Enabled bank: items[i] = x0 + A_i (element-wise). Disabled: every item is
// the x0 node itself.
FeatureSequence build_sequence(Tape& t, const TapeBinding& bind, NodeId x0, const AdaptiveBank& bank);

// K_i = seq[i*I : i*I + L). Windows alias the sequence nodes, so overlapping
// positions accumulate gradients from every task that reads them.
std::vector<std::vector<NodeId>> slice_windows(const SharingPlan& plan, const FeatureSequence& seq);

}  // namespace dcrnn
