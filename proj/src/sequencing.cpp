#include "dcrnn/sequencing.hpp"

namespace dcrnn {

AdaptiveBank AdaptiveBank::create(ParamSet& ps, const std::string& group, i64 seq_len, i64 width, bool enabled) {
    if (seq_len < 1 || width < 1) raise(ErrorKind::Config, "adaptive bank: seq_len and width must be >= 1");
    AdaptiveBank b;
    b.enabled = enabled;
    b.seq_len = seq_len;
    b.width = width;
    if (enabled)
        for (i64 i = 0; i < seq_len; ++i) b.offsets.push_back(ps.add(group, cat("a", i), Tensor::zeros(Shape{width})));
    return b;
}

void validate_plan(const SharingPlan& plan) {
    if (plan.n_tasks < 1) raise(ErrorKind::Config, "plan: n_tasks must be >= 1, got ", plan.n_tasks);
    if (plan.window_len < 1) raise(ErrorKind::Config, "plan: window_len must be >= 1, got ", plan.window_len);
    if (plan.interval < 0 || plan.interval > plan.window_len)
        raise(ErrorKind::Config, "plan: interval must satisfy 0 <= I <= L, got I=", plan.interval,
              ", L=", plan.window_len);
}

i64 required_len(const SharingPlan& plan) {
    validate_plan(plan);
    return plan.window_len + (plan.n_tasks - 1) * plan.interval;
}

const char* sharing_kind_name(SharingKind k) {
    switch (k) {
        case SharingKind::Hard: return "hard";
        case SharingKind::Soft: return "soft";
        case SharingKind::Partial: return "partial";
    }
    return "?";
}

SharingKind classify_plan(const SharingPlan& plan) {
    validate_plan(plan);
    if (plan.interval == 0) return SharingKind::Hard;
    if (plan.interval == plan.window_len) return SharingKind::Soft;
    return SharingKind::Partial;
}

FeatureSequence build_sequence(Tape& t, const TapeBinding& bind, NodeId x0, const AdaptiveBank& bank) {
    const Tensor& xv = t.value(x0);
    if (xv.shape().rank() != 2 || xv.cols() != bank.width)
        raise(ErrorKind::Shape, "build_sequence: x0 ", xv.shape().str(), " does not match bank width ", bank.width);
    FeatureSequence seq;
    seq.width = bank.width;
    seq.items.reserve(static_cast<std::size_t>(bank.seq_len));
    for (i64 i = 0; i < bank.seq_len; ++i) {
        if (bank.enabled)
            seq.items.push_back(ops::add_rowvec(t, x0, bind[bank.offsets[static_cast<std::size_t>(i)]]));
        else
            seq.items.push_back(x0);
    }
    return seq;
}

std::vector<std::vector<NodeId>> slice_windows(const SharingPlan& plan, const FeatureSequence& seq) {
    const i64 need = required_len(plan);
    if (seq.length() < need)
        raise(ErrorKind::Config, "plan requires sequence length ", need, " (L + (n-1)*I) but got ", seq.length());
    std::vector<std::vector<NodeId>> windows;
    windows.reserve(static_cast<std::size_t>(plan.n_tasks));
    for (i64 i = 0; i < plan.n_tasks; ++i) {
        const i64 begin = i * plan.interval;
        windows.emplace_back(seq.items.begin() + begin, seq.items.begin() + begin + plan.window_len);
    }
    return windows;
}

}  // namespace dcrnn
