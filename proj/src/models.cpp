#include "dcrnn/models.hpp"

#include <algorithm>

namespace dcrnn {

namespace {

std::vector<DenseLayer> make_tower(ParamSet& ps, const std::string& group, i64 in,
                                   std::span<const i64> hidden_widths, Rng& rng) {
    std::vector<DenseLayer> tower;
    i64 w = in;
    for (std::size_t l = 0; l < hidden_widths.size(); ++l) {
        tower.push_back(DenseLayer::create(ps, group, cat("l", l), w, hidden_widths[l], ActivationKind::Relu, rng));
        w = hidden_widths[l];
    }
    tower.push_back(DenseLayer::create(ps, group, "out", w, 1, ActivationKind::Identity, rng));
    return tower;
}

NodeId run_tower(Tape& t, const TapeBinding& bind, std::span<const DenseLayer> tower, NodeId x) {
    NodeId h = x;
    for (const DenseLayer& layer : tower) h = layer.forward(t, bind, h);
    return h;
}

}  // namespace

DcrnnModel::DcrnnModel(const DcrnnConfig& cfg, std::span<const i64> vocab_sizes, Rng& rng) : config_(cfg) {
    validate_plan(cfg.plan);
    if (cfg.hidden_dim < 1) raise(ErrorKind::Config, "dcrnn: hidden_dim must be >= 1");
    embedding_ = EmbeddingTable::create(params_, "embedding", vocab_sizes, cfg.embedding_dim, rng);
    const i64 d = embedding_.output_dim();
    bank_ = AdaptiveBank::create(params_, "ada", required_len(cfg.plan), d, cfg.ada);
    for (i64 task = 0; task < cfg.plan.n_tasks; ++task) {
        runners_.push_back(
            SequenceRunner::create(params_, cat("task", task, ".rnn"), cfg.cell, cfg.direction, d, cfg.hidden_dim, rng));
        towers_.push_back(
            make_tower(params_, cat("task", task, ".tower"), runners_.back().output_dim(), cfg.tower_widths, rng));
    }
}

std::vector<NodeId> DcrnnModel::forward(Tape& t, const TapeBinding& bind,
                                        std::span<const std::vector<i64>> ids) const {
    const NodeId x0 = embedding_.forward(t, bind, ids);
    const FeatureSequence seq = build_sequence(t, bind, x0, bank_);
    const std::vector<std::vector<NodeId>> windows = slice_windows(config_.plan, seq);
    std::vector<NodeId> logits;
    logits.reserve(static_cast<std::size_t>(n_tasks()));
    for (i64 task = 0; task < n_tasks(); ++task) {
        const NodeId rep = runners_[static_cast<std::size_t>(task)].run(t, bind, windows[static_cast<std::size_t>(task)]);
        logits.push_back(run_tower(t, bind, towers_[static_cast<std::size_t>(task)], rep));
    }
    return logits;
}

MmoeModel::MmoeModel(const MmoeConfig& cfg, std::span<const i64> vocab_sizes, Rng& rng) : config_(cfg) {
    if (cfg.n_tasks < 1) raise(ErrorKind::Config, "mmoe: n_tasks must be >= 1");
    if (cfg.expert_count < 1) raise(ErrorKind::Config, "mmoe: expert_count must be >= 1");
    if (cfg.expert_widths.empty()) raise(ErrorKind::Config, "mmoe: experts need at least one layer");
    embedding_ = EmbeddingTable::create(params_, "embedding", vocab_sizes, cfg.embedding_dim, rng);
    const i64 d = embedding_.output_dim();
    for (i64 k = 0; k < cfg.expert_count; ++k) {
        std::vector<DenseLayer> expert;
        i64 w = d;
        for (std::size_t l = 0; l < cfg.expert_widths.size(); ++l) {
            expert.push_back(
                DenseLayer::create(params_, "experts", cat("e", k, ".l", l), w, cfg.expert_widths[l], ActivationKind::Relu, rng));
            w = cfg.expert_widths[l];
        }
        experts_.push_back(std::move(expert));
    }
    const i64 expert_out = cfg.expert_widths.back();
    for (i64 task = 0; task < cfg.n_tasks; ++task) {
        gates_.push_back(
            DenseLayer::create(params_, "gates", cat("g", task), d, cfg.expert_count, ActivationKind::Identity, rng));
        towers_.push_back(make_tower(params_, cat("task", task, ".tower"), expert_out, cfg.tower_widths, rng));
    }
}

std::vector<NodeId> MmoeModel::forward(Tape& t, const TapeBinding& bind,
                                       std::span<const std::vector<i64>> ids) const {
    const NodeId x0 = embedding_.forward(t, bind, ids);
    std::vector<NodeId> expert_out;
    expert_out.reserve(experts_.size());
    for (const auto& expert : experts_) expert_out.push_back(run_tower(t, bind, expert, x0));

    std::vector<NodeId> logits;
    logits.reserve(static_cast<std::size_t>(n_tasks()));
    for (i64 task = 0; task < n_tasks(); ++task) {
        const NodeId gate = ops::softmax_rows(t, gates_[static_cast<std::size_t>(task)].forward(t, bind, x0));
        NodeId mix = 0;
        for (std::size_t k = 0; k < expert_out.size(); ++k) {
            const NodeId wk = ops::slice(t, gate, 1, static_cast<i64>(k), static_cast<i64>(k) + 1);
            const NodeId weighted = ops::mul_colvec(t, expert_out[k], wk);
            mix = k == 0 ? weighted : ops::add(t, mix, weighted);
        }
        logits.push_back(run_tower(t, bind, towers_[static_cast<std::size_t>(task)], mix));
    }
    return logits;
}

DegenerateReport degenerate_check(const DcrnnConfig& cfg) {
    const SharingPlan& plan = cfg.plan;
    const SharingKind kind = classify_plan(plan);

    // Measure the actual index overlap of consecutive windows.
    i64 overlap = plan.window_len;  // single-task plans share everything with themselves
    for (i64 i = 0; i + 1 < plan.n_tasks; ++i) {
        const i64 a0 = i * plan.interval, a1 = a0 + plan.window_len;
        const i64 b0 = (i + 1) * plan.interval, b1 = b0 + plan.window_len;
        overlap = std::max<i64>(0, std::min(a1, b1) - std::max(a0, b0));
        if (overlap != plan.window_len - plan.interval)
            raise(ErrorKind::Contract, "window overlap ", overlap, " does not equal L - I = ",
                  plan.window_len - plan.interval);
    }

    DegenerateReport r;
    r.kind = kind;
    r.overlap = plan.n_tasks > 1 ? plan.window_len - plan.interval : plan.window_len;
    r.text = cat("plan(n=", plan.n_tasks, ", L=", plan.window_len, ", I=", plan.interval, "): ",
                 sharing_kind_name(kind), " sharing, consecutive windows share ", r.overlap, " of ",
                 plan.window_len, " positions, sequence length ", required_len(plan));
    return r;
}

}  // namespace dcrnn
