#pragma once

#include <memory>

#include "dcrnn/layers.hpp"
#include "dcrnn/sequencing.hpp"

namespace dcrnn {

struct DcrnnConfig {
    i64 embedding_dim = 32;
    SharingPlan plan{2, 3, 1};
    CellKind cell = CellKind::Lstm;
    Direction direction = Direction::Bidirectional;
    i64 hidden_dim = 32;
    bool ada = true;
    std::vector<i64> tower_widths{64, 32};  // hidden widths; a 1-unit linear head follows
};

struct MmoeConfig {
    i64 embedding_dim = 32;
    i64 n_tasks = 2;
    i64 expert_count = 8;
    std::vector<i64> expert_widths{128, 64};
    std::vector<i64> tower_widths{64, 32};
};

// A fully assembled trainable graph: named parameter groups plus a forward
// function from per-field feature ids to one logit column per task.
class ModelGraph {
public:
    virtual ~ModelGraph() = default;
    virtual std::string kind() const = 0;
    virtual i64 n_tasks() const = 0;
    // ids_by_field[f][b]; returns per-task [B x 1] logit nodes.
    virtual std::vector<NodeId> forward(Tape& t, const TapeBinding& bind,
                                        std::span<const std::vector<i64>> ids_by_field) const = 0;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

protected:
    ParamSet params_;
};

class DcrnnModel final : public ModelGraph {
public:
    DcrnnModel(const DcrnnConfig& cfg, std::span<const i64> vocab_sizes, Rng& rng);

    std::string kind() const override { return "dcrnn"; }
    i64 n_tasks() const override { return config_.plan.n_tasks; }
    std::vector<NodeId> forward(Tape& t, const TapeBinding& bind,
                                std::span<const std::vector<i64>> ids_by_field) const override;

    const DcrnnConfig& config() const { return config_; }
    const AdaptiveBank& bank() const { return bank_; }

private:
    DcrnnConfig config_;
    EmbeddingTable embedding_;
    AdaptiveBank bank_;
    std::vector<SequenceRunner> runners_;          // one per task
    std::vector<std::vector<DenseLayer>> towers_;  // one stack per task
};

class MmoeModel final : public ModelGraph {
public:
    MmoeModel(const MmoeConfig& cfg, std::span<const i64> vocab_sizes, Rng& rng);

    std::string kind() const override { return "mmoe"; }
    i64 n_tasks() const override { return config_.n_tasks; }
    std::vector<NodeId> forward(Tape& t, const TapeBinding& bind,
                                std::span<const std::vector<i64>> ids_by_field) const override;

    const MmoeConfig& config() const { return config_; }

private:
    MmoeConfig config_;
    EmbeddingTable embedding_;
    std::vector<std::vector<DenseLayer>> experts_;
    std::vector<DenseLayer> gates_;  // one softmax gate per task
    std::vector<std::vector<DenseLayer>> towers_;
};

struct DegenerateReport {
    SharingKind kind;
    i64 overlap = 0;  // shared positions between consecutive windows
    std::string text;
};

// Classifies the sharing plan (hard / soft / partial) and verifies the
// consecutive-window overlap equals L - I.
DegenerateReport degenerate_check(const DcrnnConfig& cfg);

}  // namespace dcrnn
