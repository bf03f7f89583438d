#pragma once

#include <memory>
#include <ostream>

#include "dcrnn/evaluation.hpp"

namespace dcrnn {

enum class OptimizerKind { Sgd, Adam };

struct LossConfig {
    std::vector<double> pos_weights;   // weighted-BCE positive-class weight per task
    std::vector<double> task_weights;  // aggregation weight per task

    static LossConfig uniform(i64 n_tasks) { return {std::vector<double>(n_tasks, 1.0), std::vector<double>(n_tasks, 1.0)}; }
    void validate(i64 n_tasks) const;
};

struct TrainConfig {
    i64 epochs = 3;
    i64 batch_size = 1024;
    double learning_rate = 1e-4;
    std::uint64_t seed = 42;
    OptimizerKind optimizer = OptimizerKind::Adam;
};

class Optimizer {
public:
    virtual ~Optimizer() = default;
    // grads[i] pairs with params entry i; nullptr means unreachable (treated as zero).
    virtual void step(ParamSet& params, std::span<const Tensor* const> grads) = 0;

    static std::unique_ptr<Optimizer> create(OptimizerKind kind, double learning_rate);
};

struct EpochStats {
    i64 epoch = 0;
    double train_loss = 0.0;
    std::vector<double> auc;
    double wall_seconds = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> epochs;
};

// One tab-separated line: epoch, train_loss, auc per task, wall_seconds.
std::string metrics_line(const EpochStats& s);

// Weighted sum of per-task losses.
NodeId multitask_loss(Tape& t, std::span<const NodeId> task_losses, std::span<const double> weights);

// Seeded, deterministic epoch/batch loop: shuffles with a generator derived
// from (seed, epoch), keeps the final partial batch, evaluates AUC per epoch
// on `eval_set` (falling back to the training set), and streams metric lines
// into `metrics_sink` when given. A non-finite loss aborts with a diagnostic
// naming the parameter group with the largest gradient norm.
TrainResult train(ModelGraph& model, const Dataset& train_set, const Dataset* eval_set, const TrainConfig& cfg,
                  const LossConfig& loss_cfg, std::ostream* metrics_sink = nullptr);

}  // namespace dcrnn
