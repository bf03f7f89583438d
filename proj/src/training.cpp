#include "dcrnn/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dcrnn/layers.hpp"

namespace dcrnn {

void LossConfig::validate(i64 n_tasks) const {
    if (static_cast<i64>(pos_weights.size()) != n_tasks || static_cast<i64>(task_weights.size()) != n_tasks)
        raise(ErrorKind::Config, "loss: expected ", n_tasks, " pos/task weights, got ", pos_weights.size(), "/",
              task_weights.size());
    for (double w : pos_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) raise(ErrorKind::Config, "loss: pos_weight must be finite and >= 0");
    for (double w : task_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) raise(ErrorKind::Config, "loss: task_weight must be finite and >= 0");
}

namespace {

class Sgd final : public Optimizer {
public:
    explicit Sgd(double lr) : lr_(lr) {}
    void step(ParamSet& params, std::span<const Tensor* const> grads) override {
        for (ParamId id = 0; id < params.size(); ++id) {
            const Tensor* g = grads[static_cast<std::size_t>(id)];
            if (!g) continue;
            Tensor& p = params.value(id);
            for (i64 i = 0; i < p.size(); ++i) p[i] -= lr_ * (*g)[i];
        }
    }

private:
    double lr_;
};

class Adam final : public Optimizer {
public:
    explicit Adam(double lr) : lr_(lr) {}

    void step(ParamSet& params, std::span<const Tensor* const> grads) override {
        if (m_.empty()) {
            for (ParamId id = 0; id < params.size(); ++id) {
                m_.emplace_back(params.value(id).shape());
                v_.emplace_back(params.value(id).shape());
            }
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (ParamId id = 0; id < params.size(); ++id) {
            Tensor& p = params.value(id);
            Tensor& m = m_[static_cast<std::size_t>(id)];
            Tensor& v = v_[static_cast<std::size_t>(id)];
            const Tensor* gt = grads[static_cast<std::size_t>(id)];
            for (i64 i = 0; i < p.size(); ++i) {
                const double g = gt ? (*gt)[i] : 0.0;
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
                v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                p[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

private:
    double lr_;
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    i64 t_ = 0;
    std::vector<Tensor> m_, v_;
};

std::string largest_grad_group(const ParamSet& params, std::span<const Tensor* const> grads) {
    std::string worst = "(none)";
    double worst_norm = -1.0;
    for (ParamId id = 0; id < params.size(); ++id) {
        const Tensor* g = grads[static_cast<std::size_t>(id)];
        if (!g) continue;
        double sq = 0.0;
        for (i64 i = 0; i < g->size(); ++i) sq += (*g)[i] * (*g)[i];
        if (!std::isfinite(sq)) sq = std::numeric_limits<double>::infinity();
        if (sq > worst_norm) {
            worst_norm = sq;
            worst = params.entry(id).group;
        }
    }
    return worst;
}

std::string fmt(double v, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::unique_ptr<Optimizer> Optimizer::create(OptimizerKind kind, double learning_rate) {
    if (kind == OptimizerKind::Sgd) return std::make_unique<Sgd>(learning_rate);
    return std::make_unique<Adam>(learning_rate);
}

std::string metrics_line(const EpochStats& s) {
    std::string line = cat(s.epoch, '\t', fmt(s.train_loss, 6));
    for (double a : s.auc) line += cat('\t', fmt(a, 6));
    line += cat('\t', fmt(s.wall_seconds, 3), '\n');
    return line;
}

NodeId multitask_loss(Tape& t, std::span<const NodeId> task_losses, std::span<const double> weights) {
    if (task_losses.empty()) raise(ErrorKind::Contract, "multitask_loss: no task losses");
    if (task_losses.size() != weights.size())
        raise(ErrorKind::Contract, "multitask_loss: ", task_losses.size(), " losses but ", weights.size(),
              " weights");
    NodeId total = ops::scale(t, task_losses[0], weights[0]);
    for (std::size_t i = 1; i < task_losses.size(); ++i)
        total = ops::add(t, total, ops::scale(t, task_losses[i], weights[i]));
    return total;
}

TrainResult train(ModelGraph& model, const Dataset& train_set, const Dataset* eval_set, const TrainConfig& cfg,
                  const LossConfig& loss_cfg, std::ostream* metrics_sink) {
    if (train_set.size() == 0) raise(ErrorKind::Data, "train: dataset is empty");
    if (cfg.batch_size < 1) raise(ErrorKind::Config, "train: batch_size must be >= 1");
    if (cfg.epochs < 1) raise(ErrorKind::Config, "train: epochs must be >= 1");
    if (!(cfg.learning_rate >= 0.0)) raise(ErrorKind::Config, "train: learning_rate must be >= 0");
    loss_cfg.validate(model.n_tasks());
    const Dataset& eval_data = eval_set ? *eval_set : train_set;

    auto optimizer = Optimizer::create(cfg.optimizer, cfg.learning_rate);
    const i64 n = train_set.size();
    std::vector<i64> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    const auto t0 = std::chrono::steady_clock::now();
    for (i64 epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates on the raw mt19937_64 stream; deterministic across
        // standard libraries for a given seed.
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        for (i64 i = n - 1; i > 0; --i) {
            const i64 j = static_cast<i64>(rng() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }

        double loss_sum = 0.0;
        for (i64 begin = 0; begin < n; begin += cfg.batch_size) {
            const i64 end = std::min(n, begin + cfg.batch_size);
            const std::span<const i64> batch(order.data() + begin, static_cast<std::size_t>(end - begin));
            const auto ids = ids_by_field(train_set, batch);
            const auto labels = labels_by_task(train_set, batch);

            Tape tape;
            const TapeBinding bind = bind_all(tape, model.params());
            const std::vector<NodeId> logits = model.forward(tape, bind, ids);
            std::vector<NodeId> task_losses;
            for (i64 task = 0; task < model.n_tasks(); ++task)
                task_losses.push_back(ops::weighted_bce_mean(tape, logits[static_cast<std::size_t>(task)],
                                                             labels[static_cast<std::size_t>(task)],
                                                             loss_cfg.pos_weights[static_cast<std::size_t>(task)]));
            const NodeId loss = multitask_loss(tape, task_losses, loss_cfg.task_weights);
            const double loss_value = tape.value(loss)[0];

            tape.backward(loss);
            const auto grads = collect_grads(tape, bind, model.params());
            if (!std::isfinite(loss_value))
                raise(ErrorKind::Numeric, "loss became non-finite at epoch ", epoch, " batch ",
                      begin / cfg.batch_size, "; largest gradient norm in group '",
                      largest_grad_group(model.params(), grads), "'");
            optimizer->step(model.params(), grads);
            loss_sum += loss_value * static_cast<double>(end - begin);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.auc = evaluate_auc(model, eval_data, cfg.batch_size);
        stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (metrics_sink) (*metrics_sink) << metrics_line(stats) << std::flush;
        result.epochs.push_back(std::move(stats));
    }
    return result;
}

}  // namespace dcrnn
