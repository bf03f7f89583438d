#include "dcrnn/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "dcrnn/kernels.hpp"

namespace dcrnn {

double auc(const ScoredSet& s) {
    const i64 n = static_cast<i64>(s.scores.size());
    if (static_cast<i64>(s.labels.size()) != n)
        raise(ErrorKind::Contract, "auc: ", s.labels.size(), " labels for ", s.scores.size(), " scores");
    i64 positives = 0;
    for (std::uint8_t l : s.labels) positives += l;
    const i64 negatives = n - positives;
    if (positives == 0 || negatives == 0)
        raise(ErrorKind::Metric, "auc undefined: need both classes, got ", positives, " positives and ", negatives,
              " negatives");

    std::vector<i64> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](i64 a, i64 b) { return s.scores[static_cast<std::size_t>(a)] < s.scores[static_cast<std::size_t>(b)]; });

    // Average ranks over tie runs, accumulate ranks of positives.
    double rank_sum_pos = 0.0;
    i64 i = 0;
    while (i < n) {
        i64 j = i;
        while (j + 1 < n && s.scores[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])] ==
                                s.scores[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
            ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);  // 1-based
        for (i64 k = i; k <= j; ++k)
            if (s.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]) rank_sum_pos += avg_rank;
        i = j + 1;
    }

    const double p = static_cast<double>(positives), q = static_cast<double>(negatives);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
}

ParamReport count_params(const ParamSet& params) {
    ParamReport r;
    for (ParamId id = 0; id < params.size(); ++id) {
        const ParamSet::Entry& e = params.entry(id);
        auto it = std::find_if(r.groups.begin(), r.groups.end(),
                               [&](const ParamReport::Group& g) { return g.name == e.group; });
        if (it == r.groups.end()) {
            r.groups.push_back({e.group, e.value.size()});
        } else {
            it->count += e.value.size();
        }
        r.total += e.value.size();
    }
    return r;
}

std::string param_report_text(const ParamReport& r) {
    std::string out;
    char line[80];
    for (const auto& g : r.groups) {
        std::snprintf(line, sizeof line, "%-16s %10lld\n", g.name.c_str(), static_cast<long long>(g.count));
        out += line;
    }
    std::snprintf(line, sizeof line, "%-16s %10lld\n", "total", static_cast<long long>(r.total));
    out += line;
    return out;
}

std::vector<std::vector<double>> score_dataset(const ModelGraph& model, const Dataset& data, i64 batch_size,
                                               bool parallel) {
    if (batch_size < 1) raise(ErrorKind::Contract, "score_dataset: batch_size must be >= 1");
    const i64 n = data.size();
    const i64 tasks = model.n_tasks();
    std::vector<std::vector<double>> scores(static_cast<std::size_t>(tasks),
                                            std::vector<double>(static_cast<std::size_t>(n)));
    if (n == 0) return scores;
    const i64 n_batches = (n + batch_size - 1) / batch_size;

    // One tape per batch; the model parameters are read-only here, so batches
    // can score on worker threads while each tape stays thread-confined.
    auto score_batch = [&](i64 bi) {
        const i64 begin = bi * batch_size;
        const i64 end = std::min(n, begin + batch_size);
        std::vector<i64> idx(static_cast<std::size_t>(end - begin));
        std::iota(idx.begin(), idx.end(), begin);
        const auto ids = ids_by_field(data, idx);
        Tape tape;
        const TapeBinding bind = bind_all(tape, model.params());
        const std::vector<NodeId> logits = model.forward(tape, bind, ids);
        for (i64 task = 0; task < tasks; ++task) {
            const Tensor& v = tape.value(logits[static_cast<std::size_t>(task)]);
            for (i64 b = 0; b < end - begin; ++b)
                scores[static_cast<std::size_t>(task)][static_cast<std::size_t>(begin + b)] = v[b];
        }
    };

    if (parallel && n_batches > 1 && !omp_in_parallel()) {
#pragma omp parallel for schedule(static)
        for (i64 bi = 0; bi < n_batches; ++bi) score_batch(bi);
    } else {
        for (i64 bi = 0; bi < n_batches; ++bi) score_batch(bi);
    }
    return scores;
}

std::vector<double> evaluate_auc(const ModelGraph& model, const Dataset& data, i64 batch_size, bool parallel) {
    const auto scores = score_dataset(model, data, batch_size, parallel);
    std::vector<i64> all(static_cast<std::size_t>(data.size()));
    std::iota(all.begin(), all.end(), 0);
    const auto labels = labels_by_task(data, all);
    std::vector<double> out;
    for (i64 task = 0; task < model.n_tasks(); ++task) {
        ScoredSet s;
        s.scores = scores[static_cast<std::size_t>(task)];
        s.labels.assign(labels[static_cast<std::size_t>(task)].begin(), labels[static_cast<std::size_t>(task)].end());
        out.push_back(auc(s));
    }
    return out;
}

CompareReport compare_models(const ModelGraph& a, const ModelGraph& b, const Dataset& eval_data, i64 batch_size) {
    CompareReport r;
    for (const ModelGraph* m : {&a, &b}) {
        const std::vector<double> aucs = evaluate_auc(*m, eval_data, batch_size);
        const i64 total = count_params(m->params()).total;
        for (i64 task = 0; task < m->n_tasks(); ++task) {
            const std::string task_name = task < static_cast<i64>(eval_data.task_names.size())
                                              ? eval_data.task_names[static_cast<std::size_t>(task)]
                                              : cat("task", task);
            r.rows.push_back({m->kind(), task_name, aucs[static_cast<std::size_t>(task)], total});
        }
    }
    r.param_ratio = static_cast<double>(count_params(a.params()).total) /
                    static_cast<double>(count_params(b.params()).total);
    return r;
}

std::string compare_text(const CompareReport& r) {
    std::string out = "model   task          auc      params\n";
    char line[96];
    for (const auto& row : r.rows) {
        std::snprintf(line, sizeof line, "%-6s  %-12s  %.4f  %9lld\n", row.model.c_str(), row.task.c_str(), row.auc,
                      static_cast<long long>(row.params));
        out += line;
    }
    std::snprintf(line, sizeof line, "param ratio (%s/%s): %.4f\n", r.rows.front().model.c_str(),
                  r.rows.back().model.c_str(), r.param_ratio);
    out += line;
    return out;
}

void compare_csv(const CompareReport& r, std::ostream& os) {
    os << "model,task,auc,params\n";
    char buf[32];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%.6f", row.auc);
        os << row.model << "," << row.task << "," << buf << "," << row.params << "\n";
    }
}

}  // namespace dcrnn
