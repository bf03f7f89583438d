#pragma once

#include <ostream>

#include "dcrnn/data.hpp"
#include "dcrnn/models.hpp"

namespace dcrnn {

struct ScoredSet {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;  // {0,1}
};

// Exact rank-based AUC (Mann-Whitney with average ranks for ties).
// Requires at least one positive and one negative.
double auc(const ScoredSet& s);

struct ParamReport {
    struct Group {
        std::string name;
        i64 count = 0;
    };
    std::vector<Group> groups;
    i64 total = 0;
};

ParamReport count_params(const ParamSet& params);
std::string param_report_text(const ParamReport& r);

// Raw logits per task over the whole dataset, in example order. When
// `parallel` is set the batches are scored across threads; the result is
// identical to the serial order either way.
std::vector<std::vector<double>> score_dataset(const ModelGraph& model, const Dataset& data, i64 batch_size,
                                               bool parallel = true);

// Per-task AUC of a model over a dataset.
std::vector<double> evaluate_auc(const ModelGraph& model, const Dataset& data, i64 batch_size,
                                 bool parallel = true);

struct CompareReport {
    struct Row {
        std::string model;
        std::string task;
        double auc = 0.0;
        i64 params = 0;
    };
    std::vector<Row> rows;
    double param_ratio = 0.0;  // params(a) / params(b)
};

CompareReport compare_models(const ModelGraph& a, const ModelGraph& b, const Dataset& eval_data, i64 batch_size);
std::string compare_text(const CompareReport& r);
void compare_csv(const CompareReport& r, std::ostream& os);

}  // namespace dcrnn
