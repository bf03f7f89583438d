#pragma once

#include "dcrnn/cross.hpp"
#include "dcrnn/models.hpp"
#include "dcrnn/synth.hpp"
#include "dcrnn/training.hpp"

namespace dcrnn {

// Minimal INI reader: [section] headers, key = value lines, full-line
// comments with '#' or ';'. Every value remembers its source line so
// validation errors can cite it.
class IniFile {
public:
    struct Value {
        std::string text;
        i64 line = 0;
    };

    static IniFile parse_file(const std::string& path);
    static IniFile parse_text(const std::string& text, const std::string& origin);

    bool has_section(const std::string& section) const;
    const Value* find(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& sec, const std::string& key, const std::string& fallback) const;
    i64 get_i64(const std::string& sec, const std::string& key, i64 fallback) const;
    double get_double(const std::string& sec, const std::string& key, double fallback) const;
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
    std::vector<i64> get_i64_list(const std::string& sec, const std::string& key, std::vector<i64> fallback) const;
    std::vector<double> get_double_list(const std::string& sec, const std::string& key,
                                        std::vector<double> fallback) const;

    // Rejects unknown sections / keys so config typos fail fast.
    void require_known(std::span<const std::pair<std::string, std::vector<std::string>>> layout) const;

    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string section, key;
        Value value;
    };
    [[noreturn]] void fail(const Value& v, const std::string& msg) const;

    std::string origin_;
    std::vector<Entry> entries_;
    std::vector<std::string> sections_;
};

enum class ModelKind { Dcrnn, Mmoe };

struct DataConfig {
    std::string train_path;
    std::string eval_path;  // optional; empty means evaluate on the training set
    Schema schema;
    std::vector<std::string> task_names{"click", "conversion"};
    i64 max_bad_lines = 0;
};

struct RunConfig {
    ModelKind kind = ModelKind::Dcrnn;
    DcrnnConfig dcrnn;
    MmoeConfig mmoe;
    TrainConfig train;
    LossConfig loss;
    DataConfig data;
    GrowthConfig bench;

    i64 n_tasks() const { return dcrnn.plan.n_tasks; }
};

// Parses and fully validates a run config; honors the DCRNN_SEED,
// DCRNN_TRAIN and DCRNN_EVAL environment overrides.
RunConfig load_config(const std::string& path);

SynthSpec load_synth_spec(const std::string& path);

// JSON snapshot of a resolved config (for the run manifest) and its inverse.
std::string run_config_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& json_text);

std::unique_ptr<ModelGraph> build_model(const RunConfig& cfg, Rng& rng);

}  // namespace dcrnn
