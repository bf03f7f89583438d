#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dcrnn/config.hpp"

namespace fs = std::filesystem;
using namespace dcrnn;

namespace {

std::string iso_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) raise(ErrorKind::Io, "cannot write ", path);
    os << text;
    if (!os) raise(ErrorKind::Io, "write failed: ", path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) raise(ErrorKind::Io, "cannot open ", path);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

int run_train(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = load_config(config_path);
    Dataset train_set = load_tsv(cfg.data.train_path, cfg.data.schema, cfg.data.max_bad_lines);
    train_set.task_names = cfg.data.task_names;
    Dataset eval_set;
    const bool have_eval = !cfg.data.eval_path.empty();
    if (have_eval) {
        eval_set = load_tsv(cfg.data.eval_path, cfg.data.schema, cfg.data.max_bad_lines);
        eval_set.task_names = cfg.data.task_names;
    }

    fs::create_directories(out_dir);
    const std::string checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
    const std::string metrics_path = (fs::path(out_dir) / "metrics.tsv").string();
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();

    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(run_config_json(cfg));
    manifest["seed"] = cfg.train.seed;
    manifest["started_at"] = iso_now();
    manifest["finished_at"] = "";
    manifest["outputs"] = {{"checkpoint", checkpoint_path}, {"metrics", metrics_path}, {"manifest", manifest_path}};
    write_file(manifest_path, manifest.dump(2) + "\n");

    Rng rng(cfg.train.seed);
    std::unique_ptr<ModelGraph> model = build_model(cfg, rng);
    std::cout << "training " << model->kind() << " (" << count_params(model->params()).total << " parameters) on "
              << train_set.size() << " examples\n";

    std::ofstream metrics(metrics_path);
    if (!metrics) raise(ErrorKind::Io, "cannot write ", metrics_path);
    const TrainResult result = train(*model, train_set, have_eval ? &eval_set : nullptr, cfg.train, cfg.loss, &metrics);

    save_checkpoint(model->params(), checkpoint_path);
    manifest["finished_at"] = iso_now();
    write_file(manifest_path, manifest.dump(2) + "\n");

    const EpochStats& last = result.epochs.back();
    std::cout << "final train loss " << last.train_loss;
    for (std::size_t t = 0; t < last.auc.size(); ++t)
        std::cout << ", auc/" << train_set.task_names[t] << " " << last.auc[t];
    std::cout << "\nwrote " << checkpoint_path << ", " << metrics_path << ", " << manifest_path << "\n";
    return 0;
}

int run_eval(const std::string& checkpoint_path, const std::string& data_path, std::string manifest_path) {
    if (manifest_path.empty()) manifest_path = (fs::path(checkpoint_path).parent_path() / "manifest.json").string();
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Config, manifest_path, ": ", e.what());
    }
    const RunConfig cfg = run_config_from_json(manifest.at("config").dump());

    Rng rng(cfg.train.seed);
    std::unique_ptr<ModelGraph> model = build_model(cfg, rng);
    load_checkpoint(model->params(), checkpoint_path);

    Dataset data = load_tsv(data_path, cfg.data.schema, cfg.data.max_bad_lines);
    data.task_names = cfg.data.task_names;
    const std::vector<double> aucs = evaluate_auc(*model, data, cfg.train.batch_size);

    std::cout << "task          auc\n";
    char line[64];
    for (std::size_t t = 0; t < aucs.size(); ++t) {
        std::snprintf(line, sizeof line, "%-12s  %.6f\n", cfg.data.task_names[t].c_str(), aucs[t]);
        std::cout << line;
    }
    return 0;
}

int run_bench(const std::string& config_path, const std::string& csv_path) {
    const RunConfig cfg = load_config(config_path);

    const std::vector<GrowthRow> rows = param_growth(cfg.bench);
    std::cout << "parameter growth by cross-layer kind\n" << growth_table_text(rows) << "\n";
    if (!csv_path.empty()) {
        std::ofstream os(csv_path);
        if (!os) raise(ErrorKind::Io, "cannot write ", csv_path);
        growth_table_csv(rows, os);
        std::cout << "wrote " << csv_path << "\n";
    }

    Rng rng(cfg.train.seed);
    DcrnnModel dcrnn_model(cfg.dcrnn, cfg.data.schema.vocab_sizes, rng);
    MmoeModel mmoe_model(cfg.mmoe, cfg.data.schema.vocab_sizes, rng);
    const ParamReport a = count_params(dcrnn_model.params());
    const ParamReport b = count_params(mmoe_model.params());
    std::cout << "dcrnn parameters\n" << param_report_text(a) << "\nmmoe parameters\n" << param_report_text(b);
    char line[64];
    std::snprintf(line, sizeof line, "\ndcrnn/mmoe parameter ratio: %.4f\n",
                  static_cast<double>(a.total) / static_cast<double>(b.total));
    std::cout << line;
    return 0;
}

int run_gen_data(const std::string& spec_path, const std::string& out_path) {
    const SynthSpec spec = load_synth_spec(spec_path);
    SynthDiagnostics diag;
    const Dataset data = gen_synthetic(spec, &diag);
    save_tsv(data, out_path);
    if (spec.n_examples == 0) {
        std::cout << "warning: n_examples = 0, wrote an empty dataset to " << out_path << "\n";
        return 0;
    }
    const double n = static_cast<double>(spec.n_examples);
    const auto stderr3 = [n](double rate) { return 3.0 * std::sqrt(rate * (1.0 - rate) / n); };
    char line[128];
    std::snprintf(line, sizeof line, "wrote %lld examples: click rate %.4f (+/- %.4f), conversion rate %.4f (+/- %.4f)\n",
                  static_cast<long long>(spec.n_examples), diag.click_rate, stderr3(diag.click_rate), diag.conv_rate,
                  stderr3(diag.conv_rate));
    std::cout << line << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task feature-cross models (DCRNN, MMoE) with training, evaluation and benchmarks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, checkpoint_path, data_path, manifest_path, csv_path, spec_path, out_path;

    CLI::App* cmd_train = app.add_subcommand("train", "Train the configured model; writes checkpoint, metrics log and manifest");
    cmd_train->add_option("--config", config_path, "Run configuration file (INI)")->required();
    cmd_train->add_option("--out", out_dir, "Output directory for checkpoint/metrics/manifest")->required();

    CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint: per-task AUC over a dataset");
    cmd_eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file written by train")->required();
    cmd_eval->add_option("--data", data_path, "Dataset (TSV) to score")->required();
    cmd_eval->add_option("--manifest", manifest_path, "Run manifest; defaults to manifest.json beside the checkpoint");

    CLI::App* cmd_bench = app.add_subcommand("bench", "Parameter-growth sweep and DCRNN-vs-MMoE parameter counts");
    cmd_bench->add_option("--config", config_path, "Run configuration file (INI)")->required();
    cmd_bench->add_option("--csv", csv_path, "Also write the growth table as CSV");

    CLI::App* cmd_gen = app.add_subcommand("gen-data", "Generate a synthetic correlated two-task dataset");
    cmd_gen->add_option("--spec", spec_path, "Generator spec file (INI)")->required();
    cmd_gen->add_option("--out", out_path, "Output dataset path (TSV)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_train->parsed()) return run_train(config_path, out_dir);
        if (cmd_eval->parsed()) return run_eval(checkpoint_path, data_path, manifest_path);
        if (cmd_bench->parsed()) return run_bench(config_path, csv_path);
        if (cmd_gen->parsed()) return run_gen_data(spec_path, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Numeric ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
