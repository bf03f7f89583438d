#include "dcrnn/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace dcrnn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    while (true) {
        const std::size_t pos = s.find(sep);
        out.emplace_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s = s.substr(pos + 1);
    }
    return out;
}

}  // namespace

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) raise(ErrorKind::Io, "cannot open config: ", path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_text(text, path);
}

IniFile IniFile::parse_text(const std::string& text, const std::string& origin) {
    IniFile f;
    f.origin_ = origin;
    std::string section;
    i64 line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = trim(std::string_view(text).substr(pos, nl == std::string::npos ? nl : nl - pos));
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') raise(ErrorKind::Config, origin, ":", line_no, ": unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) raise(ErrorKind::Config, origin, ":", line_no, ": empty section name");
            f.sections_.push_back(section);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            raise(ErrorKind::Config, origin, ":", line_no, ": expected 'key = value', got '", std::string(line), "'");
        if (section.empty()) raise(ErrorKind::Config, origin, ":", line_no, ": key outside any [section]");
        Entry e;
        e.section = section;
        e.key = std::string(trim(line.substr(0, eq)));
        e.value = Value{std::string(trim(line.substr(eq + 1))), line_no};
        if (e.key.empty()) raise(ErrorKind::Config, origin, ":", line_no, ": empty key");
        for (const Entry& prev : f.entries_)
            if (prev.section == e.section && prev.key == e.key)
                raise(ErrorKind::Config, origin, ":", line_no, ": duplicate key '", e.key, "' in [", section, "]");
        f.entries_.push_back(std::move(e));
    }
    return f;
}

bool IniFile::has_section(const std::string& section) const {
    for (const std::string& s : sections_)
        if (s == section) return true;
    return false;
}

const IniFile::Value* IniFile::find(const std::string& section, const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.section == section && e.key == key) return &e.value;
    return nullptr;
}

void IniFile::fail(const Value& v, const std::string& msg) const {
    raise(ErrorKind::Config, origin_, ":", v.line, ": ", msg);
}

std::string IniFile::get_string(const std::string& sec, const std::string& key, const std::string& fallback) const {
    const Value* v = find(sec, key);
    return v ? v->text : fallback;
}

i64 IniFile::get_i64(const std::string& sec, const std::string& key, i64 fallback) const {
    const Value* v = find(sec, key);
    if (!v) return fallback;
    i64 out = 0;
    auto [p, ec] = std::from_chars(v->text.data(), v->text.data() + v->text.size(), out);
    if (ec != std::errc() || p != v->text.data() + v->text.size())
        fail(*v, cat("[", sec, "] ", key, ": expected an integer, got '", v->text, "'"));
    return out;
}

double IniFile::get_double(const std::string& sec, const std::string& key, double fallback) const {
    const Value* v = find(sec, key);
    if (!v) return fallback;
    char* end = nullptr;
    const double out = std::strtod(v->text.c_str(), &end);
    if (end != v->text.c_str() + v->text.size() || v->text.empty())
        fail(*v, cat("[", sec, "] ", key, ": expected a number, got '", v->text, "'"));
    return out;
}

bool IniFile::get_bool(const std::string& sec, const std::string& key, bool fallback) const {
    const Value* v = find(sec, key);
    if (!v) return fallback;
    if (v->text == "true" || v->text == "1" || v->text == "yes") return true;
    if (v->text == "false" || v->text == "0" || v->text == "no") return false;
    fail(*v, cat("[", sec, "] ", key, ": expected true/false, got '", v->text, "'"));
}

std::vector<i64> IniFile::get_i64_list(const std::string& sec, const std::string& key,
                                       std::vector<i64> fallback) const {
    const Value* v = find(sec, key);
    if (!v) return fallback;
    std::vector<i64> out;
    for (const std::string& item : split(v->text, ',')) {
        i64 x = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        if (ec != std::errc() || p != item.data() + item.size() || item.empty())
            fail(*v, cat("[", sec, "] ", key, ": expected a comma-separated integer list, got '", v->text, "'"));
        out.push_back(x);
    }
    return out;
}

std::vector<double> IniFile::get_double_list(const std::string& sec, const std::string& key,
                                             std::vector<double> fallback) const {
    const Value* v = find(sec, key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(v->text, ',')) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size())
            fail(*v, cat("[", sec, "] ", key, ": expected a comma-separated number list, got '", v->text, "'"));
        out.push_back(x);
    }
    return out;
}

void IniFile::require_known(std::span<const std::pair<std::string, std::vector<std::string>>> layout) const {
    for (const std::string& s : sections_) {
        const auto* sec = [&]() -> const std::pair<std::string, std::vector<std::string>>* {
            for (const auto& l : layout)
                if (l.first == s) return &l;
            return nullptr;
        }();
        if (!sec) raise(ErrorKind::Config, origin_, ": unknown section [", s, "]");
    }
    for (const Entry& e : entries_) {
        for (const auto& l : layout) {
            if (l.first != e.section) continue;
            bool known = false;
            for (const std::string& k : l.second) known = known || k == e.key;
            if (!known) fail(e.value, cat("unknown key '", e.key, "' in [", e.section, "]"));
        }
    }
}

namespace {

Schema parse_schema(const IniFile& ini, const std::string& sec) {
    const IniFile::Value* v = ini.find(sec, "fields");
    if (!v) raise(ErrorKind::Config, ini.origin(), ": [", sec, "] fields is required (key:vocab,key:vocab,...)");
    Schema schema;
    for (const std::string& item : split(v->text, ',')) {
        const std::size_t colon = item.find(':');
        i64 key = 0, vocab = 0;
        bool ok = colon != std::string::npos;
        if (ok) {
            auto [p1, e1] = std::from_chars(item.data(), item.data() + colon, key);
            auto [p2, e2] = std::from_chars(item.data() + colon + 1, item.data() + item.size(), vocab);
            ok = e1 == std::errc() && p1 == item.data() + colon && e2 == std::errc() &&
                 p2 == item.data() + item.size();
        }
        if (!ok)
            raise(ErrorKind::Config, ini.origin(), ":", v->line, ": [", sec, "] fields: expected key:vocab, got '",
                  item, "'");
        schema.field_keys.push_back(key);
        schema.vocab_sizes.push_back(vocab);
    }
    try {
        schema.validate();
    } catch (const Error& e) {
        raise(ErrorKind::Config, ini.origin(), ":", v->line, ": ", e.what());
    }
    return schema;
}

const std::pair<std::string, std::vector<std::string>> kRunLayout[] = {
    {"model",
     {"kind", "embedding_dim", "cell", "direction", "hidden_dim", "ada", "towers", "experts", "expert_widths"}},
    {"plan", {"n_tasks", "window_len", "interval"}},
    {"train", {"epochs", "batch_size", "learning_rate", "seed", "optimizer"}},
    {"loss", {"pos_weights", "task_weights"}},
    {"data", {"train", "eval", "fields", "tasks", "max_bad_lines"}},
    {"bench", {"depths", "widths"}},
};

const std::pair<std::string, std::vector<std::string>> kSynthLayout[] = {
    {"synth", {"seed", "n_examples", "skip_examples", "latent_dim", "noise", "rho", "fields"}},
};

}  // namespace

RunConfig load_config(const std::string& path) {
    const IniFile ini = IniFile::parse_file(path);
    ini.require_known(kRunLayout);

    RunConfig cfg;

    const std::string kind = ini.get_string("model", "kind", "dcrnn");
    if (kind == "dcrnn")
        cfg.kind = ModelKind::Dcrnn;
    else if (kind == "mmoe")
        cfg.kind = ModelKind::Mmoe;
    else
        raise(ErrorKind::Config, ini.origin(), ": [model] kind must be dcrnn or mmoe, got '", kind, "'");

    cfg.dcrnn.embedding_dim = ini.get_i64("model", "embedding_dim", 32);
    const std::string cell = ini.get_string("model", "cell", "lstm");
    if (cell == "lstm")
        cfg.dcrnn.cell = CellKind::Lstm;
    else if (cell == "gru")
        cfg.dcrnn.cell = CellKind::Gru;
    else
        raise(ErrorKind::Config, ini.origin(), ": [model] cell must be lstm or gru, got '", cell, "'");
    const std::string dir = ini.get_string("model", "direction", "bi");
    if (dir == "uni")
        cfg.dcrnn.direction = Direction::Forward;
    else if (dir == "bi")
        cfg.dcrnn.direction = Direction::Bidirectional;
    else
        raise(ErrorKind::Config, ini.origin(), ": [model] direction must be uni or bi, got '", dir, "'");
    cfg.dcrnn.hidden_dim = ini.get_i64("model", "hidden_dim", 32);
    cfg.dcrnn.ada = ini.get_bool("model", "ada", true);
    cfg.dcrnn.tower_widths = ini.get_i64_list("model", "towers", {64, 32});

    cfg.dcrnn.plan.n_tasks = ini.get_i64("plan", "n_tasks", 2);
    cfg.dcrnn.plan.window_len = ini.get_i64("plan", "window_len", 3);
    cfg.dcrnn.plan.interval = ini.get_i64("plan", "interval", 1);
    try {
        validate_plan(cfg.dcrnn.plan);
    } catch (const Error& e) {
        const IniFile::Value* v = ini.find("plan", "interval");
        raise(ErrorKind::Config, ini.origin(), v ? cat(":", v->line) : "", ": ", e.what());
    }

    cfg.mmoe.embedding_dim = cfg.dcrnn.embedding_dim;
    cfg.mmoe.n_tasks = cfg.dcrnn.plan.n_tasks;
    cfg.mmoe.expert_count = ini.get_i64("model", "experts", 8);
    cfg.mmoe.expert_widths = ini.get_i64_list("model", "expert_widths", {128, 64});
    cfg.mmoe.tower_widths = cfg.dcrnn.tower_widths;

    cfg.train.epochs = ini.get_i64("train", "epochs", 3);
    cfg.train.batch_size = ini.get_i64("train", "batch_size", 1024);
    cfg.train.learning_rate = ini.get_double("train", "learning_rate", 1e-4);
    cfg.train.seed = static_cast<std::uint64_t>(ini.get_i64("train", "seed", 42));
    const std::string opt = ini.get_string("train", "optimizer", "adam");
    if (opt == "adam")
        cfg.train.optimizer = OptimizerKind::Adam;
    else if (opt == "sgd")
        cfg.train.optimizer = OptimizerKind::Sgd;
    else
        raise(ErrorKind::Config, ini.origin(), ": [train] optimizer must be adam or sgd, got '", opt, "'");
    if (cfg.train.epochs < 1) raise(ErrorKind::Config, ini.origin(), ": [train] epochs must be >= 1");
    if (cfg.train.batch_size < 1) raise(ErrorKind::Config, ini.origin(), ": [train] batch_size must be >= 1");
    if (!(cfg.train.learning_rate > 0.0))
        raise(ErrorKind::Config, ini.origin(), ": [train] learning_rate must be > 0");

    const i64 n_tasks = cfg.dcrnn.plan.n_tasks;
    cfg.loss.pos_weights = ini.get_double_list("loss", "pos_weights", std::vector<double>(n_tasks, 1.0));
    cfg.loss.task_weights = ini.get_double_list("loss", "task_weights", std::vector<double>(n_tasks, 1.0));
    try {
        cfg.loss.validate(n_tasks);
    } catch (const Error& e) {
        raise(ErrorKind::Config, ini.origin(), ": ", e.what());
    }

    cfg.data.train_path = ini.get_string("data", "train", "");
    cfg.data.eval_path = ini.get_string("data", "eval", "");
    cfg.data.schema = parse_schema(ini, "data");
    cfg.data.max_bad_lines = ini.get_i64("data", "max_bad_lines", 0);
    const IniFile::Value* tasks = ini.find("data", "tasks");
    if (tasks) {
        cfg.data.task_names = split(tasks->text, ',');
        if (static_cast<i64>(cfg.data.task_names.size()) != n_tasks)
            raise(ErrorKind::Config, ini.origin(), ":", tasks->line, ": expected ", n_tasks, " task names");
    }

    cfg.bench.depths = ini.get_i64_list("bench", "depths", {1, 2, 4, 8});
    cfg.bench.widths = ini.get_i64_list("bench", "widths", {cfg.dcrnn.hidden_dim});
    cfg.bench.feature_width = cfg.data.schema.field_count() * cfg.dcrnn.embedding_dim;
    cfg.bench.field_count = cfg.data.schema.field_count();

    // Environment overrides (seed and data paths only).
    if (const char* s = std::getenv("DCRNN_SEED")) {
        i64 seed = 0;
        auto [p, ec] = std::from_chars(s, s + std::string_view(s).size(), seed);
        if (ec != std::errc() || *p != '\0') raise(ErrorKind::Config, "DCRNN_SEED must be an integer, got '", s, "'");
        cfg.train.seed = static_cast<std::uint64_t>(seed);
    }
    if (const char* s = std::getenv("DCRNN_TRAIN")) cfg.data.train_path = s;
    if (const char* s = std::getenv("DCRNN_EVAL")) cfg.data.eval_path = s;

    return cfg;
}

SynthSpec load_synth_spec(const std::string& path) {
    const IniFile ini = IniFile::parse_file(path);
    ini.require_known(kSynthLayout);
    SynthSpec spec;
    spec.seed = static_cast<std::uint64_t>(ini.get_i64("synth", "seed", 7));
    spec.n_examples = ini.get_i64("synth", "n_examples", 0);
    spec.skip_examples = ini.get_i64("synth", "skip_examples", 0);
    spec.latent_dim = ini.get_i64("synth", "latent_dim", 4);
    spec.noise = ini.get_double("synth", "noise", 0.5);
    spec.rho = ini.get_double("synth", "rho", 0.8);
    spec.schema = parse_schema(ini, "synth");
    try {
        spec.validate();
    } catch (const Error& e) {
        raise(ErrorKind::Config, ini.origin(), ": ", e.what());
    }
    return spec;
}

namespace {

nlohmann::json schema_json(const Schema& s) {
    return {{"field_keys", s.field_keys}, {"vocab_sizes", s.vocab_sizes}};
}

Schema schema_from_json(const nlohmann::json& j) {
    Schema s;
    s.field_keys = j.at("field_keys").get<std::vector<i64>>();
    s.vocab_sizes = j.at("vocab_sizes").get<std::vector<i64>>();
    s.validate();
    return s;
}

}  // namespace

std::string run_config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["model"] = {
        {"kind", cfg.kind == ModelKind::Dcrnn ? "dcrnn" : "mmoe"},
        {"embedding_dim", cfg.dcrnn.embedding_dim},
        {"cell", cfg.dcrnn.cell == CellKind::Lstm ? "lstm" : "gru"},
        {"direction", cfg.dcrnn.direction == Direction::Bidirectional ? "bi" : "uni"},
        {"hidden_dim", cfg.dcrnn.hidden_dim},
        {"ada", cfg.dcrnn.ada},
        {"towers", cfg.dcrnn.tower_widths},
        {"experts", cfg.mmoe.expert_count},
        {"expert_widths", cfg.mmoe.expert_widths},
    };
    j["plan"] = {{"n_tasks", cfg.dcrnn.plan.n_tasks},
                 {"window_len", cfg.dcrnn.plan.window_len},
                 {"interval", cfg.dcrnn.plan.interval}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"learning_rate", cfg.train.learning_rate},
                  {"seed", cfg.train.seed},
                  {"optimizer", cfg.train.optimizer == OptimizerKind::Adam ? "adam" : "sgd"}};
    j["loss"] = {{"pos_weights", cfg.loss.pos_weights}, {"task_weights", cfg.loss.task_weights}};
    j["data"] = {{"train", cfg.data.train_path},
                 {"eval", cfg.data.eval_path},
                 {"schema", schema_json(cfg.data.schema)},
                 {"tasks", cfg.data.task_names},
                 {"max_bad_lines", cfg.data.max_bad_lines}};
    j["bench"] = {{"depths", cfg.bench.depths}, {"widths", cfg.bench.widths}};
    return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Config, "manifest config: ", e.what());
    }
    try {
        RunConfig cfg;
        const auto& m = j.at("model");
        cfg.kind = m.at("kind").get<std::string>() == "mmoe" ? ModelKind::Mmoe : ModelKind::Dcrnn;
        cfg.dcrnn.embedding_dim = m.at("embedding_dim").get<i64>();
        cfg.dcrnn.cell = m.at("cell").get<std::string>() == "gru" ? CellKind::Gru : CellKind::Lstm;
        cfg.dcrnn.direction =
            m.at("direction").get<std::string>() == "uni" ? Direction::Forward : Direction::Bidirectional;
        cfg.dcrnn.hidden_dim = m.at("hidden_dim").get<i64>();
        cfg.dcrnn.ada = m.at("ada").get<bool>();
        cfg.dcrnn.tower_widths = m.at("towers").get<std::vector<i64>>();
        const auto& p = j.at("plan");
        cfg.dcrnn.plan = {p.at("n_tasks").get<i64>(), p.at("window_len").get<i64>(), p.at("interval").get<i64>()};
        validate_plan(cfg.dcrnn.plan);
        cfg.mmoe.embedding_dim = cfg.dcrnn.embedding_dim;
        cfg.mmoe.n_tasks = cfg.dcrnn.plan.n_tasks;
        cfg.mmoe.expert_count = m.at("experts").get<i64>();
        cfg.mmoe.expert_widths = m.at("expert_widths").get<std::vector<i64>>();
        cfg.mmoe.tower_widths = cfg.dcrnn.tower_widths;
        const auto& t = j.at("train");
        cfg.train.epochs = t.at("epochs").get<i64>();
        cfg.train.batch_size = t.at("batch_size").get<i64>();
        cfg.train.learning_rate = t.at("learning_rate").get<double>();
        cfg.train.seed = t.at("seed").get<std::uint64_t>();
        cfg.train.optimizer = t.at("optimizer").get<std::string>() == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
        const auto& l = j.at("loss");
        cfg.loss.pos_weights = l.at("pos_weights").get<std::vector<double>>();
        cfg.loss.task_weights = l.at("task_weights").get<std::vector<double>>();
        const auto& d = j.at("data");
        cfg.data.train_path = d.at("train").get<std::string>();
        cfg.data.eval_path = d.at("eval").get<std::string>();
        cfg.data.schema = schema_from_json(d.at("schema"));
        cfg.data.task_names = d.at("tasks").get<std::vector<std::string>>();
        cfg.data.max_bad_lines = d.at("max_bad_lines").get<i64>();
        const auto& b = j.at("bench");
        cfg.bench.depths = b.at("depths").get<std::vector<i64>>();
        cfg.bench.widths = b.at("widths").get<std::vector<i64>>();
        cfg.bench.feature_width = cfg.data.schema.field_count() * cfg.dcrnn.embedding_dim;
        cfg.bench.field_count = cfg.data.schema.field_count();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Config, "manifest config: ", e.what());
    }
}

std::unique_ptr<ModelGraph> build_model(const RunConfig& cfg, Rng& rng) {
    if (cfg.kind == ModelKind::Dcrnn)
        return std::make_unique<DcrnnModel>(cfg.dcrnn, cfg.data.schema.vocab_sizes, rng);
    return std::make_unique<MmoeModel>(cfg.mmoe, cfg.data.schema.vocab_sizes, rng);
}

}  // namespace dcrnn
