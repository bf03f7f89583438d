#include <doctest.h>

#include <cstring>

#include "dcrnn/evaluation.hpp"
#include "gradcheck.hpp"

using namespace dcrnn;

namespace {

const std::vector<i64> kVocabs{5, 7};

std::vector<std::vector<i64>> tiny_batch() { return {{1, 4, 2}, {0, 6, 3}}; }  // 2 fields, 3 examples

DcrnnConfig tiny_dcrnn() {
    DcrnnConfig cfg;
    cfg.embedding_dim = 2;
    cfg.plan = {2, 3, 1};
    cfg.cell = CellKind::Gru;
    cfg.direction = Direction::Forward;
    cfg.hidden_dim = 3;
    cfg.ada = true;
    cfg.tower_widths = {4};
    return cfg;
}

MmoeConfig tiny_mmoe() {
    MmoeConfig cfg;
    cfg.embedding_dim = 2;
    cfg.n_tasks = 2;
    cfg.expert_count = 3;
    cfg.expert_widths = {4, 3};
    cfg.tower_widths = {4};
    return cfg;
}

// Copies every parameter whose full name starts with `from` onto the
// parameter with the same suffix under `to`.
void copy_group(ParamSet& ps, const std::string& from, const std::string& to) {
    for (ParamId id = 0; id < ps.size(); ++id) {
        const auto& e = ps.entry(id);
        if (e.name.rfind(from, 0) != 0) continue;
        const std::string target = to + e.name.substr(from.size());
        for (ParamId jd = 0; jd < ps.size(); ++jd)
            if (ps.entry(jd).name == target) ps.value(jd) = e.value;
    }
}

}  // namespace

TEST_CASE("dcrnn_forward: one logit column per task") {
    Rng rng(1);
    DcrnnModel model(tiny_dcrnn(), kVocabs, rng);
    Tape t;
    const TapeBinding bind = bind_all(t, model.params());
    const auto logits = model.forward(t, bind, tiny_batch());
    REQUIRE(logits.size() == 2);
    for (NodeId l : logits) CHECK(t.value(l).shape() == Shape{3, 1});
}

TEST_CASE("dcrnn_forward: I=0 with tied task parameters gives identical task logits") {
    DcrnnConfig cfg = tiny_dcrnn();
    cfg.ada = false;
    cfg.plan = {2, 3, 0};
    Rng rng(2);
    DcrnnModel model(cfg, kVocabs, rng);
    copy_group(model.params(), "task0.rnn", "task1.rnn");
    copy_group(model.params(), "task0.tower", "task1.tower");

    Tape t;
    const TapeBinding bind = bind_all(t, model.params());
    const auto logits = model.forward(t, bind, tiny_batch());
    CHECK(t.value(logits[0]) == t.value(logits[1]));
}

TEST_CASE("dcrnn_forward: zeroed towers give logit 0 everywhere") {
    Rng rng(3);
    DcrnnModel model(tiny_dcrnn(), kVocabs, rng);
    ParamSet& ps = model.params();
    for (ParamId id = 0; id < ps.size(); ++id)
        if (ps.entry(id).name.find(".tower.out.") != std::string::npos)
            ps.value(id) = Tensor::zeros(ps.value(id).shape());

    Tape t;
    const TapeBinding bind = bind_all(t, ps);
    for (NodeId l : model.forward(t, bind, tiny_batch())) {
        const Tensor& v = t.value(l);
        for (i64 i = 0; i < v.size(); ++i) CHECK(v[i] == 0.0);
    }
}

TEST_CASE("dcrnn: ada-on with zero bank matches ada-off bit for bit") {
    DcrnnConfig on = tiny_dcrnn();
    DcrnnConfig off = tiny_dcrnn();
    off.ada = false;
    Rng rng_on(4), rng_off(4);
    DcrnnModel m_on(on, kVocabs, rng_on);
    DcrnnModel m_off(off, kVocabs, rng_off);

    // Same seed but m_on interleaves zero-init bank params; align by copying
    // every shared-name tensor from m_on into m_off.
    ParamSet& po = m_on.params();
    ParamSet& pf = m_off.params();
    for (ParamId a = 0; a < po.size(); ++a)
        for (ParamId b = 0; b < pf.size(); ++b)
            if (po.entry(a).name == pf.entry(b).name) pf.value(b) = po.value(a);

    Tape ta, tb;
    const auto la = m_on.forward(ta, bind_all(ta, po), tiny_batch());
    const auto lb = m_off.forward(tb, bind_all(tb, pf), tiny_batch());
    for (std::size_t i = 0; i < la.size(); ++i) {
        const Tensor& va = ta.value(la[i]);
        const Tensor& vb = tb.value(lb[i]);
        REQUIRE(va.shape() == vb.shape());
        CHECK(std::memcmp(va.data(), vb.data(), sizeof(double) * static_cast<std::size_t>(va.size())) == 0);
    }
}

TEST_CASE("mmoe_forward: a single expert makes the gate irrelevant") {
    MmoeConfig cfg = tiny_mmoe();
    cfg.expert_count = 1;
    Rng rng(5);
    MmoeModel model(cfg, kVocabs, rng);
    Tape t;
    const TapeBinding bind = bind_all(t, model.params());
    const auto logits = model.forward(t, bind, tiny_batch());
    REQUIRE(logits.size() == 2);
    for (NodeId l : logits) CHECK(t.value(l).shape() == Shape{3, 1});
}

TEST_CASE("mmoe_forward: identical experts make gate weights irrelevant") {
    Rng rng(6);
    MmoeModel model(tiny_mmoe(), kVocabs, rng);
    ParamSet& ps = model.params();
    copy_group(ps, "experts.e0", "experts.e1");
    copy_group(ps, "experts.e0", "experts.e2");

    auto run = [&]() {
        Tape t;
        const TapeBinding bind = bind_all(t, ps);
        const auto logits = model.forward(t, bind, tiny_batch());
        std::vector<double> out;
        for (NodeId l : logits)
            for (i64 i = 0; i < t.value(l).size(); ++i) out.push_back(t.value(l)[i]);
        return out;
    };
    const auto before = run();
    // Re-randomize the gates; with identical experts the mixture is unchanged.
    Rng rng2(99);
    for (ParamId id = 0; id < ps.size(); ++id)
        if (ps.entry(id).group == "gates")
            ps.value(id) = gradcheck::random_tensor(ps.value(id).shape(), rng2);
    const auto after = run();
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-12));
}

TEST_CASE("mmoe_forward: equal gate logits mix experts uniformly") {
    Tape t;
    const NodeId gate = ops::softmax_rows(t, t.leaf(Tensor(Shape{2, 4}, {3, 3, 3, 3, -1, -1, -1, -1})));
    const Tensor& g = t.value(gate);
    for (i64 i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("models: permuting the batch permutes logits and nothing else") {
    Rng rng(7);
    DcrnnModel dcrnn_model(tiny_dcrnn(), kVocabs, rng);
    MmoeModel mmoe_model(tiny_mmoe(), kVocabs, rng);

    const std::vector<std::vector<i64>> ids = {{1, 4, 2, 0}, {0, 6, 3, 5}};
    const std::vector<std::vector<i64>> permuted = {{0, 2, 1, 4}, {5, 3, 0, 6}};  // order 3,2,0,1
    const i64 perm[4] = {3, 2, 0, 1};

    for (const ModelGraph* model : {static_cast<const ModelGraph*>(&dcrnn_model),
                                    static_cast<const ModelGraph*>(&mmoe_model)}) {
        Tape ta, tb;
        const auto la = model->forward(ta, bind_all(ta, model->params()), ids);
        const auto lb = model->forward(tb, bind_all(tb, model->params()), permuted);
        for (std::size_t task = 0; task < la.size(); ++task)
            for (i64 b = 0; b < 4; ++b) CHECK(ta.value(la[task])[perm[b]] == tb.value(lb[task])[b]);
    }
}

TEST_CASE("models: end-to-end gradient check on a 2-example batch") {
    const std::vector<std::vector<i64>> batch = {{1, 3}, {0, 6}};
    const std::vector<double> labels0{1, 0}, labels1{0, 0};

    auto check_model = [&](const ModelGraph& model) {
        std::vector<Tensor> inputs;
        for (ParamId id = 0; id < model.params().size(); ++id) inputs.push_back(model.params().value(id));
        auto r = gradcheck::check(inputs, [&](Tape& t, const std::vector<NodeId>& l) {
            const TapeBinding bind{l};
            const auto logits = model.forward(t, bind, batch);
            const NodeId l0 = ops::weighted_bce_mean(t, logits[0], labels0, 2.0);
            const NodeId l1 = ops::weighted_bce_mean(t, logits[1], labels1, 1.0);
            return ops::add(t, l0, l1);
        });
        return r;
    };

    Rng rng(8);
    DcrnnConfig dcfg = tiny_dcrnn();
    dcfg.direction = Direction::Bidirectional;
    dcfg.cell = CellKind::Lstm;
    DcrnnModel dcrnn_model(dcfg, kVocabs, rng);
    const auto r1 = check_model(dcrnn_model);
    CHECK(r1.max_rel_err < 1e-5);

    MmoeModel mmoe_model(tiny_mmoe(), kVocabs, rng);
    const auto r2 = check_model(mmoe_model);
    CHECK(r2.max_rel_err < 1e-5);
}

TEST_CASE("degenerate_check: classification and overlap") {
    DcrnnConfig cfg = tiny_dcrnn();

    cfg.plan = {2, 3, 0};
    DegenerateReport hard = degenerate_check(cfg);
    CHECK(hard.kind == SharingKind::Hard);
    CHECK(hard.overlap == 3);
    CHECK(hard.text.find("hard") != std::string::npos);

    cfg.plan = {2, 3, 3};
    CHECK(degenerate_check(cfg).kind == SharingKind::Soft);

    cfg.plan = {2, 5, 2};
    DegenerateReport partial = degenerate_check(cfg);
    CHECK(partial.kind == SharingKind::Partial);
    CHECK(partial.overlap == 3);
}

TEST_CASE("model parameter groups carry the documented names") {
    Rng rng(9);
    DcrnnModel dcrnn_model(tiny_dcrnn(), kVocabs, rng);
    const ParamReport pr = count_params(dcrnn_model.params());
    std::vector<std::string> names;
    for (const auto& g : pr.groups) names.push_back(g.name);
    for (const char* expect : {"embedding", "ada", "task0.rnn", "task0.tower", "task1.rnn", "task1.tower"})
        CHECK(std::find(names.begin(), names.end(), expect) != names.end());

    MmoeModel mmoe_model(tiny_mmoe(), kVocabs, rng);
    const ParamReport mr = count_params(mmoe_model.params());
    names.clear();
    for (const auto& g : mr.groups) names.push_back(g.name);
    for (const char* expect : {"embedding", "experts", "gates", "task0.tower", "task1.tower"})
        CHECK(std::find(names.begin(), names.end(), expect) != names.end());
}
