// Copyright 2026 The gqe-pdpo Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "optimizer.hpp"
#include "test_util.hpp"
#include "train_config.hpp"
#include "trainer.hpp"

using namespace gqe;
using namespace gqe::train;

namespace {

TrainConfig small_config(int steps = 20) {
    TrainConfig cfg = desk_defaults();
    cfg.model.embed_dim = 16;
    cfg.model.ff_dim = 32;
    cfg.model.n_heads = 2;
    cfg.model.n_layers = 1;
    cfg.schedule.n_steps = steps;
    cfg.learning_rate = 1e-3;
    cfg.hamiltonian_path = gqe::testing::data_path("h2.json");
    return cfg;
}

RunLog run(const TrainConfig &cfg) { return Trainer(cfg, gqe::testing::h2_file()).run(); }

std::string csv_of(const RunLog &log) {
    std::ostringstream out;
    write_csv(log, out);
    return out.str();
}

std::vector<EnergySample> random_samples(const model::ModelParams &reference, int count, int len,
                                         int vocab, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<EnergySample> out;
    for (int i = 0; i < count; ++i) {
        pool::CircuitSequence seq(len);
        for (auto &t : seq)
            t = static_cast<int>(rng() % vocab);
        out.push_back({seq, -1.0 - 0.01 * ((i * 3) % count), 0, model::sequence_log_prob(reference, seq).total});
    }
    return out;
}

double hf_energy() {
    const auto &h = gqe::testing::h2_file().hamiltonian;
    return sim::expectation(sim::hartree_fock_state(h.n_qubits, h.hf_occupation), h);
}

} // namespace

TEST_SUITE("trainer") {

TEST_CASE("temperature schedule") {
    const ScheduleConfig s{1.5, 0.7, 3000};
    CHECK(temperature(0, s) == 1.5);
    CHECK(temperature(2999, s) == 0.7);
    CHECK(temperature(1500, s) == doctest::Approx(1.5 - 0.8 * 1500.0 / 2999.0).epsilon(1e-15));
    CHECK(temperature(1500, s) == doctest::Approx(1.09987).epsilon(1e-5));
    CHECK_THROWS_AS(temperature(-1, s), InputError);
    CHECK_THROWS_AS(temperature(3000, s), InputError);
    double last = 2.0;
    for (int t = 0; t < 3000; ++t) {
        const double T = temperature(t, s);
        CHECK(T <= last);
        last = T;
    }
    CHECK(temperature(0, ScheduleConfig{1.5, 0.7, 1}) == 1.5);
    CHECK_THROWS_AS((ScheduleConfig{0.0, 0.7, 10}.validate()), InputError);
    CHECK_THROWS_AS((ScheduleConfig{1.5, 0.7, 0}.validate()), InputError);
}

TEST_CASE("gradcheck on a tiny model") {
    const auto params = gqe::testing::tiny_model(101, 5, 4);
    const auto reference = gqe::testing::tiny_model(102, 5, 4);
    REQUIRE(params.size() <= 1000);
    const auto samples = random_samples(reference, 6, 4, 5, 3);
    const auto batch = loss::pair_best_vs_others(samples);
    for (const loss::LossConfig cfg :
         {loss::LossConfig{0.1, 0.0, loss::Variant::DPO}, loss::LossConfig{0.1, 0.25, loss::Variant::PDPO},
          loss::LossConfig{0.1, 0.5, loss::Variant::PDPO}, loss::LossConfig{0.1, 1.0, loss::Variant::PDPO}}) {
        CAPTURE(cfg.alpha);
        CHECK(gradcheck(params, samples, batch, cfg) < 1e-4);
    }
    // Large beta: the central-difference error must shrink quadratically.
    const loss::LossConfig sharp{2.0, 0.5, loss::Variant::PDPO};
    const double coarse = gradcheck(params, samples, batch, sharp, 1e-3);
    const double fine = gradcheck(params, samples, batch, sharp, 1e-4);
    CHECK(coarse / fine == doctest::Approx(100.0).epsilon(0.05));
    CHECK(gradcheck(params, samples, batch, sharp, 1e-5) < 1e-4);
}

TEST_CASE("preference_loss agrees with the grad route") {
    const auto params = gqe::testing::tiny_model(5, 5, 4);
    const auto reference = gqe::testing::tiny_model(6, 5, 4);
    const auto samples = random_samples(reference, 5, 4, 5, 9);
    const auto batch = loss::pair_best_vs_others(samples);
    const loss::LossConfig cfg{0.1, 0.5, loss::Variant::PDPO};
    std::vector<double> grad(params.size(), 0.0);
    CHECK(preference_loss_and_grad(params, samples, batch, cfg, grad) ==
          doctest::Approx(preference_loss(params, samples, batch, cfg)).epsilon(1e-14));
}

TEST_CASE("one-step run") {
    auto cfg = small_config(1);
    cfg.samples_per_step = 2;
    const auto log = run(cfg);
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].temperature == 1.5);
}

TEST_CASE("runs are deterministic") {
    auto cfg = small_config(15);
    cfg.hybrid = {true, 25, 2, 5};
    const auto a = run(cfg), b = run(cfg);
    CHECK(csv_of(a) == csv_of(b));
    CHECK(a.best_sequence == b.best_sequence);
    CHECK(summary_json(a) == summary_json(b));
    cfg.seed = 43;
    CHECK(csv_of(run(cfg)) != csv_of(a));
}

TEST_CASE("online-only runs pair the best against every strictly worse sample") {
    auto cfg = small_config(20);
    cfg.hybrid = {false, 1000, 2, 0};
    Trainer trainer(cfg, gqe::testing::h2_file());
    for (int t = 0; t < 20; ++t) {
        const auto rec = trainer.step(t);
        // A disabled buffer still stores every online sample.
        const auto stored = trainer.buffer().samples();
        std::vector<double> energies;
        for (const auto &s : stored)
            if (s.created_step == t)
                energies.push_back(s.energy);
        REQUIRE(energies.size() == 10);
        const double best = *std::min_element(energies.begin(), energies.end());
        const auto ties = std::count(energies.begin(), energies.end(), best);
        CHECK(rec.n_pairs == (ties == 10 ? 0 : 10 - ties));
        CHECK(rec.batch_min_energy == best);
    }
}

TEST_CASE("pair count equals samples minus ties with the best") {
    auto cfg = small_config(25);
    cfg.hybrid = {true, 25, 2, 10};
    Trainer trainer(cfg, gqe::testing::h2_file());
    for (int t = 0; t < 25; ++t) {
        const auto before = std::vector<EnergySample>(trainer.buffer().samples().begin(),
                                                      trainer.buffer().samples().end());
        const auto rec = trainer.step(t);
        const auto after = trainer.buffer().samples();
        CHECK(rec.buffer_size == after.size());
        const int expected_max = 9 + (t >= 10 ? static_cast<int>(std::min<std::size_t>(2, before.size())) : 0);
        CHECK(rec.n_pairs <= expected_max);
    }
}

TEST_CASE("alpha zero matches DPO step by step") {
    auto cfg = small_config(20);
    cfg.loss = {0.1, 0.0, loss::Variant::PDPO};
    const auto pdpo = run(cfg);
    cfg.loss.variant = loss::Variant::DPO;
    const auto dpo = run(cfg);
    REQUIRE(pdpo.records.size() == dpo.records.size());
    for (std::size_t i = 0; i < dpo.records.size(); ++i) {
        const double a = pdpo.records[i].loss, b = dpo.records[i].loss;
        if (std::isnan(b))
            CHECK(std::isnan(a));
        else
            CHECK(std::abs(a - b) <= 1e-10);
    }
}

TEST_CASE("forced identity stays at the Hartree-Fock energy and never updates") {
    auto cfg = small_config(10);
    cfg.force_identity = true;
    Trainer trainer(cfg, gqe::testing::h2_file());
    const auto initial = trainer.params();
    for (int t = 0; t < 10; ++t) {
        const auto rec = trainer.step(t);
        CHECK(rec.min_energy_so_far == doctest::Approx(hf_energy()).epsilon(1e-12));
        CHECK(rec.n_pairs == 0);
        CHECK(std::isnan(rec.loss));
    }
    CHECK(trainer.params() == initial);
}

TEST_CASE("parameters change iff the step had pairs") {
    auto cfg = small_config(30);
    cfg.hybrid = {true, 25, 2, 3};
    Trainer trainer(cfg, gqe::testing::h2_file());
    for (int t = 0; t < 30; ++t) {
        const auto before = trainer.params();
        const auto rec = trainer.step(t);
        CHECK((rec.n_pairs > 0) == !(trainer.params() == before));
    }
}

TEST_CASE("debug checks pass on a hybrid run with dropout") {
    auto cfg = small_config(20);
    cfg.hybrid = {true, 25, 2, 2};
    cfg.debug_checks = true;
    cfg.model.dropout = 0.1;
    CHECK_NOTHROW(run(cfg));
}

TEST_CASE("min energy so far is monotone and bounded by the exact energy") {
    const double exact = sim::exact_ground_energy(gqe::testing::h2_file().hamiltonian);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto cfg = small_config(40);
        cfg.seed = seed;
        cfg.hybrid = {seed % 2 == 1, 25, 2, 10};
        const auto log = run(cfg);
        double last = std::numeric_limits<double>::infinity();
        for (const auto &r : log.records) {
            CHECK(r.min_energy_so_far <= last);
            CHECK(r.min_energy_so_far >= exact - 1e-8);
            CHECK(r.min_energy_so_far <= r.batch_min_energy);
            last = r.min_energy_so_far;
        }
        CHECK(log.best_energy == last);
        const auto &pool = io::pool_for(gqe::testing::h2_file());
        CHECK(pool::evaluate_sequence(pool, log.best_sequence, gqe::testing::h2_file().hamiltonian) ==
              log.best_energy);
    }
}

TEST_CASE("CSV and summary format") {
    auto cfg = small_config(3);
    cfg.force_identity = true;
    const auto log = run(cfg);
    const auto csv = csv_of(log);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,temperature,batch_min_energy,min_energy_so_far,loss,n_pairs,buffer_size");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.find(",nan,0,") != std::string::npos);
        ++rows;
    }
    CHECK(rows == 3);

    auto cfg2 = small_config(2);
    const auto log2 = run(cfg2);
    std::istringstream in2(csv_of(log2));
    std::getline(in2, line);
    std::getline(in2, line);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');)
        cells.push_back(c);
    REQUIRE(cells.size() == 7);
    CHECK(std::stod(cells[2]) == log2.records[0].batch_min_energy);
    CHECK(std::stod(cells[4]) == log2.records[0].loss);

    const auto doc = nlohmann::json::parse(summary_json(log2));
    CHECK(doc.at("best_energy").get<double>() == log2.best_energy);
    CHECK(doc.at("best_sequence").get<std::vector<int>>() == log2.best_sequence);
    CHECK(doc.at("seed").get<std::uint64_t>() == 42);
    CHECK(doc.at("config_digest").get<std::string>() == cfg2.digest());
}

TEST_CASE("train writes every requested artifact") {
    const auto dir = std::filesystem::temp_directory_path() / "gqe_test_train";
    std::filesystem::create_directories(dir);
    auto cfg = small_config(4);
    cfg.hybrid = {true, 5, 2, 1};
    cfg.output_path = (dir / "run.csv").string();
    cfg.checkpoint_path = (dir / "model.ckpt").string();
    cfg.buffer_dump_path = (dir / "buffer.jsonl").string();
    const auto log = train::train(cfg);
    CHECK(std::filesystem::exists(dir / "run.csv"));
    CHECK(std::filesystem::exists(dir / "run.summary.json"));
    CHECK(cfg.effective_summary_path() == (dir / "run.summary.json").string());
    const auto ckpt = model::load_checkpoint(cfg.checkpoint_path);
    Trainer again(cfg, gqe::testing::h2_file());
    again.run();
    CHECK(ckpt == again.params());
    std::ifstream buf(cfg.buffer_dump_path);
    int lines = 0;
    for (std::string l; std::getline(buf, l);)
        ++lines;
    CHECK(lines == 5);
    std::filesystem::remove_all(dir);

    auto bad = small_config(2);
    bad.hamiltonian_path = (dir / "missing.json").string();
    CHECK_THROWS_AS(train::train(bad), IoError);
}

TEST_CASE("too many qubits is a capability error") {
    auto cfg = small_config(2);
    CHECK_THROWS_AS(Trainer(cfg, io::load_hamiltonian(gqe::testing::test_data_path("big17.json"))),
                    CapabilityError);
}

TEST_CASE("config keys, files and precedence") {
    TrainConfig cfg = desk_defaults();
    apply_config_text(cfg, "# comment\nseed = 7\nalpha=0.25 # trailing\nloss = dpo\nhybrid = C=10,R=3,S=4\n\n");
    CHECK(cfg.seed == 7);
    CHECK(cfg.loss.alpha == 0.25);
    CHECK(cfg.loss.variant == loss::Variant::DPO);
    CHECK(cfg.hybrid.enabled);
    CHECK(cfg.hybrid.capacity == 10);
    CHECK(cfg.hybrid.reuse == 3);
    CHECK(cfg.hybrid.start == 4);
    cfg.set("seed", "9");
    CHECK(cfg.seed == 9);
    CHECK(cfg.loss.alpha == 0.25);

    cfg.set("steps", "12");
    cfg.set("samples", "4");
    cfg.set("seq_len", "6");
    cfg.set("embed_dim", "8");
    cfg.set("heads", "2");
    cfg.set("bias", "true");
    cfg.set("lr", "0.001");
    cfg.set("t_initial", "2.0");
    CHECK(cfg.schedule.n_steps == 12);
    CHECK(cfg.samples_per_step == 4);
    CHECK(cfg.model.max_len == 6);
    CHECK(cfg.model.embed_dim == 8);
    CHECK(cfg.model.use_bias);
    CHECK(cfg.learning_rate == 0.001);
    CHECK(cfg.schedule.t_initial == 2.0);
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(cfg.set("nonsense", "1"), InputError);
    CHECK_THROWS_AS(cfg.set("seed", "abc"), InputError);
    CHECK_THROWS_AS(cfg.set("alpha", "0.5x"), InputError);
    CHECK_THROWS_AS(cfg.set("loss", "ppo"), InputError);
    CHECK_THROWS_AS(apply_config_text(cfg, "just words\n"), InputError);
    CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/gqe.cfg"), IoError);

    TrainConfig bad = desk_defaults();
    bad.samples_per_step = 1;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = desk_defaults();
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = desk_defaults();
    bad.hybrid = {true, 1, 2, 0};
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("parse_hybrid") {
    const auto h = parse_hybrid("S=50,C=25,R=2");
    CHECK(h.enabled);
    CHECK(h.capacity == 25);
    CHECK(h.reuse == 2);
    CHECK(h.start == 50);
    CHECK_FALSE(parse_hybrid("off").enabled);
    CHECK_THROWS_AS(parse_hybrid("C=25,R=2"), InputError);
    CHECK_THROWS_AS(parse_hybrid("C=25,R=2,S=x"), InputError);
    CHECK_THROWS_AS(parse_hybrid("C=2,R=3,S=0"), InputError);
}

TEST_CASE("profiles and digest") {
    const auto desk = desk_defaults();
    CHECK(desk.schedule.n_steps == 300);
    CHECK(desk.samples_per_step == 10);
    CHECK(desk.loss.beta == 0.1);
    CHECK(desk.weight_decay == 0.01);
    const auto paper = paper_scale();
    CHECK(paper.model.embed_dim == 768);
    CHECK(paper.model.ff_dim == 3072);
    CHECK(paper.model.n_heads == 12);
    CHECK(paper.model.n_layers == 12);
    CHECK(paper.model.max_len == 40);
    CHECK(paper.schedule.n_steps == 3000);
    CHECK(paper.learning_rate == 8e-5);

    CHECK(desk.digest().size() == 16);
    CHECK(desk.digest() == desk_defaults().digest());
    CHECK(desk.digest() != paper.digest());
    auto other = desk;
    other.seed = 123;
    CHECK(other.digest() != desk.digest());
    auto out_only = desk;
    out_only.output_path = "elsewhere.csv";
    CHECK(out_only.digest() == desk.digest());
}

TEST_CASE("AdamW matches a hand-rolled reference") {
    const optim::AdamWConfig c{1e-2, 0.1, 0.9, 0.999, 1e-8};
    std::vector<double> p{0.5, -1.0, 2.0}, ref = p, m(3, 0.0), v(3, 0.0);
    optim::AdamW opt(c, 3);
    const std::vector<std::vector<double>> grads{{0.1, -0.2, 0.0}, {0.3, 0.1, -0.5}, {-0.2, 0.0, 0.4}};
    for (std::size_t t = 0; t < grads.size(); ++t) {
        opt.step(p, grads[t]);
        for (int i = 0; i < 3; ++i) {
            ref[i] *= 1 - c.lr * c.weight_decay;
            m[i] = 0.9 * m[i] + 0.1 * grads[t][i];
            v[i] = 0.999 * v[i] + 0.001 * grads[t][i] * grads[t][i];
            const double mh = m[i] / (1 - std::pow(0.9, t + 1));
            const double vh = v[i] / (1 - std::pow(0.999, t + 1));
            ref[i] -= c.lr * mh / (std::sqrt(vh) + c.eps);
            CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-14));
        }
    }
    CHECK(opt.steps_taken() == 3);

    std::vector<double> g{3.0, 4.0};
    CHECK(optim::clip_grad_norm(g, 1.0) == doctest::Approx(5.0));
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));
    std::vector<double> small{0.1, 0.1};
    optim::clip_grad_norm(small, 1.0);
    CHECK(small[0] == 0.1);
}

} // TEST_SUITE
