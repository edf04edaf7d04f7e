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
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hamiltonian_io.hpp"
#include "operator_pool.hpp"
#include "preference_losses.hpp"
#include "replay.hpp"
#include "test_util.hpp"
#include "trainer.hpp"

using namespace gqe;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const char *name, bool ok, const std::string &detail) {
    std::printf("%s %-20s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++g_failures;
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string run_command(const std::string &cmd, int &code) {
    std::string out;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        code = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, n);
    const int status = pclose(pipe);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

const std::vector<std::uint64_t> kSeeds{42, 123, 777, 2024, 9999};
const std::vector<std::uint64_t> kExtraSeeds{1, 7, 31, 314, 2718};

train::TrainConfig desk(std::uint64_t seed) {
    auto cfg = train::desk_defaults();
    cfg.hamiltonian_path = gqe::testing::data_path("h2.json");
    cfg.seed = seed;
    cfg.loss = {0.1, 0.5, loss::Variant::PDPO};
    return cfg;
}

std::string csv_of(const train::RunLog &log) {
    std::ostringstream out;
    train::write_csv(log, out);
    return out.str();
}

void oracle_match() {
    const auto start = Clock::now();
    int code = 0;
    const auto out = run_command(std::string(GQE_CLI) + " exact " + gqe::testing::data_path("h2.json"), code);
    const double elapsed = seconds_since(start);
    double cli = std::nan("");
    if (const auto pos = out.find("exact_ground_energy: "); pos != std::string::npos)
        cli = std::stod(out.substr(pos + 21));
    const auto &h = gqe::testing::h2_file().hamiltonian;
    const double dense = gqe::testing::dense_min_eigenvalue(h);
    const double hint = h.ground_energy_hint.value_or(std::nan(""));
    const bool ok = code == 0 && std::abs(cli - dense) < 1e-6 && std::abs(hint - dense) < 1e-6 && elapsed < 1.0;
    report("oracle-match", ok,
           fmt("exact=%.12f dense=%.12f hint=%.12f |exact-dense|=%.1e |hint-dense|=%.1e time=%.3fs", cli, dense,
               hint, std::abs(cli - dense), std::abs(hint - dense), elapsed));
}

void pool_counts() {
    const auto start = Clock::now();
    const auto beh2 = io::pool_for(io::load_hamiltonian(gqe::testing::data_path("beh2.json")));
    const auto h2 = io::pool_for(gqe::testing::h2_file());
    const double elapsed = seconds_since(start);
    report("pool-counts", beh2.size() == 1633 && h2.size() == 25 && elapsed < 1.0,
           fmt("BeH2 L=%zu H2 L=%zu time=%.3fs", beh2.size(), h2.size(), elapsed));
}

void gradient_suite() {
    const auto start = Clock::now();
    const auto params = gqe::testing::tiny_model(101, 5, 4);
    const auto reference = gqe::testing::tiny_model(102, 5, 4);
    std::mt19937_64 rng(3);
    std::vector<EnergySample> samples;
    for (int i = 0; i < 6; ++i) {
        pool::CircuitSequence seq(4);
        for (auto &t : seq)
            t = static_cast<int>(rng() % 5);
        samples.push_back({seq, -1.0 - 0.01 * ((i * 3) % 6), 0, model::sequence_log_prob(reference, seq).total});
    }
    const auto batch = loss::pair_best_vs_others(samples);
    std::string detail = fmt("params=%zu", params.size());
    bool ok = params.size() <= 1000;
    const std::pair<const char *, loss::LossConfig> cases[] = {
        {"DPO", {0.1, 0.0, loss::Variant::DPO}},
        {"PDPO(0.25)", {0.1, 0.25, loss::Variant::PDPO}},
        {"PDPO(0.5)", {0.1, 0.5, loss::Variant::PDPO}},
        {"PDPO(1.0)", {0.1, 1.0, loss::Variant::PDPO}}};
    for (const auto &[name, cfg] : cases) {
        const double err = train::gradcheck(params, samples, batch, cfg);
        ok = ok && err < 1e-4;
        detail += fmt(" %s=%.1e", name, err);
    }

    double worst_dz = 0.0;
    std::uniform_real_distribution<double> uz(-8, 8), ua(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const double z = uz(rng), alpha = ua(rng), h = 1e-5;
        const double w = loss::gradient_weight(z, alpha);
        const std::vector<double> up{z + h}, down{z - h}, at{z};
        const double numeric = (loss::pdpo_loss(up, alpha) - loss::pdpo_loss(down, alpha)) / (2 * h);
        const double analytic = loss::loss_grad_wrt_z(at, {0.1, alpha, loss::Variant::PDPO})[0];
        worst_dz = std::max({worst_dz, std::abs(numeric + w) / w, std::abs(analytic + w) / w});
    }
    ok = ok && worst_dz < 1e-8;
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 60.0;
    report("gradient-suite", ok, detail + fmt(" dL/dz-vs-w=%.1e time=%.2fs", worst_dz, elapsed));
}

void reduction_identity() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uz(-50, 50);
    double worst_batch = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> z(1 + rng() % 16);
        for (auto &v : z)
            v = uz(rng);
        worst_batch = std::max(worst_batch, std::abs(loss::pdpo_loss(z, 0.0) - loss::dpo_loss(z)));
    }
    auto cfg = desk(42);
    cfg.schedule.n_steps = 20;
    cfg.loss = {0.1, 0.0, loss::Variant::PDPO};
    const auto pdpo = train::Trainer(cfg, gqe::testing::h2_file()).run();
    cfg.loss.variant = loss::Variant::DPO;
    const auto dpo = train::Trainer(cfg, gqe::testing::h2_file()).run();
    double worst_run = 0.0;
    bool nan_agree = pdpo.records.size() == 20 && dpo.records.size() == 20;
    for (std::size_t i = 0; i < dpo.records.size() && nan_agree; ++i) {
        const double a = pdpo.records[i].loss, b = dpo.records[i].loss;
        if (std::isnan(a) || std::isnan(b))
            nan_agree = std::isnan(a) && std::isnan(b);
        else
            worst_run = std::max(worst_run, std::abs(a - b));
    }
    report("reduction-identity", nan_agree && worst_batch <= 1e-12 && worst_run <= 1e-10,
           fmt("1000 batches max|diff|=%.1e; 20-step run max|diff|=%.1e", worst_batch, worst_run));
}

void weight_bounds() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uz(-700, 700), ua(0, 1), step(0, 5);
    long violations = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        const double z = uz(rng), alpha = ua(rng);
        const double w = loss::gradient_weight(z, alpha);
        const double z2 = std::min(700.0, z + step(rng));
        const double w2 = loss::gradient_weight(z2, alpha);
        if (!(w >= alpha && w <= 1.0) || !std::isfinite(w) || w2 > w)
            ++violations;
        if (alpha < 0.99 && std::abs(z) < 20.0 && z2 > z && !(w2 < w))
            ++violations;
    }
    report("weight-bounds", violations == 0, fmt("1e5 samples over z in [-700,700], violations=%ld", violations));
}

void schedule_endpoints() {
    const train::ScheduleConfig s{1.5, 0.7, 3000};
    const double t0 = train::temperature(0, s), t_end = train::temperature(2999, s);
    report("schedule-endpoints", t0 == 1.5 && t_end == 0.7, fmt("T(0)=%.17g T(2999)=%.17g", t0, t_end));
}

void replay_laws() {
    std::mt19937_64 gen(4242);
    long violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int C = static_cast<int>(gen() % 12);
        const int R = C == 0 ? 0 : static_cast<int>(gen() % (C + 1));
        const int S = static_cast<int>(gen() % 5);
        const int M = 1 + static_cast<int>(gen() % 6);
        replay::ReplayBuffer buffer({true, C, R, S});
        Rng rng = make_stream(static_cast<std::uint64_t>(trial), Stream::ReplayDraw);
        int next_id = 0;
        const int steps = 1 + static_cast<int>(gen() % 8);
        for (int t = 0; t < steps; ++t) {
            std::vector<EnergySample> online;
            for (int i = 0; i < M; ++i)
                online.push_back({{next_id++}, -static_cast<double>(gen() % 6) * 0.25, t, 0.0});
            std::vector<EnergySample> all(buffer.samples().begin(), buffer.samples().end());
            all.insert(all.end(), online.begin(), online.end());
            const auto before = buffer.size();
            const auto out = buffer.assemble_step(online, t, rng);

            const std::size_t expected = t >= S ? M + std::min<std::size_t>(R, before) : M;
            violations += out.size() != expected;
            for (int i = 0; i < M; ++i)
                violations += out[i].sequence != online[i].sequence;
            violations += buffer.size() > static_cast<std::size_t>(C);
            std::set<int> kept;
            double max_kept = -std::numeric_limits<double>::infinity();
            for (const auto &s : buffer.samples()) {
                kept.insert(s.sequence[0]);
                max_kept = std::max(max_kept, s.energy);
            }
            for (const auto &s : all)
                if (!kept.count(s.sequence[0]))
                    violations += s.energy < max_kept;
        }
    }
    report("replay-laws", violations == 0, fmt("1e4 random operation sequences, violations=%ld", violations));
}

struct SeedRuns {
    std::vector<double> best;
    std::vector<std::string> csv;
    double seconds = 0.0;
    double mean() const { return std::accumulate(best.begin(), best.end(), 0.0) / static_cast<double>(best.size()); }
};

SeedRuns run_seeds(const std::vector<std::uint64_t> &seeds, const std::function<void(train::TrainConfig &)> &tweak) {
    SeedRuns out;
    const auto start = Clock::now();
    for (auto seed : seeds) {
        auto cfg = desk(seed);
        tweak(cfg);
        const auto log = train::Trainer(cfg, gqe::testing::h2_file()).run();
        out.best.push_back(log.best_energy);
        out.csv.push_back(csv_of(log));
    }
    out.seconds = seconds_since(start);
    return out;
}

std::string energies(const SeedRuns &r) {
    std::string s;
    for (double e : r.best)
        s += fmt("%s%.10f", s.empty() ? "" : ",", e);
    return s;
}

} // namespace

int main() {
    oracle_match();
    pool_counts();
    gradient_suite();
    reduction_identity();
    weight_bounds();
    schedule_endpoints();
    replay_laws();

    const double exact = sim::exact_ground_energy(gqe::testing::h2_file().hamiltonian);
    const auto pdpo = run_seeds(kSeeds, [](auto &) {});
    const auto within = std::count_if(pdpo.best.begin(), pdpo.best.end(),
                                      [&](double e) { return e - exact <= 2e-3; });
    report("desk-end-to-end", within >= 4 && pdpo.seconds <= 300.0,
           fmt("%ld/5 seeds within 2e-3 of %.10f; best=[%s] time=%.1fs", static_cast<long>(within), exact,
               energies(pdpo).c_str(), pdpo.seconds));

    const auto dpo = run_seeds(kSeeds, [](auto &c) { c.loss.variant = loss::Variant::DPO; });
    const auto hybrid = run_seeds(kSeeds, [](auto &c) { c.hybrid = {true, 25, 2, 50}; });
    bool trend_ok = pdpo.mean() <= dpo.mean() + 1e-4 && hybrid.mean() <= pdpo.mean() + 1e-4;
    std::string trend = fmt("mean P-DPO=%.10f DPO=%.10f hybrid=%.10f", pdpo.mean(), dpo.mean(), hybrid.mean());
    if (!trend_ok) {
        auto both = [](SeedRuns a, const SeedRuns &b) {
            a.best.insert(a.best.end(), b.best.begin(), b.best.end());
            return a;
        };
        const auto p10 = both(pdpo, run_seeds(kExtraSeeds, [](auto &) {}));
        const auto d10 = both(dpo, run_seeds(kExtraSeeds, [](auto &c) { c.loss.variant = loss::Variant::DPO; }));
        const auto h10 = both(hybrid, run_seeds(kExtraSeeds, [](auto &c) { c.hybrid = {true, 25, 2, 50}; }));
        trend_ok = p10.mean() <= d10.mean() + 1e-4 && h10.mean() <= p10.mean() + 1e-4;
        trend += fmt("; rerun over 10 seeds P-DPO=%.10f DPO=%.10f hybrid=%.10f", p10.mean(), d10.mean(), h10.mean());
    }
    report("trend-check", trend_ok, trend);

    const auto again = run_seeds({kSeeds[0]}, [](auto &) {});
    report("determinism", again.csv[0] == pdpo.csv[0],
           fmt("seed 42 rerun CSV %s (%zu bytes)", again.csv[0] == pdpo.csv[0] ? "identical" : "differs",
               again.csv[0].size()));

    std::printf("%s: %d failing criteria\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
