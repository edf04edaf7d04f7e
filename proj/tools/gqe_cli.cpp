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
// Command-line front end. Links only the C API in gqe/gqe.h.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gqe/gqe.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int report(gqe_status status, const char *context) {
    if (status == GQE_OK)
        return kExitOk;
    std::fprintf(stderr, "gqe: %s: %s: %s\n", context, gqe_status_name(status), gqe_last_error());
    return status == GQE_ERR_NUMERIC ? kExitNumeric : kExitInput;
}

// A flag whose text is forwarded to gqe_train_config_set under `key`.
struct ForwardedFlag {
    const char *flag;
    const char *key;
    const char *help;
    std::optional<std::string> value;
};

std::string with_seed(const std::string &path, const std::string &seed, bool many) {
    if (path.empty())
        return path;
    if (auto pos = path.find("{seed}"); pos != std::string::npos)
        return path.substr(0, pos) + seed + path.substr(pos + 6);
    if (!many)
        return path;
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_seed" + seed;
    return path.substr(0, dot) + "_seed" + seed + path.substr(dot);
}

struct TrainArgs {
    std::string config_file;
    bool paper_scale = false;
    bool debug_checks = false;
    bool force_identity = false;
    std::vector<std::string> seeds;
    std::vector<ForwardedFlag> flags = {
        {"--hamiltonian", "hamiltonian", "Hamiltonian JSON file", {}},
        {"--loss", "loss", "dpo or pdpo", {}},
        {"--alpha", "alpha", "P-DPO alpha in [0,1]", {}},
        {"--beta", "beta", "DPO beta > 0", {}},
        {"--seed", "seed", "run seed", {}},
        {"--steps", "steps", "number of training steps", {}},
        {"--samples", "samples", "circuits sampled per step (M)", {}},
        {"--seq-len", "seq_len", "tokens per circuit (N)", {}},
        {"--lr", "lr", "AdamW learning rate", {}},
        {"--weight-decay", "weight_decay", "AdamW weight decay", {}},
        {"--t-initial", "t_initial", "sampling temperature at step 0", {}},
        {"--t-final", "t_final", "sampling temperature at the last step", {}},
        {"--embed-dim", "embed_dim", "model width", {}},
        {"--ff-dim", "ff_dim", "feed-forward width", {}},
        {"--heads", "heads", "attention heads", {}},
        {"--layers", "layers", "decoder layers", {}},
        {"--bias", "bias", "use bias terms (true/false)", {}},
        {"--dropout", "dropout", "dropout rate", {}},
        {"--grad-clip", "grad_clip", "max gradient norm, 0 = off", {}},
        {"--hybrid", "hybrid", "replay as C=..,R=..,S=.. or off", {}},
        {"--out", "out", "RunLog CSV path ({seed} is substituted)", {}},
        {"--summary", "summary", "summary JSON path", {}},
        {"--checkpoint", "checkpoint", "write the final model here", {}},
        {"--buffer-dump", "buffer_dump", "write the replay buffer as JSON lines", {}},
    };
};

int run_train(TrainArgs &args) {
    std::vector<std::string> seeds = args.seeds;
    if (seeds.empty())
        seeds.push_back({});
    const bool many = seeds.size() > 1;
    for (const auto &seed : seeds) {
        gqe_train_config *cfg = nullptr;
        if (int rc = report(gqe_train_config_new(args.paper_scale ? 1 : 0, &cfg), "config"))
            return rc;
        auto fail = [&](int rc) {
            gqe_train_config_free(cfg);
            return rc;
        };
        if (!args.config_file.empty())
            if (int rc = report(gqe_train_config_load(cfg, args.config_file.c_str()), "config file"))
                return fail(rc);
        for (const auto &f : args.flags) {
            if (!f.value)
                continue;
            std::string value = *f.value;
            if (std::string(f.key) == "out" || std::string(f.key) == "summary" ||
                std::string(f.key) == "checkpoint" || std::string(f.key) == "buffer_dump")
                value = with_seed(value, seed.empty() ? "" : seed, many);
            if (int rc = report(gqe_train_config_set(cfg, f.key, value.c_str()), f.flag))
                return fail(rc);
        }
        if (!seed.empty())
            if (int rc = report(gqe_train_config_set(cfg, "seed", seed.c_str()), "--seeds"))
                return fail(rc);
        if (args.debug_checks)
            gqe_train_config_set(cfg, "debug_checks", "true");
        if (args.force_identity)
            gqe_train_config_set(cfg, "force_identity", "true");
        if (int rc = report(gqe_train_config_validate(cfg), "config"))
            return fail(rc);

        gqe_run_log *log = nullptr;
        if (int rc = report(gqe_train(cfg, &log), "train"))
            return fail(rc);
        size_t n = 0;
        double best = 0.0, wall = 0.0;
        gqe_run_log_info(log, &n, &best, &wall);
        std::fprintf(stderr, "gqe: %zu steps, best energy %.10f Ha, %.1f s%s%s\n", n, best, wall,
                     seed.empty() ? "" : ", seed ", seed.c_str());
        gqe_run_log_free(log);
        gqe_train_config_free(cfg);
    }
    return kExitOk;
}

int run_exact(const std::string &path) {
    gqe_hamiltonian *h = nullptr;
    if (int rc = report(gqe_hamiltonian_load(path.c_str(), &h), "load"))
        return rc;
    int n_qubits = 0;
    size_t n_terms = 0;
    const char *name = "";
    gqe_hamiltonian_info(h, &n_qubits, &n_terms, nullptr);
    gqe_hamiltonian_name(h, &name);
    double exact = 0.0, hf = 0.0;
    int rc = report(gqe_exact_ground_energy(h, &exact), "exact");
    if (rc == kExitOk)
        rc = report(gqe_hf_energy(h, &hf), "hf energy");
    if (rc == kExitOk) {
        std::printf("hamiltonian: %s (%d qubits, %zu terms)\n", name, n_qubits, n_terms);
        std::printf("exact_ground_energy: %.12f\n", exact);
        std::printf("hf_energy: %.12f\n", hf);
    }
    gqe_hamiltonian_free(h);
    return rc;
}

int run_pool(const std::string &path, bool list) {
    gqe_hamiltonian *h = nullptr;
    if (int rc = report(gqe_hamiltonian_load(path.c_str(), &h), "load"))
        return rc;
    gqe_pool *p = nullptr;
    int rc = report(gqe_pool_build(h, nullptr, 0, &p), "pool");
    if (rc == kExitOk) {
        size_t size = 0, singles = 0, doubles = 0, n_angles = 0;
        gqe_pool_info(p, &size, &singles, &doubles, &n_angles);
        if (list) {
            static const char *kinds[] = {"Identity", "SingleExcitation", "DoubleExcitation"};
            for (size_t t = 0; t < size; ++t) {
                gqe_gate_kind kind;
                int wires[4], n_wires = 0;
                double angle = 0.0;
                gqe_pool_gate(p, static_cast<int>(t), &kind, wires, &n_wires, &angle);
                std::printf("%zu %s", t, kinds[kind]);
                for (int i = 0; i < n_wires; ++i)
                    std::printf("%c%d", i == 0 ? ' ' : ',', wires[i]);
                if (kind != GQE_GATE_IDENTITY)
                    std::printf(" %.6g", angle);
                std::printf("\n");
            }
        } else {
            std::printf("L: %zu\nn_singles: %zu\nn_doubles: %zu\nangles:", size, singles, doubles);
            for (size_t i = 0; i < n_angles; ++i) {
                double a = 0.0;
                gqe_pool_angle(p, i, &a);
                std::printf(" %.6g", a);
            }
            std::printf("\n");
        }
        gqe_pool_free(p);
    }
    gqe_hamiltonian_free(h);
    return rc;
}

int run_aggregate(const std::vector<std::string> &inputs, const std::string &out, int block,
                  std::string blocks_out) {
    if (block > 0 && blocks_out.empty()) {
        const auto dot = out.find_last_of('.');
        blocks_out = (dot == std::string::npos ? out : out.substr(0, dot)) + ".blocks.csv";
    }
    std::vector<const char *> paths;
    for (const auto &s : inputs)
        paths.push_back(s.c_str());
    return report(gqe_aggregate(paths.data(), paths.size(), out.c_str(), block,
                                blocks_out.empty() ? nullptr : blocks_out.c_str()),
                  "aggregate");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Generative quantum eigensolver trainer (DPO / Persistent-DPO)", "gqe"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gqe_version());

    TrainArgs train;
    auto *train_cmd = app.add_subcommand("train", "train a sequence model on a Hamiltonian");
    train_cmd->add_option("--config", train.config_file, "key = value config file");
    train_cmd->add_flag("--paper-scale", train.paper_scale, "start from the full-size profile");
    train_cmd->add_flag("--debug-checks", train.debug_checks, "verify cached replay values");
    train_cmd->add_flag("--force-identity", train.force_identity, "sample identity-only circuits");
    train_cmd->add_option("--seeds", train.seeds, "run several seeds in sequence")->delimiter(',');
    for (auto &f : train.flags)
        train_cmd->add_option(f.flag, f.value, f.help);

    std::string exact_path;
    auto *exact_cmd = app.add_subcommand("exact", "print exact ground and Hartree-Fock energies");
    exact_cmd->add_option("hamiltonian,--hamiltonian", exact_path, "Hamiltonian JSON file")
        ->required();

    std::string pool_path;
    bool pool_list = false;
    auto *pool_cmd = app.add_subcommand("pool", "describe the operator pool");
    pool_cmd->add_option("hamiltonian,--hamiltonian", pool_path, "Hamiltonian JSON file")
        ->required();
    pool_cmd->add_flag("--list", pool_list, "print every token");

    std::vector<std::string> agg_inputs;
    std::string agg_out, agg_blocks_out;
    int agg_block = 0;
    auto *agg_cmd = app.add_subcommand("aggregate", "combine run CSVs into min/mean/max curves");
    agg_cmd->add_option("runs", agg_inputs, "RunLog CSV files")->required();
    agg_cmd->add_option("--out", agg_out, "output curve CSV")->required();
    agg_cmd->add_option("--block", agg_block, "also emit per-run minima of k-step blocks");
    agg_cmd->add_option("--blocks-out", agg_blocks_out, "block minima CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInput;
    }

    if (*train_cmd)
        return run_train(train);
    if (*exact_cmd)
        return run_exact(exact_path);
    if (*pool_cmd)
        return run_pool(pool_path, pool_list);
    if (*agg_cmd)
        return run_aggregate(agg_inputs, agg_out, agg_block, agg_blocks_out);
    return kExitInput;
}
