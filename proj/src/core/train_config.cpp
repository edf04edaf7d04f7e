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
#include "train_config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace gqe::train {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char *expected) {
    throw InputError("config key '" + std::string(key) + "': '" + std::string(value) + "' is not " +
                     expected);
}

double to_double(std::string_view key, std::string_view value) {
    const std::string s = trim(value);
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        bad_value(key, value, "a finite number");
    return v;
}

long long to_int(std::string_view key, std::string_view value) {
    const std::string s = trim(value);
    char *end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE)
        bad_value(key, value, "an integer");
    return v;
}

int to_int32(std::string_view key, std::string_view value) {
    const auto v = to_int(key, value);
    if (v < INT32_MIN || v > INT32_MAX)
        bad_value(key, value, "a 32-bit integer");
    return static_cast<int>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
    const std::string s = trim(value);
    if (s == "1" || s == "true" || s == "on" || s == "yes")
        return true;
    if (s == "0" || s == "false" || s == "off" || s == "no")
        return false;
    bad_value(key, value, "a boolean");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void ScheduleConfig::validate() const {
    if (!(t_initial > 0.0) || !(t_final > 0.0))
        throw InputError("temperatures must be positive");
    if (n_steps < 1)
        throw InputError("n_steps must be >= 1");
}

void TrainConfig::validate() const {
    loss.validate();
    hybrid.validate();
    schedule.validate();
    auto m = model;
    if (m.vocab_size < 1)
        m.vocab_size = 1; // filled in from the pool later
    m.validate();
    if (samples_per_step < 2)
        throw InputError("samples per step M must be >= 2");
    if (!(learning_rate > 0.0))
        throw InputError("learning rate must be positive");
    if (weight_decay < 0.0)
        throw InputError("weight decay must be non-negative");
    if (grad_clip < 0.0)
        throw InputError("grad_clip must be non-negative");
    if (hamiltonian_path.empty())
        throw InputError("no hamiltonian file given");
}

replay::HybridConfig parse_hybrid(std::string_view spec) {
    const std::string s = trim(spec);
    replay::HybridConfig h;
    if (s == "off" || s == "none" || s == "0") {
        h.enabled = false;
        return h;
    }
    h.enabled = true;
    bool seen_c = false, seen_r = false, seen_s = false;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            bad_value("hybrid", spec, "of the form C=..,R=..,S=..");
        const std::string k = trim(std::string_view(item).substr(0, eq));
        const int v = to_int32("hybrid", std::string_view(item).substr(eq + 1));
        if (k == "C")
            h.capacity = v, seen_c = true;
        else if (k == "R")
            h.reuse = v, seen_r = true;
        else if (k == "S")
            h.start = v, seen_s = true;
        else
            bad_value("hybrid", spec, "of the form C=..,R=..,S=..");
    }
    if (!(seen_c && seen_r && seen_s))
        bad_value("hybrid", spec, "a full C=..,R=..,S=.. triple");
    h.validate();
    return h;
}

void TrainConfig::set(std::string_view key_in, std::string_view value) {
    const std::string key = trim(key_in);
    if (key == "hamiltonian")
        hamiltonian_path = trim(value);
    else if (key == "out")
        output_path = trim(value);
    else if (key == "summary")
        summary_path = trim(value);
    else if (key == "checkpoint")
        checkpoint_path = trim(value);
    else if (key == "buffer_dump")
        buffer_dump_path = trim(value);
    else if (key == "loss") {
        const auto v = trim(value);
        if (v == "dpo")
            loss.variant = loss::Variant::DPO;
        else if (v == "pdpo")
            loss.variant = loss::Variant::PDPO;
        else
            bad_value(key, value, "'dpo' or 'pdpo'");
    } else if (key == "alpha")
        loss.alpha = to_double(key, value);
    else if (key == "beta")
        loss.beta = to_double(key, value);
    else if (key == "seed") {
        const auto v = to_int(key, value);
        if (v < 0)
            bad_value(key, value, "a non-negative integer");
        seed = static_cast<std::uint64_t>(v);
    } else if (key == "steps")
        schedule.n_steps = to_int32(key, value);
    else if (key == "t_initial")
        schedule.t_initial = to_double(key, value);
    else if (key == "t_final")
        schedule.t_final = to_double(key, value);
    else if (key == "samples")
        samples_per_step = to_int32(key, value);
    else if (key == "seq_len")
        model.max_len = to_int32(key, value);
    else if (key == "embed_dim")
        model.embed_dim = to_int32(key, value);
    else if (key == "ff_dim")
        model.ff_dim = to_int32(key, value);
    else if (key == "heads")
        model.n_heads = to_int32(key, value);
    else if (key == "layers")
        model.n_layers = to_int32(key, value);
    else if (key == "bias")
        model.use_bias = to_bool(key, value);
    else if (key == "dropout")
        model.dropout = to_double(key, value);
    else if (key == "lr")
        learning_rate = to_double(key, value);
    else if (key == "weight_decay")
        weight_decay = to_double(key, value);
    else if (key == "grad_clip")
        grad_clip = to_double(key, value);
    else if (key == "hybrid")
        hybrid = parse_hybrid(value);
    else if (key == "debug_checks")
        debug_checks = to_bool(key, value);
    else if (key == "force_identity")
        force_identity = to_bool(key, value);
    else
        throw InputError("unknown config key '" + key + "'");
}

std::string TrainConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["hamiltonian"] = hamiltonian_path;
    kv["loss"] = loss.variant == loss::Variant::DPO ? "dpo" : "pdpo";
    kv["alpha"] = fmt_double(loss.alpha);
    kv["beta"] = fmt_double(loss.beta);
    kv["seed"] = std::to_string(seed);
    kv["steps"] = std::to_string(schedule.n_steps);
    kv["t_initial"] = fmt_double(schedule.t_initial);
    kv["t_final"] = fmt_double(schedule.t_final);
    kv["samples"] = std::to_string(samples_per_step);
    kv["seq_len"] = std::to_string(model.max_len);
    kv["embed_dim"] = std::to_string(model.embed_dim);
    kv["ff_dim"] = std::to_string(model.ff_dim);
    kv["heads"] = std::to_string(model.n_heads);
    kv["layers"] = std::to_string(model.n_layers);
    kv["bias"] = model.use_bias ? "true" : "false";
    kv["dropout"] = fmt_double(model.dropout);
    kv["lr"] = fmt_double(learning_rate);
    kv["weight_decay"] = fmt_double(weight_decay);
    kv["grad_clip"] = fmt_double(grad_clip);
    kv["hybrid"] = hybrid.enabled ? "C=" + std::to_string(hybrid.capacity) +
                                        ",R=" + std::to_string(hybrid.reuse) +
                                        ",S=" + std::to_string(hybrid.start)
                                  : "off";
    kv["force_identity"] = force_identity ? "true" : "false";
    std::string out;
    for (const auto &[k, v] : kv)
        out += k + "=" + v + "\n";
    return out;
}

std::string TrainConfig::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string TrainConfig::effective_summary_path() const {
    if (!summary_path.empty())
        return summary_path;
    if (output_path.empty())
        return {};
    const auto dot = output_path.find_last_of('.');
    const auto slash = output_path.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? output_path.substr(0, dot) : output_path) + ".summary.json";
}

TrainConfig desk_defaults() {
    TrainConfig cfg;
    cfg.model.embed_dim = 64;
    cfg.model.ff_dim = 256;
    cfg.model.n_heads = 4;
    cfg.model.n_layers = 2;
    cfg.model.max_len = 12;
    cfg.model.use_bias = false;
    cfg.model.dropout = 0.0;
    cfg.schedule = {1.5, 0.7, 300};
    cfg.samples_per_step = 10;
    cfg.learning_rate = kDeskLearningRate;
    cfg.weight_decay = 0.01;
    cfg.hamiltonian_path = "data/h2.json";
    return cfg;
}

TrainConfig paper_scale() {
    TrainConfig cfg = desk_defaults();
    cfg.model.embed_dim = 768;
    cfg.model.ff_dim = 3072;
    cfg.model.n_heads = 12;
    cfg.model.n_layers = 12;
    cfg.model.max_len = 40;
    cfg.schedule = {1.5, 0.7, 3000};
    cfg.learning_rate = 8e-5;
    cfg.hamiltonian_path = "data/beh2.json";
    return cfg;
}

void apply_config_text(TrainConfig &cfg, std::string_view text) {
    std::stringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        cfg.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    }
}

void apply_config_file(TrainConfig &cfg, const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str());
}

} // namespace gqe::train
