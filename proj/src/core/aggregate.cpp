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
#include "aggregate.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "trainer.hpp"

namespace gqe::aggregate {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_field(const std::string &s, const std::string &label, int line) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
        throw InputError(label + ":" + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace

RunSeries read_run_csv(std::istream &in, std::string label) {
    RunSeries run;
    run.label = std::move(label);
    std::string line;
    if (!std::getline(in, line))
        throw InputError(run.label + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != train::kRunLogHeader)
        throw InputError(run.label + ": header '" + line + "' does not match '" +
                         train::kRunLogHeader + "'");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 7)
            throw InputError(run.label + ":" + std::to_string(lineno) + ": expected 7 columns");
        run.steps.push_back(static_cast<int>(parse_field(cells[0], run.label, lineno)));
        run.batch_min_energy.push_back(parse_field(cells[2], run.label, lineno));
        run.min_energy_so_far.push_back(parse_field(cells[3], run.label, lineno));
    }
    return run;
}

RunSeries load_run_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open run CSV '" + path + "'");
    return read_run_csv(in, path);
}

std::vector<CurvePoint> aggregate_curve(std::span<const RunSeries> runs) {
    if (runs.empty())
        throw InputError("aggregate needs at least one run");
    std::size_t len = runs[0].steps.size();
    for (const auto &r : runs)
        len = std::min(len, r.steps.size());
    std::vector<CurvePoint> curve;
    curve.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        const int step = runs[0].steps[i];
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto &r : runs) {
            if (r.steps[i] != step)
                throw InputError(r.label + ": step column disagrees with " + runs[0].label);
            const double v = r.min_energy_so_far[i];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        // Clamp so rounding in the mean never escapes [min, max].
        const double mean = std::clamp(sum / static_cast<double>(runs.size()), lo, hi);
        curve.push_back({step, mean, lo, hi});
    }
    return curve;
}

void write_curve_csv(std::span<const CurvePoint> curve, std::ostream &out) {
    out << "step,mean,min,max\n";
    for (const auto &p : curve)
        out << p.step << ',' << fmt(p.mean) << ',' << fmt(p.min) << ',' << fmt(p.max) << '\n';
}

std::vector<BlockMin> block_minima(const RunSeries &run, int block) {
    if (block < 1)
        throw InputError("block size must be >= 1");
    std::vector<BlockMin> out;
    const auto n = run.steps.size();
    for (std::size_t b = 0; b * block < n; ++b) {
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(n, lo + block);
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i < hi; ++i)
            m = std::min(m, run.batch_min_energy[i]);
        out.push_back({run.label, static_cast<int>(b), run.steps[lo], run.steps[hi - 1], m});
    }
    return out;
}

void write_blocks_csv(std::span<const BlockMin> blocks, std::ostream &out) {
    out << "run,block,step_start,step_end,min_energy\n";
    for (const auto &b : blocks)
        out << b.run << ',' << b.block << ',' << b.step_start << ',' << b.step_end << ','
            << fmt(b.min_energy) << '\n';
}

} // namespace gqe::aggregate
