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
#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace gqe::aggregate {

/// The columns of a RunLog CSV that aggregation needs.
struct RunSeries {
    std::string label;
    std::vector<int> steps;
    std::vector<double> batch_min_energy;
    std::vector<double> min_energy_so_far;
};

/// Parses a RunLog CSV; throws InputError unless the header matches
/// exactly.
RunSeries read_run_csv(std::istream &in, std::string label = {});
RunSeries load_run_csv(const std::string &path);

struct CurvePoint {
    int step;
    double mean;
    double min;
    double max;
};

/// Per-step mean/min/max of min_energy_so_far over the common step prefix
/// of all runs.
std::vector<CurvePoint> aggregate_curve(std::span<const RunSeries> runs);
void write_curve_csv(std::span<const CurvePoint> curve, std::ostream &out);

struct BlockMin {
    std::string run;
    int block;
    int step_start;
    int step_end;
    double min_energy;
};

/// Minimum batch energy in consecutive blocks of `block` steps (the last
/// block may be shorter).
std::vector<BlockMin> block_minima(const RunSeries &run, int block);
void write_blocks_csv(std::span<const BlockMin> blocks, std::ostream &out);

} // namespace gqe::aggregate
