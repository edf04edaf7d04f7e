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

#include <random>
#include <sstream>

#include "aggregate.hpp"
#include "errors.hpp"
#include "trainer.hpp"

using namespace gqe;
using namespace gqe::aggregate;

namespace {

std::string synthetic_csv(int rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.14, -1.0);
    train::RunLog log;
    double best = 0.0;
    for (int t = 0; t < rows; ++t) {
        const double e = u(rng);
        best = std::min(best, e);
        log.records.push_back({t, 1.5 - 0.01 * t, e, best, t % 7 == 0 ? std::nan("") : 0.3, t % 7 == 0 ? 0 : 9, 10});
    }
    std::ostringstream out;
    train::write_csv(log, out);
    return out.str();
}

RunSeries parse(const std::string &text, std::string label = "run") {
    std::istringstream in(text);
    return read_run_csv(in, std::move(label));
}

} // namespace

TEST_SUITE("aggregate") {

TEST_CASE("read_run_csv round-trips the written columns") {
    const auto text = synthetic_csv(30, 1);
    const auto run = parse(text);
    REQUIRE(run.steps.size() == 30);
    CHECK(run.steps[29] == 29);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    for (std::size_t i = 0; i < 30; ++i) {
        std::getline(in, line);
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');)
            cells.push_back(c);
        REQUIRE(cells.size() == 7);
        CHECK(std::stod(cells[2]) == run.batch_min_energy[i]);
        CHECK(std::stod(cells[3]) == run.min_energy_so_far[i]);
        if (i % 7 == 0)
            CHECK(cells[4] == "nan");
    }
}

TEST_CASE("header must match exactly") {
    CHECK_THROWS_AS(parse("step,temp,batch_min_energy,min_energy_so_far,loss,n_pairs,buffer_size\n"), InputError);
    CHECK_THROWS_AS(parse(""), InputError);
    CHECK_THROWS_AS(parse(std::string(train::kRunLogHeader) + "\n1,2,3\n"), InputError);
    CHECK_THROWS_AS(parse(std::string(train::kRunLogHeader) + "\n1,1.5,x,-1,0.1,9,0\n"), InputError);
    CHECK_NOTHROW(parse(std::string(train::kRunLogHeader) + "\n"));
}

TEST_CASE("singleton statistics") {
    const RunSeries runs[] = {parse(synthetic_csv(40, 2))};
    const auto curve = aggregate_curve(runs);
    REQUIRE(curve.size() == 40);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].mean == runs[0].min_energy_so_far[i]);
        CHECK(curve[i].min == curve[i].mean);
        CHECK(curve[i].max == curve[i].mean);
    }
}

TEST_CASE("order statistics over several runs") {
    std::vector<RunSeries> runs;
    for (int s = 0; s < 5; ++s)
        runs.push_back(parse(synthetic_csv(50 - s, 10 + s), "r" + std::to_string(s)));
    const auto curve = aggregate_curve(runs);
    CHECK(curve.size() == 46);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].min <= curve[i].mean);
        CHECK(curve[i].mean <= curve[i].max);
        double sum = 0.0;
        for (const auto &r : runs)
            sum += r.min_energy_so_far[i];
        CHECK(curve[i].mean == doctest::Approx(sum / 5).epsilon(1e-15));
    }
    std::ostringstream out;
    write_curve_csv(curve, out);
    CHECK(out.str().rfind("step,mean,min,max\n", 0) == 0);
    CHECK_THROWS_AS(aggregate_curve(std::span<const RunSeries>{}), InputError);
}

TEST_CASE("block minima") {
    const auto run = parse(synthetic_csv(300, 3), "seed42");
    const auto blocks = block_minima(run, 10);
    REQUIRE(blocks.size() == 30);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        CHECK(blocks[b].step_start == static_cast<int>(b * 10));
        CHECK(blocks[b].step_end == static_cast<int>(b * 10 + 9));
        double m = 1e300;
        for (int i = 0; i < 10; ++i)
            m = std::min(m, run.batch_min_energy[b * 10 + i]);
        CHECK(blocks[b].min_energy == m);
        CHECK(blocks[b].run == "seed42");
    }
    CHECK(block_minima(parse(synthetic_csv(25, 4)), 10).size() == 3);
    CHECK_THROWS_AS(block_minima(run, 0), InputError);
    std::ostringstream out;
    write_blocks_csv(blocks, out);
    CHECK(out.str().rfind("run,block,step_start,step_end,min_energy\n", 0) == 0);
}

} // TEST_SUITE
