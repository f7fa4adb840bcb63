/*
 * Copyright (c) 2026, The Tosca Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include "tosca/commitment.hh"
#include "tosca/semantics.hh"
#include "tosca/simulation.hh"
#include "tosca/synthesis.hh"
#include "tosca/verify.hh"

namespace {

using namespace tosca;

std::filesystem::path fixture(const char* rel) {
  return std::filesystem::path(TOSCA_FIXTURE_DIR) / rel;
}

Workspace escrow() {
  return load_workspace(fixture("escrow/composed.bspl"),
                        {fixture("escrow/escrowtransfer.cupid")});
}

void BM_ParseProtocolFile(benchmark::State& state) {
  std::string text = read_file(fixture("escrow/composed.bspl"));
  for (auto _ : state) benchmark::DoNotOptimize(parse_protocols(text));
}
BENCHMARK(BM_ParseProtocolFile);

void BM_ReduceLifecycle(benchmark::State& state) {
  Workspace w = escrow();
  auto instrs = decompose_commitment(w.commitment("EscrowTransfer"));
  for (auto _ : state)
    for (const auto& in : instrs) benchmark::DoNotOptimize(reduce(in));
}
BENCHMARK(BM_ReduceLifecycle);

void BM_SynthesizeComplete(benchmark::State& state) {
  Workspace w = load_workspace(fixture("escrow/escrow.bspl"),
                               {fixture("escrow/escrowtransfer.cupid")});
  for (auto _ : state)
    benchmark::DoNotOptimize(synthesize_alignment_protocol(
        w.commitment("EscrowTransfer"), w.principal, SynthesisMode::kComplete));
}
BENCHMARK(BM_SynthesizeComplete);

// Lifecycle state of EscrowTransfer over a model of `range` keyed rounds.
void BM_EvalLifecycle(benchmark::State& state) {
  Workspace w = escrow();
  const CommitmentSpec& c = w.commitment("EscrowTransfer");
  Model m{"M", {}};
  for (int k = 0; k < state.range(0); ++k) {
    Bindings key{{"oID", std::to_string(k)}};
    long t = k % 7;
    for (const char* s : {"quote", "payEscrow", "ship"}) {
      Bindings b = key;
      m.entries.push_back({s, b, key, t});
      t += 2;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(lifecycle_state(c, m, 20));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvalLifecycle)->RangeMultiplier(4)->Range(1, 256);

void BM_EnumerateStates(benchmark::State& state) {
  Workspace w = escrow();
  const char* names[] = {"EscrowOrdering", "OperationalizationProtocol"};
  const Protocol& p = w.registry.at(names[state.range(0)]);
  Subject s = Subject::of(p, w.registry);
  std::size_t n = 0;
  for (auto _ : state) {
    StateGraph g(s.uod, s.forwards, {});
    g.explore();
    n = g.size();
  }
  state.counters["states"] = static_cast<double>(n);
}
BENCHMARK(BM_EnumerateStates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EnumerateTimed(benchmark::State& state) {
  Workspace w = escrow();
  Subject s = Subject::of(w.principal, w.registry);
  StateGraph::Options opt;
  opt.timed = w.commitments;
  std::size_t n = 0;
  for (auto _ : state) {
    StateGraph g(s.uod, s.forwards, opt);
    g.explore();
    n = g.size();
  }
  state.counters["states"] = static_cast<double>(n);
}
BENCHMARK(BM_EnumerateTimed)->Unit(benchmark::kMillisecond);

void BM_SimulateRandom(benchmark::State& state) {
  Scenario sc = load_scenario(fixture("escrow/transfer_timeline.json"));
  Workspace w = load_workspace(sc.protocol_file, sc.commitment_files);
  sc.policy = Policy::kRandom;
  sc.horizon = 20;
  sc.keys = 2;
  std::uint32_t seed = 0;
  for (auto _ : state) {
    sc.seed = ++seed;
    benchmark::DoNotOptimize(simulate(w, sc));
  }
}
BENCHMARK(BM_SimulateRandom)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
