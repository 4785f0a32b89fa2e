// SPDX-License-Identifier: Apache-2.0
#include <ace/committee.hpp>
#include <ace/orchestrator.hpp>
#include <ace/scripted_backend.hpp>

#include <benchmark/benchmark.h>

namespace {

void BM_MajorityVote(benchmark::State& state) {
  std::vector<ace::Action> ballot;
  for (int j = 0; j < state.range(0); ++j) {
    ballot.push_back(j % 3 ? ace::Action::Think : ace::Action::Retrieve);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ace::majority_vote(ballot));
}
BENCHMARK(BM_MajorityVote)->Arg(5)->Arg(63);

void BM_UnionInsert(benchmark::State& state) {
  auto memory = ace::init_memory("benchmark question");
  std::vector<ace::MemoryItem> seed;
  for (int i = 0; i < state.range(0); ++i) {
    seed.push_back(ace::MemoryItem::passage({"d" + std::to_string(i), "", "passage text " + std::to_string(i), 1.0}, 1));
  }
  memory = ace::union_insert(memory, seed).memory;
  std::vector<ace::MemoryItem> batch;
  for (int i = 0; i < 5; ++i) {
    batch.push_back(ace::MemoryItem::passage({"n" + std::to_string(i), "", "new text " + std::to_string(i), 1.0}, 2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(ace::union_insert(memory, batch));
}
BENCHMARK(BM_UnionInsert)->Arg(10)->Arg(200);

void BM_ScriptedEpisode(benchmark::State& state) {
  const ace::Retriever retriever(ace::load_corpus(std::string(ACE_FIXTURE_DIR) + "/corpus.jsonl"));
  ace::ScriptedBackend backend(
      ace::ScriptedRuleSet::load(std::string(ACE_FIXTURE_DIR) + "/smoke.rules"));
  ace::EpisodeDeps deps;
  deps.backend = &backend;
  deps.retriever = &retriever;
  auto committee = ace::CommitteeConfig::of_size(5);
  committee.concurrent = false;
  const auto rounds = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ace::run_episode("When was the director of Harbor Lights born?",
                                              rounds, committee, {}, deps));
  }
}
BENCHMARK(BM_ScriptedEpisode)->Arg(1)->Arg(4)->Arg(8);

}  // namespace
BENCHMARK_MAIN();
