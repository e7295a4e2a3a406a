#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "efo/control.hpp"
#include "efo/decomposition.hpp"
#include "efo/fhtd.hpp"
#include "efo/oracle.hpp"
#include "efo/taxi.hpp"

namespace {

struct Fixture {
  efo::taxi::TaxiConfig env = efo::taxi::TaxiConfig::defaults();
  efo::TabularMdp mdp = efo::taxi::build_taxi_mdp(env);
  efo::Policy policy;

  Fixture() {
    efo::QLearningConfig q;
    q.discount = env.discount;
    policy = efo::greedy_policy(efo::train_q_learning(mdp, q, efo::RunSeed{0}.stream(efo::StreamPurpose::PolicyTraining)).q, mdp);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

// Six event tables learned from one shared stream; reports transitions per second.
void BM_FhtdTraining(benchmark::State& state) {
  const auto& f = fixture();
  efo::FhtdConfig config;
  config.horizon = static_cast<std::size_t>(state.range(0));
  const std::uint64_t steps = 100'000;
  for (auto _ : state) {
    efo::FhtdLearner learner(f.mdp, f.policy, efo::taxi::default_event_names(), config);
    learner.train(steps, efo::RunSeed{0});
    benchmark::DoNotOptimize(learner.tables().front().data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_FhtdTraining)->Arg(10)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FhtdUpdate(benchmark::State& state) {
  const auto& f = fixture();
  efo::FhgvfTable table("dropoff", static_cast<std::size_t>(state.range(0)), f.mdp.num_states(), f.mdp.num_actions(), 1.0);
  efo::Rng rng = efo::RunSeed{1}.stream(efo::StreamPurpose::Testing);
  const efo::StateId s = efo::taxi::encode_state({2, 2, 10, false});
  const efo::Transition tr = f.mdp.sample_transition(s, 2, rng);
  for (auto _ : state) {
    efo::fhtd_update(table, tr, 0.0, 0, 0.1);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FhtdUpdate)->Arg(30)->Arg(100);

void BM_ExactFhgvf(benchmark::State& state) {
  const auto& f = fixture();
  const auto horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(efo::exact_fhgvf(f.mdp, f.policy, "dropoff", horizon, 1.0));
}
BENCHMARK(BM_ExactFhgvf)->Arg(30)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ValueIteration(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(efo::value_iteration(f.mdp, f.env.discount));
}
BENCHMARK(BM_ValueIteration)->Unit(benchmark::kMillisecond);

void BM_DecomposeReconstruct(benchmark::State& state) {
  std::vector<double> q(static_cast<std::size_t>(state.range(0)));
  for (std::size_t h = 0; h < q.size(); ++h) q[h] = 1.0 - 1.0 / static_cast<double>(h + 2);
  for (auto _ : state) {
    const auto e = efo::decompose_fhgvf(q, 0.9);
    benchmark::DoNotOptimize(efo::reconstruct_fhgvf(e.values, 0.9));
  }
}
BENCHMARK(BM_DecomposeReconstruct)->Arg(30)->Arg(200);

void BM_Explain(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<efo::FhgvfTable> tables;
  std::map<std::string, double> rewards;
  for (const auto& name : efo::taxi::default_event_names()) {
    tables.push_back(efo::exact_fhgvf(f.mdp, f.policy, name, 30, 1.0));
    rewards[name] = efo::taxi::event_reward(*efo::taxi::parse_event(name));
  }
  const efo::StateId s = efo::taxi::encode_state({2, 2, 10, false});
  for (auto _ : state) {
    benchmark::DoNotOptimize(efo::explain(tables, s, 2, rewards, f.env.discount, efo::Provenance::Learned));
  }
}
BENCHMARK(BM_Explain);

}  // namespace

BENCHMARK_MAIN();
