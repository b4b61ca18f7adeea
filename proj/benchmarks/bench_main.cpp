#include "comot/comot.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace comot;

std::vector<Detection> random_detections(std::mt19937_64& rng, const std::string& agent, int n) {
  std::uniform_real_distribution<double> pos(-40.0, 40.0), yaw(-kPi, kPi);
  std::vector<Detection> out;
  for (int k = 0; k < n; ++k) {
    Detection d;
    d.box = Box{pos(rng), pos(rng), 0.8, yaw(rng), 1.6, 1.8, 4.5};
    d.score = 0.8;
    d.agent_id = agent;
    d.local_index = static_cast<std::size_t>(k);
    out.push_back(d);
  }
  return out;
}

void BM_SolveComplete(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::VectorXd delta = Eigen::VectorXd::Random(n), anchors = Eigen::VectorXd::Random(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_complete(delta, anchors));
}
BENCHMARK(BM_SolveComplete)->RangeMultiplier(4)->Range(4, 256);

void BM_SolveDense(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd ext = extended_laplacian(complete_graph_laplacian(n));
  const Eigen::VectorXd b = Eigen::VectorXd::Random(2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(solve(ext, b));
}
BENCHMARK(BM_SolveDense)->RangeMultiplier(4)->Range(4, 256);

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd cost = Eigen::MatrixXd::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(hungarian_min_cost(cost));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 128);

void BM_Iou3d(benchmark::State& state) {
  const Box a{0, 0, 0, 0.3, 1.6, 1.8, 4.5}, b{0.7, 0.4, 0.1, -0.5, 1.5, 1.9, 4.2};
  for (auto _ : state) benchmark::DoNotOptimize(iou3d(a, b));
}
BENCHMARK(BM_Iou3d);

void BM_RefineTsa(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const auto di = random_detections(rng, "i", n), dj = random_detections(rng, "j", n);
  for (auto _ : state) benchmark::DoNotOptimize(refine(di, dj, RefineScheme::TSA, 0.25));
}
BENCHMARK(BM_RefineTsa)->RangeMultiplier(2)->Range(4, 64);

void BM_TrackerSequence(benchmark::State& state) {
  ScenarioConfig cfg = ScenarioConfig::two_agent_default();
  for (auto& a : cfg.agents) a.sigma = 0.4;
  const Scenario s = generate(cfg);
  TrackerConfig tc;
  tc.method = static_cast<Method>(state.range(0));
  const KalmanModel model = KalmanModel::from_params(tc.kalman);
  for (auto _ : state) benchmark::DoNotOptimize(run_sequence(s.bundles, tc, model));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.bundles.size()));
}
BENCHMARK(BM_TrackerSequence)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
