#include <benchmark/benchmark.h>

#include <numbers>

#include "qvar/circuits.hpp"
#include "qvar/hamiltonians.hpp"
#include "qvar/mixture.hpp"
#include "qvar/observables.hpp"
#include "qvar/states.hpp"
#include "qvar/training.hpp"

namespace {

using namespace qvar;

RealVector random_angles(Eigen::Index count, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  RealVector th(count);
  for (auto& v : th) v = angle(rng);
  return th;
}

void BM_CircuitApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Circuit c = hea(n, 4);
  Rng rng(1);
  const RealVector th = random_angles(c.param_count(), rng);
  const Matrix psi = Matrix(random_unit_vector(Eigen::Index{1} << n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(apply(c, th, psi));
  state.SetComplexityN(Eigen::Index{1} << n);
}
BENCHMARK(BM_CircuitApply)->DenseRange(4, 12, 2)->Complexity();

void BM_HermEig(benchmark::State& state) {
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  Rng rng(2);
  const Matrix h = random_hermitian(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(herm_eig(h));
}
BENCHMARK(BM_HermEig)->RangeMultiplier(2)->Range(16, 256);

// Real symmetric lattice Hamiltonians take the real-solver path.
void BM_GroundStateSchwinger(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix h = schwinger(n, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h));
}
BENCHMARK(BM_GroundStateSchwinger)->DenseRange(4, 8, 2);

void BM_BatchProbabilities(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = mixture::MixtureModel::ghz(n, 0.25);
  const TrainSet ts = make_trainset(model.family(), 10, 0.0, 1.0);
  const StateBatch batch(ts.items);
  const Circuit c = hea(n, 5);
  Rng rng(3);
  const RealVector th = random_angles(c.param_count(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(batch_probabilities(c, th, 1, batch));
}
BENCHMARK(BM_BatchProbabilities)->DenseRange(3, 7, 2);

void BM_LossAndGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = mixture::MixtureModel::ghz(n, 0.25);
  const TrainSet ts = make_trainset(model.family(), 10, 0.0, 1.0);
  const Circuit c = hea(n, 5);
  const TrainConfig cfg;
  const Objective obj(c, 1, ts, cfg);
  Rng rng(4);
  const RealVector x = random_angles(obj.size(), rng);
  RealVector grad(obj.size());
  for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(x, grad));
}
BENCHMARK(BM_LossAndGradient)->DenseRange(3, 7, 2);

void BM_FiniteDifferenceGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = mixture::MixtureModel::ghz(n, 0.25);
  const TrainSet ts = make_trainset(model.family(), 10, 0.0, 1.0);
  const Circuit c = hea(n, 5);
  const TrainConfig cfg;
  const Objective obj(c, 1, ts, cfg);
  Rng rng(4);
  const RealVector x = random_angles(obj.size(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(obj.fd_gradient(x, 1e-5));
}
BENCHMARK(BM_FiniteDifferenceGradient)->DenseRange(3, 5, 2);

}  // namespace

BENCHMARK_MAIN();
