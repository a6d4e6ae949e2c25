#include <benchmark/benchmark.h>

#include "embsp/gig.hpp"
#include "embsp/priors.hpp"
#include "embsp/rng.hpp"
#include "embsp/sampler.hpp"

using namespace embsp;
using Eigen::Index;
using Eigen::MatrixXd;

namespace {

struct Problem {
  RegressionData data;
  HyperParams hp;
  ChainState state;
};

Problem make_problem(Index n, Index p, Index q, MixingFamily family = MixingFamily::horseshoe()) {
  Rng rng(99, 0);
  MatrixXd X(n, p), Y(n, q);
  for (Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
  for (Index i = 0; i < Y.size(); ++i) Y.data()[i] = rng.normal();
  RegressionData data(X, Y);
  HyperParams hp = HyperParams::defaults(q, family);
  ChainState s = initial_state(data, hp, default_tau(static_cast<long>(n), static_cast<long>(p)));
  for (Index j = 0; j < p; ++j) s.xi(j) = rng.gamma(0.5, 0.5);
  return {std::move(data), std::move(hp), std::move(s)};
}

void BM_BDraw(benchmark::State& st, BPath path) {
  const auto prob = make_problem(50, st.range(0), 3);
  Rng rng(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(conditional_B_sample(prob.state, prob.data, rng, path));
  st.SetComplexityN(st.range(0));
}

void BM_BDrawNaive(benchmark::State& st) { BM_BDraw(st, BPath::Naive); }
void BM_BDrawFast(benchmark::State& st) { BM_BDraw(st, BPath::Fast); }

void BM_Gig(benchmark::State& st) {
  const double lambda = static_cast<double>(st.range(0)) / 2.0;
  Rng rng(2, 0);
  for (auto _ : st) benchmark::DoNotOptimize(sample_gig(lambda, 2.0, 0.05, rng));
}

void BM_XiSlice(benchmark::State& st) {
  const auto family = MixingFamily::gdp(1.0, 1.0);
  mixing_normalizer(family);
  Rng rng(3, 0);
  double xi = 1.0;
  for (auto _ : st) {
    xi = draw_xi_conditional(family, 3, 0.4, 1.0, xi, rng);
    benchmark::DoNotOptimize(xi);
  }
}

// One full sweep at the dimensions of experiments 1, 3 and 6.
void BM_Sweep(benchmark::State& st) {
  static const Index dims[][2] = {{25, 125}, {75, 650}, {150, 1837}};
  const auto* d = dims[st.range(0)];
  auto prob = make_problem(d[0], d[1], 3);
  SweepOptions opt;
  opt.b_path = choose_b_path(FastPath::Auto, d[0], d[1]);
  Rng rng(4, 0);
  for (auto _ : st) gibbs_sweep(prob.state, prob.data, prob.hp, opt, rng);
  st.SetLabel("n=" + std::to_string(d[0]) + " p=" + std::to_string(d[1]));
}

}  // namespace

BENCHMARK(BM_BDrawNaive)->RangeMultiplier(2)->Range(25, 800)->Unit(benchmark::kMicrosecond)->Complexity();
BENCHMARK(BM_BDrawFast)->RangeMultiplier(2)->Range(25, 800)->Unit(benchmark::kMicrosecond)->Complexity();
BENCHMARK(BM_Gig)->DenseRange(-3, 3, 2);
BENCHMARK(BM_XiSlice);
BENCHMARK(BM_Sweep)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
