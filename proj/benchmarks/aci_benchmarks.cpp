#include <benchmark/benchmark.h>

#include <cmath>

#include "aci/entropy.hpp"
#include "aci/filter.hpp"
#include "aci/cir.hpp"
#include "aci/presets.hpp"
#include "aci/rng.hpp"
#include "aci/simulate.hpp"
#include "aci/smoother.hpp"

namespace {

// A one-observed, two-hidden pair with both shared and private noise
// channels, so the filter exercises its correlated-noise path.
aci::CgnsModel coupled_pair() {
  aci::CgnsModel m;
  m.obs_dim = 1;
  m.hidden_dim = 2;
  m.nchan1 = 1;
  m.nchan2 = 2;
  m.coupling = [](double, const aci::Vec&) {
    aci::Mat lx(1, 2);
    lx << 0.8, -0.3;
    return lx;
  };
  m.obs_forcing = [](double t, const aci::Vec&) {
    return aci::Vec::Constant(1, 0.1 * std::sin(t));
  };
  m.feedback = [](double, const aci::Vec&) {
    aci::Mat ly(2, 2);
    ly << -1.2, 0.4, -0.2, -0.9;
    return ly;
  };
  m.hidden_forcing = [](double, const aci::Vec&) {
    aci::Vec f(2);
    f << 0.05, -0.1;
    return f;
  };
  m.obs_noise_1 = [](double, const aci::Vec&) {
    return aci::Mat::Constant(1, 1, 0.5);
  };
  m.obs_noise_2 = [](double, const aci::Vec&) {
    aci::Mat o(1, 2);
    o << 0.2, 0.1;
    return o;
  };
  m.hidden_noise_1 = [](double, const aci::Vec&) {
    aci::Mat h(2, 1);
    h << 0.1, 0.05;
    return h;
  };
  m.hidden_noise_2 = [](double, const aci::Vec&) {
    aci::Mat h(2, 2);
    h << 0.6, 0.0, 0.1, 0.7;
    return h;
  };
  m.name = "bench-pair";
  return m;
}

const aci::Trajectory& bench_trajectory() {
  static const aci::Trajectory tr = [] {
    aci::SimulateOptions opt;
    opt.x0 = aci::Vec::Zero(1);
    opt.y0 = aci::Vec::Zero(2);
    opt.t_end = 2.0;
    opt.seed = 7;
    return aci::simulate(coupled_pair(), opt);
  }();
  return tr;
}

const aci::FilterSeries& bench_filter() {
  static const aci::FilterSeries fs =
      aci::run_filter(coupled_pair(), bench_trajectory());
  return fs;
}

}  // namespace

void BM_FilterRun(benchmark::State& state) {
  const auto m = coupled_pair();
  const auto& tr = bench_trajectory();
  for (auto _ : state) {
    const auto fs = aci::run_filter(m, tr);
    benchmark::DoNotOptimize(fs.state.back().mean.data());
  }
  state.SetItemsProcessed(state.iterations() * tr.steps());
}

BENCHMARK(BM_FilterRun)->Unit(benchmark::kMillisecond);

void BM_SmootherRun(benchmark::State& state) {
  const auto& fs = bench_filter();
  aci::SmootherOptions opt;
  opt.lag_cap = static_cast<int>(state.range(0));
  for (auto _ : state) {
    aci::OnlineSmoother sm(fs, opt);
    sm.run();
    benchmark::DoNotOptimize(sm.complete().front().mean.data());
  }
  state.SetItemsProcessed(state.iterations() * fs.steps());
}

BENCHMARK(BM_SmootherRun)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_RelativeEntropy(benchmark::State& state) {
  aci::GaussianState p, q;
  p.mean = aci::Vec::Zero(2);
  p.cov = aci::Mat::Identity(2, 2);
  q.mean = aci::Vec::Constant(2, 0.3);
  q.cov = aci::Mat::Identity(2, 2) * 1.4;
  q.cov(0, 1) = q.cov(1, 0) = 0.2;
  for (auto _ : state) {
    const auto v = aci::gauss_relative_entropy(p, q);
    benchmark::DoNotOptimize(v.signal + v.dispersion);
  }
}

BENCHMARK(BM_RelativeEntropy);

void BM_ExactRangeScan(benchmark::State& state) {
  std::vector<double> profile(4096);
  for (size_t i = 0; i < profile.size(); ++i)
    profile[i] = aci::rng::uniform(11, i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        aci::forward_length_exact(profile, 1e-3, 4.096));
    benchmark::DoNotOptimize(
        aci::backward_length_exact(profile, 1e-3, 4.095));
  }
  state.SetItemsProcessed(state.iterations() * profile.size());
}

BENCHMARK(BM_ExactRangeScan);

BENCHMARK_MAIN();
