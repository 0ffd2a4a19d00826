#include "outlier/montecarlo.hpp"

#include <Eigen/Eigenvalues>
#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "outlier/error.hpp"

namespace outlier {

Rng trial_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

namespace {

// Column-major dense sample of M; see sample_spectrum for the law.
Eigen::MatrixXcd sample_matrix(int n, int r, double a, Rng& rng, const Potential& V) {
  if (n < 1 || r < 0 || r > n) throw ConfigError("sampling needs n >= 1 and 0 <= r <= n");
  if (!V.is_quadratic()) throw ConfigError("MC requires Gaussian potential");
  // c2 M^2 + c1 M - A M = c2 (M - (A - c1)/(2 c2))^2 + const.
  const double c2 = V.coeffs()[2], c1 = V.coeffs()[1];
  const double var_diag = 1.0 / (2.0 * c2 * n);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd_diag = std::sqrt(var_diag), sd_off = std::sqrt(0.5 * var_diag);

  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    m(j, j) = sd_diag * normal(rng) + ((j < r ? a : 0.0) - c1) / (2.0 * c2);
    for (int i = j + 1; i < n; ++i) {
      const double re = sd_off * normal(rng);
      const double im = sd_off * normal(rng);
      m(i, j) = {re, im};
      m(j, i) = {re, -im};
    }
  }
  return m;
}

// Trial-level parallelism lives in parallel_for; a multithreaded BLAS would
// oversubscribe and make the reductions order-dependent.
void single_threaded_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

std::vector<double> sample_spectrum(int n, int r, double a, Rng& rng, const Potential& V) {
  Eigen::MatrixXcd m = sample_matrix(n, r, a, rng, V);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw MathError("Hermitian eigensolver failed");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> sample_top(int n, int r, double a, int k, Rng& rng, const Potential& V) {
  if (k < 1 || k > n) throw ConfigError("sample_top needs 1 <= k <= n");
  single_threaded_blas();
  Eigen::MatrixXcd m = sample_matrix(n, r, a, rng, V);
  std::vector<double> w(n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  lapack_complex_double dummy{};
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'N', 'I', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(m.data()), n, 0.0, 0.0,
                                         n - k + 1, n, 0.0, &found, w.data(), &dummy, 1, support.data());
  if (info != 0 || found != k) throw MathError("Hermitian eigensolver failed");
  std::vector<double> top(w.rbegin() + (n - k), w.rend());
  return top;
}

namespace {

// Runs body(i) for i in [0, count) across hardware threads; each index writes
// only its own slot.
template <class F>
void parallel_for(int count, F&& body) {
  const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void require_gaussian(const Landscape& L) {
  if (!L.em.potential().is_quadratic()) throw ConfigError("MC requires Gaussian potential");
}

}  // namespace

double ks_normal(std::vector<double> sample, double mean, double variance) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double sd = std::sqrt(variance);
  const double count = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = 0.5 * std::erfc(-(sample[i] - mean) / (sd * std::sqrt(2.0)));
    d = std::max({d, (i + 1) / count - f, f - i / count});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

McReport outlier_stats(int n, int r, double a, int trials, std::uint64_t seed, const Landscape& L) {
  require_gaussian(L);
  if (L.regime != Regime::Supercritical) throw ConfigError("outlier statistics need a supercritical landscape");
  if (r < 1 || r > n || trials < 2) throw ConfigError("need 1 <= r <= n and at least 2 trials");
  if (std::abs(L.a - a) > 1e-12 * std::max(1.0, std::abs(a))) throw ConfigError("landscape was built for a different a");
  const auto start = std::chrono::steady_clock::now();

  McReport rep;
  rep.n = n;
  rep.r = r;
  rep.a = a;
  rep.trials = trials;
  rep.seed = seed;
  rep.top.assign(trials, {});
  const Potential& V = L.em.potential();
  parallel_for(trials, [&](int t) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    rep.top[t] = sample_top(n, r, a, r, rng, V);
  });

  for (int k = 0; k < r; ++k) {
    double mean = 0.0;
    for (const auto& row : rep.top) mean += row[k];
    mean /= trials;
    double var = 0.0;
    for (const auto& row : rep.top) var += (row[k] - mean) * (row[k] - mean);
    rep.outlier_means.push_back(mean);
    rep.outlier_variances.push_back(var / (trials - 1));
  }

  const double as = *L.a_star, c = *L.curvature_c;
  if (r == 1) {
    std::vector<double> top1;
    for (const auto& row : rep.top) top1.push_back(row[0]);
    rep.ks_distance = ks_normal(top1, as, 1.0 / (n * c));
  } else {
    const double scale = std::sqrt(n * c / r);
    std::vector<double> pooled;
    for (const auto& row : rep.top)
      for (double x : row) pooled.push_back((x - as) * scale);
    const int ref_trials = 10 * trials;
    std::vector<std::vector<double>> ref(ref_trials);
    parallel_for(ref_trials, [&](int t) {
      Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t), 1);
      ref[t] = sample_spectrum(r, 0, 0.0, rng);
    });
    std::vector<double> ref_pooled;
    for (const auto& row : ref) ref_pooled.insert(ref_pooled.end(), row.begin(), row.end());
    rep.ks_distance = ks_two_sample(pooled, ref_pooled);
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double subcritical_escape_rate(int n, int r, double a, int trials, std::uint64_t seed, double threshold,
                               const Landscape& L, bool force) {
  require_gaussian(L);
  if (!force && L.regime != Regime::Subcritical)
    throw ConfigError("escape rate is defined for subcritical landscapes; pass force to override");
  if (n < 2 || trials < 1) throw ConfigError("need n >= 2 and at least one trial");
  if (r < 1 || 4 * r >= n) throw ConfigError("need 1 <= r < n/4");
  std::vector<char> escaped(trials, 0);
  const Potential& V = L.em.potential();
  parallel_for(trials, [&](int t) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    escaped[t] = sample_top(n, r, a, 1, rng, V).front() > threshold ? 1 : 0;
  });
  return static_cast<double>(std::count(escaped.begin(), escaped.end(), 1)) / trials;
}

}  // namespace outlier
