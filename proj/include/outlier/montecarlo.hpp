#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "outlier/landscape.hpp"

namespace outlier {

using Rng = std::mt19937_64;

/// Independent generator for trial `index` of a run seeded with `seed`.
Rng trial_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

/// Ascending eigenvalues of M = H + A for the quadratic potential
/// V(z) = c2 z^2 + c1 z + c0: density proportional to exp(-n tr(V(M) - A M)),
/// A = diag(a x r, 0 x (n-r)). For V = z^2/2, H has real normal diagonal
/// entries of variance 1/n and complex off-diagonal entries whose real and
/// imaginary parts have variance 1/(2n).
std::vector<double> sample_spectrum(int n, int r, double a, Rng& rng, const Potential& V = Potential::gaussian());

/// The k largest eigenvalues of the same sample, descending. Consumes the
/// generator exactly like sample_spectrum.
std::vector<double> sample_top(int n, int r, double a, int k, Rng& rng, const Potential& V = Potential::gaussian());

struct McReport {
  int n = 0;
  int r = 0;
  double a = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> outlier_means;      // rank 1 = largest eigenvalue
  std::vector<double> outlier_variances;  // unbiased sample variance
  double ks_distance = 0.0;
  double escape_rate = 0.0;
  double wall_time = 0.0;  // seconds; not part of the reproducible output
  std::vector<std::vector<double>> top;  // per-trial top-r eigenvalues, descending
};

/// Top-r statistics over `trials` samples. r = 1: KS distance of the largest
/// eigenvalue against Normal(a*, 1/(n c)). r >= 2: two-sample KS distance of
/// the pooled (lambda - a*) sqrt(n c / r) against pooled eigenvalues of an
/// r x r GUE with weight exp(-r tr H^2 / 2), sampled with ten times as many
/// trials from an independent stream.
McReport outlier_stats(int n, int r, double a, int trials, std::uint64_t seed, const Landscape& L);

/// Fraction of trials whose largest eigenvalue exceeds `threshold`.
/// Refuses non-subcritical landscapes unless `force` is set.
double subcritical_escape_rate(int n, int r, double a, int trials, std::uint64_t seed, double threshold,
                               const Landscape& L, bool force = false);

/// sup |F_n - Phi((x - mean)/sd)|.
double ks_normal(std::vector<double> sample, double mean, double variance);
/// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace outlier
