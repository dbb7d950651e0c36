#pragma once

// Independent reference implementations used to check the library. Everything
// here is written directly from the defining sums, without FFTs and without
// sharing code with wmsense.

#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// X[k] = sum_n x[n] exp(-j 2 pi k n / N), O(N^2), long double accumulation.
std::vector<cplx> dft(const std::vector<cplx>& x);

/// |X[k]|^2 / N.
std::vector<double> periodogram(const std::vector<cplx>& x);

/// (1 / (Ms N)) sum_{k=-h}^{h} X[f + k + a/2] conj(X[f + k - a/2]), mod-N indexing.
cplx scf(const std::vector<cplx>& X, long alpha_bin, long f_bin, std::size_t smoothing);

/// (1 / (Ms N)) sum_{k=-h}^{h} X[f + k + a/2] conj(X[f - k - a/2]).
cplx conjugate_scf(const std::vector<cplx>& X, long alpha_bin, long f_bin, std::size_t smoothing);

/// KL divergence of N(m1, v1) from N(m2, v2) for scalars.
double scalar_kl(double m1, double v1, double m2, double v2);

/// Periodogram of an off-bin unit tone at `offset` bins: sad^2(k - offset) / N.
std::vector<double> leakage_pattern(double offset, std::size_t n);

/// Grid search over offsets in (lo, hi) at `step` for the offset whose
/// two-bin leakage ratio best matches xi[k1] / xi[k2].
double grid_offset(double xi_k1, double xi_k2, long k1, long k2, std::size_t n, double lo, double hi, double step);

/// Kolmogorov-Smirnov distance between the empirical CDF of `sample` and the
/// chi-square CDF with `dof` degrees of freedom.
double ks_chi_squared(std::vector<double> sample, double dof);

/// Upper quantile of chi-square(dof).
double chi_squared_quantile(double dof, double p);

/// Population KS distance between a scaled sum of `dof` independent
/// Gamma(shape, 1 / shape) variables, centred and standardised like the
/// windowed statistic, and chi-square(dof), estimated by Monte Carlo on
/// `draws` samples with a fixed seed.
double gamma_window_ks(std::size_t dof, double shape, std::size_t draws);

}  // namespace oracle
