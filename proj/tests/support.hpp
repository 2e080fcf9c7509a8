// Test-only helpers: deterministic RNG and independent numerical oracles.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qstrotter/numkit.hpp"

namespace testsupport {

using qst::numkit::CMatrix;
using qst::numkit::Complex;
using qst::numkit::CVector;

// Deterministic draws independent of the library's sampler internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Complex cnormal() { return {normal(), normal()}; }

  CMatrix cmatrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * cnormal();
    return m;
  }

  CVector cvector(Eigen::Index n, double scale = 1.0) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * cnormal();
    return v;
  }

  CMatrix hermitian(Eigen::Index n, double scale = 1.0) {
    const CMatrix g = cmatrix(n, n, scale);
    return 0.5 * (g + g.adjoint());
  }

  CMatrix psd(Eigen::Index n, double scale = 1.0) {
    const CMatrix g = cmatrix(n, n);
    CMatrix p = g * g.adjoint();
    const double nrm = qst::numkit::op_norm(p);
    if (nrm > 0) p *= scale / nrm;
    return p;
  }

  CMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(cmatrix(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }

  // Random contraction with norm exactly `norm` (norm <= 1).
  CMatrix contraction(Eigen::Index rows, Eigen::Index cols, double norm) {
    CMatrix g = cmatrix(rows, cols);
    const double nrm = qst::numkit::op_norm(g);
    if (nrm > 0) g *= norm / nrm;
    return g;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Truncated power series; adequate only for pre-scaled inputs (||a|| <~ 1).
inline CMatrix exp_series_oracle(const CMatrix& a, int terms = 40) {
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int n = 1; n <= terms; ++n) {
    term = term * a / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

// Power iteration on A*A from a fixed start vector.
inline double op_norm_power_oracle(const CMatrix& a, int max_iters = 50000) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const CMatrix m = a.adjoint() * a;
  CVector v(m.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = Complex(1.0 + 1e-3 * static_cast<double>(i),
                   1e-3 * static_cast<double>(i % 7));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    CVector w = m * v;
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    w /= nrm;
    const double next = std::real(Complex(w.adjoint() * m * w));
    if (it > 3 && std::abs(next - lam) <= 1e-15 * std::max(1.0, next)) {
      lam = next;
      break;
    }
    lam = next;
    v = w;
  }
  return std::sqrt(std::max(lam, 0.0));
}

inline double rel_err(const CMatrix& got, const CMatrix& want) {
  const double scale = 1.0 + qst::numkit::op_norm(want);
  return qst::numkit::op_norm(got - want) / scale;
}

}  // namespace testsupport
