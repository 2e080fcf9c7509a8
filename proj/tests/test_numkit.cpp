#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qstrotter/numkit.hpp"
#include "support.hpp"

using namespace qst::numkit;
using testsupport::Rng;

namespace {
CMatrix cm2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("mat_exp basics") {
  CHECK(op_norm(mat_exp(CMatrix::Zero(3, 3)) - CMatrix::Identity(3, 3)) ==
        doctest::Approx(0.0).epsilon(1e-14));

  CMatrix d = cm2(1.0, 0.0, 0.0, -1.0);
  CMatrix e = mat_exp(d);
  CHECK(std::abs(e(0, 0) - std::exp(1.0)) < 1e-14);
  CHECK(std::abs(e(1, 1) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(e(0, 1)) < 1e-16);

  // Nilpotent: exp = I + N.
  CMatrix n = cm2(0.0, 1.0, 0.0, 0.0);
  CHECK(op_norm(mat_exp(n) - (CMatrix::Identity(2, 2) + n)) < 1e-15);

  CHECK_THROWS_AS(mat_exp(CMatrix::Zero(2, 3)), std::invalid_argument);
  CMatrix bad = cm2(std::nan(""), 0.0, 0.0, 0.0);
  CHECK_THROWS_AS(mat_exp(bad), std::invalid_argument);
}

TEST_CASE("mat_exp against power series on pre-scaled inputs") {
  Rng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    CMatrix a = rng.cmatrix(4, 4);
    const double nrm = op_norm(a);
    if (nrm > 0) a /= nrm;  // ||a|| = 1
    CHECK(testsupport::rel_err(mat_exp(a), testsupport::exp_series_oracle(a)) <
          1e-12);
  }
}

TEST_CASE("mat_exp semigroup and inverse up to norm 100") {
  Rng rng(102);
  for (int trial = 0; trial < 6; ++trial) {
    CMatrix a = rng.cmatrix(5, 5);
    a /= op_norm(a);
    // Doubling chain reaches ||A|| ~ 100 while staying cross-checked.
    for (double s : {1.0, 2.0, 4.0, 16.0, 64.0, 100.0}) {
      const CMatrix half = mat_exp(0.5 * s * a);
      CHECK(testsupport::rel_err(mat_exp(s * a), half * half) < 1e-10);
    }
    const CMatrix ea = mat_exp(a);
    const CMatrix eminus = mat_exp(-a);
    CHECK(op_norm(ea * eminus - CMatrix::Identity(5, 5)) < 1e-12);
  }
}

TEST_CASE("mat_exp handles non-normal input") {
  // Large off-diagonal coupling, defective direction.
  CMatrix a(3, 3);
  a << 0.0, 40.0, 0.0, 0.0, 0.0, 40.0, 0.0, 0.0, 0.0;
  CMatrix e = mat_exp(a);
  // exp of strictly upper triangular nilpotent: I + A + A^2/2.
  CMatrix want = CMatrix::Identity(3, 3) + a + 0.5 * a * a;
  CHECK(testsupport::rel_err(e, want) < 1e-12);
}

TEST_CASE("psd_sqrt recovers constructed roots") {
  CHECK(op_norm(psd_sqrt(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)) <
        1e-14);
  CMatrix d = cm2(4.0, 0.0, 0.0, 9.0);
  CMatrix r = psd_sqrt(d);
  CHECK(std::abs(r(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(r(1, 1) - 3.0) < 1e-14);

  Rng rng(103);
  for (int trial = 0; trial < 15; ++trial) {
    const CMatrix b = rng.psd(4, 2.0);  // PSD with norm 2
    const CMatrix got = psd_sqrt(b * b);
    CHECK(op_norm(got - b) < 1e-10);
    const CMatrix s = psd_sqrt(b);
    CHECK(op_norm(s * s - b) < 1e-10);
    CHECK(anti_hermitian_norm(s) < 1e-12);
  }
}

TEST_CASE("psd_sqrt rejections and clamping") {
  CHECK_THROWS_AS(psd_sqrt(cm2(1.0, 0.0, 0.0, -1.0)), std::domain_error);
  CHECK_THROWS_AS(psd_sqrt(cm2(0.0, 1.0, 0.0, 0.0)), std::invalid_argument);
  // Roundoff-scale negative eigenvalue is clamped, not fatal.
  CMatrix tiny = cm2(1.0, 0.0, 0.0, -1e-15);
  CHECK(op_norm(psd_sqrt(tiny) * psd_sqrt(tiny) - cm2(1.0, 0.0, 0.0, 0.0)) <
        1e-10);
}

TEST_CASE("pseudo_inverse closed forms and Penrose identities") {
  CMatrix d = cm2(2.0, 0.0, 0.0, 0.0);
  CMatrix p = pseudo_inverse(d);
  CHECK(std::abs(p(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(p(1, 1)) < 1e-14);

  Rng rng(104);
  {
    const CMatrix a = rng.cmatrix(4, 4);
    CHECK(op_norm(pseudo_inverse(a) - a.partialPivLu().inverse()) < 1e-10);
  }
  {
    // Rank one u v*: pseudoinverse is v u* / (||u||^2 ||v||^2).
    const CVector u = rng.cvector(5);
    const CVector v = rng.cvector(3);
    const CMatrix a = u * v.adjoint();
    const CMatrix want =
        (v * u.adjoint()) / (u.squaredNorm() * v.squaredNorm());
    CHECK(op_norm(pseudo_inverse(a) - want) < 1e-12);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = rng.cmatrix(5, 2) * rng.cmatrix(2, 4);  // rank <= 2
    const CMatrix p2 = pseudo_inverse(a);
    CHECK(op_norm(a * p2 * a - a) < 1e-9);
    CHECK(op_norm(p2 * a * p2 - p2) < 1e-9);
    CHECK(anti_hermitian_norm(a * p2) < 1e-9);
    CHECK(anti_hermitian_norm(p2 * a) < 1e-9);
  }
}

TEST_CASE("kernel_basis") {
  CHECK(kernel_basis(CMatrix::Identity(3, 3)).cols() == 0);
  {
    const CMatrix k = kernel_basis(CMatrix::Zero(2, 3));
    CHECK(k.cols() == 3);
    CHECK(op_norm(k.adjoint() * k - CMatrix::Identity(3, 3)) < 1e-12);
  }
  {
    CMatrix d = CMatrix::Zero(3, 3);
    d(0, 0) = 1.0;
    d(2, 2) = 2.0;
    const CMatrix k = kernel_basis(d);
    REQUIRE(k.cols() == 1);
    CHECK(std::abs(std::abs(k(1, 0)) - 1.0) < 1e-12);
  }
  Rng rng(105);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = rng.cmatrix(4, 2) * rng.cmatrix(2, 5);
    const CMatrix k = kernel_basis(a);
    CHECK(k.cols() == 3);
    CHECK(op_norm(a * k) <= 1e-9 * (1.0 + op_norm(a)));
    CHECK(op_norm(k.adjoint() * k - CMatrix::Identity(k.cols(), k.cols())) <
          1e-12);
  }
}

TEST_CASE("range_projector") {
  Rng rng(106);
  const CMatrix a = rng.cmatrix(5, 2) * rng.cmatrix(2, 4);
  const CMatrix p = range_projector(a);
  CHECK(op_norm(p * p - p) < 1e-12);
  CHECK(anti_hermitian_norm(p) < 1e-12);
  CHECK(op_norm(p * a - a) < 1e-10);
  CHECK(std::abs(p.trace().real() - 2.0) < 1e-10);
}

TEST_CASE("loewner_leq") {
  const CMatrix z = CMatrix::Zero(3, 3);
  const CMatrix id = CMatrix::Identity(3, 3);
  CHECK(loewner_leq(z, id));
  CHECK_FALSE(loewner_leq(id, z));
  CHECK(loewner_leq(id, id));
  CMatrix half = CMatrix::Zero(2, 2);
  half(0, 0) = 1.0;
  CHECK_FALSE(loewner_leq(half, CMatrix::Zero(2, 2)));
  Rng rng(107);
  const CMatrix g = rng.cmatrix(3, 3);
  CHECK(loewner_leq(-(g * g.adjoint()), z));
  CHECK_THROWS_AS(loewner_leq(cm2(0.0, 1.0, 0.0, 0.0), CMatrix::Zero(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("op_norm") {
  CHECK(op_norm(CMatrix::Identity(4, 4)) == doctest::Approx(1.0));
  CHECK(op_norm(cm2(3.0, 0.0, 0.0, -4.0)) == doctest::Approx(4.0));
  Rng rng(108);
  CHECK(op_norm(rng.unitary(4)) == doctest::Approx(1.0).epsilon(1e-12));
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = rng.cmatrix(4, 6);
    CHECK(std::abs(op_norm(a) - testsupport::op_norm_power_oracle(a)) < 1e-8);
    CHECK(std::abs(op_norm(Complex(0.0, 2.0) * a) - 2.0 * op_norm(a)) < 1e-10);
  }
  CHECK(op_norm(CMatrix(0, 0)) == 0.0);
}

TEST_CASE("kron mixed-product rule") {
  Rng rng(109);
  const CMatrix a = rng.cmatrix(2, 3), b = rng.cmatrix(3, 2);
  const CMatrix c = rng.cmatrix(3, 2), d2 = rng.cmatrix(2, 3);
  CHECK(op_norm(kron(a, c) * kron(b, d2) - kron(a * b, c * d2)) < 1e-12);
}

TEST_CASE("tolerance scaling") {
  Tolerance tol;
  CHECK(tol.scaled(1.0) == doctest::Approx(1e-9));
  CHECK(tol.scaled(0.0) == doctest::Approx(1e-12));
  CHECK(tol.scaled(1e5) == doctest::Approx(1e-4));
}
