#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qstrotter/cocycle_sim.hpp"
#include "support.hpp"

using namespace qst;
using ito::BlockGenerator;
using numkit::CMatrix;
using numkit::Complex;
using numkit::CVector;
using sim::StepFunction;
using testsupport::rel_err;

namespace {

CVector cv1(Complex z) {
  CVector v(1);
  v << z;
  return v;
}

StepFunction two_step(const CVector& a, const CVector& b, double where) {
  StepFunction s;
  s.breaks = {where};
  s.values = {a, b};
  return s;
}

// Hand-built dressing of the drift block, written out term by term.
CMatrix dressed_drift_oracle(const BlockGenerator& f, const CVector& cp,
                             const CVector& c) {
  const CMatrix ec = ito::noise_injection(c, f.dim_h);
  const CMatrix ep = ito::noise_injection(cp, f.dim_h);
  return f.K + f.M * ec + ep.adjoint() * f.L + ep.adjoint() * f.C * ec -
         0.5 * (c.squaredNorm() + cp.squaredNorm()) *
             CMatrix::Identity(f.dim_h, f.dim_h);
}

}  // namespace

TEST_CASE("step functions evaluate left-closed cells") {
  const CVector a = cv1(Complex(1.0, 0.0));
  const CVector b = cv1(Complex(0.0, 2.0));
  const StepFunction s = two_step(a, b, 0.5);
  CHECK(s.dim() == 1);
  CHECK(s.value_at(0.0) == a);
  CHECK(s.value_at(0.499) == a);
  CHECK(s.value_at(0.5) == b);  // left-closed on the right cell
  CHECK(s.value_at(9.0) == b);
  CHECK(s.value_at(-3.0) == a);

  const auto inside = s.breaks_in(0.0, 1.0);
  REQUIRE(inside.size() == 1);
  CHECK(inside[0] == 0.5);
  CHECK(s.breaks_in(0.5, 1.0).empty());  // strict interior only
  CHECK(s.breaks_in(0.6, 1.0).empty());

  const StepFunction c = StepFunction::constant(a);
  CHECK(c.value_at(123.0) == a);
  CHECK(c.breaks_in(-1e9, 1e9).empty());

  StepFunction bad;
  bad.breaks = {0.3, 0.2};
  bad.values = {a, a, b};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  StepFunction bad2;
  bad2.values = {a, b};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
  StepFunction bad3;
  bad3.breaks = {0.5};
  bad3.values = {a, CVector(2)};
  CHECK_THROWS_AS(bad3.validate(), std::invalid_argument);
}

TEST_CASE("weyl generators are unitary displacements") {
  testsupport::Rng rng(201);
  for (int trial = 0; trial < 8; ++trial) {
    const int dim_h = 1 + trial % 2;
    const CVector c = rng.cvector(1 + trial % 3);
    const auto w = sim::weyl_generator(c, dim_h);
    const auto rep = ito::classify(w);
    CHECK(rep.is_unitary);
    CHECK(rep.is_pure_gaussian);
    CHECK(numkit::op_norm(ito::series(w, ito::adjoint(w)).as_matrix()) <
          1e-12 * (1.0 + w.norm()));
  }
}

TEST_CASE("dressed generator drift matches the termwise formula") {
  testsupport::Rng rng(202);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim_h = 1 + trial % 2;
    const int dim_k = 1 + trial % 3;
    BlockGenerator f;
    f.dim_h = dim_h;
    f.dim_k = dim_k;
    const Eigen::Index n = f.noise_dim();
    f.K = rng.cmatrix(dim_h, dim_h);
    f.M = rng.cmatrix(dim_h, n);
    f.L = rng.cmatrix(n, dim_h);
    f.C = rng.cmatrix(n, n);
    const CVector c = rng.cvector(dim_k);
    const CVector cp = rng.cvector(dim_k);
    const auto dressed = sim::dressed_generator(f, cp, c);
    CHECK(rel_err(dressed.K, dressed_drift_oracle(f, cp, c)) < 1e-13);
    // Dressing never changes the preservation block.
    CHECK(rel_err(dressed.C, f.C) < 1e-14);
  }
  CHECK_THROWS_AS(
      sim::dressed_generator(BlockGenerator::zero(1, 2), cv1(1.0), cv1(1.0)),
      std::invalid_argument);
}

TEST_CASE("slice of the trivial cocycle is the coherent overlap") {
  // For the zero generator the slice is exp of the integrated overlap
  // exponent <c', c> - |c|^2/2 - |c'|^2/2, computed here by hand.
  const CVector a = cv1(Complex(1.0, 0.5));
  const CVector b = cv1(Complex(-0.3, 0.2));
  const CVector ap = cv1(Complex(0.4, -1.0));
  const CVector bp = cv1(Complex(0.0, 0.7));
  const StepFunction g = two_step(a, b, 0.4);
  const StepFunction gp = two_step(ap, bp, 0.7);
  const auto f0 = BlockGenerator::zero(2, 1);

  auto exponent = [](const CVector& cp, const CVector& c) {
    return (cp.adjoint() * c)(0, 0) -
           Complex(0.5 * (c.squaredNorm() + cp.squaredNorm()), 0.0);
  };
  // Cells of [0, 1]: [0, .4) x (a, ap), [.4, .7) x (b, ap), [.7, 1) x (b, bp).
  const Complex total = 0.4 * exponent(ap, a) + 0.3 * exponent(ap, b) +
                        0.3 * exponent(bp, b);
  const CMatrix got = sim::slice_cocycle(f0, gp, g, 0.0, 1.0);
  const CMatrix want = std::exp(total) * CMatrix::Identity(2, 2);
  CHECK(rel_err(got, want) < 1e-13);

  // Unit vacuum slice for zero test functions.
  const StepFunction vac = StepFunction::constant(CVector::Zero(1));
  CHECK(rel_err(sim::slice_cocycle(f0, vac, vac, 0.0, 1.0),
                CMatrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("slice of a pure drift generator is the dressed exponential") {
  testsupport::Rng rng(203);
  BlockGenerator f = BlockGenerator::zero(2, 1);
  f.K = rng.cmatrix(2, 2);
  const CVector c = cv1(Complex(0.8, -0.1));
  const CVector cp = cv1(Complex(-0.2, 0.3));
  const double r = 0.25, t = 1.5;
  const CMatrix got = sim::slice_cocycle(
      f, StepFunction::constant(cp), StepFunction::constant(c), r, t);
  const Complex overlap = (cp.adjoint() * c)(0, 0) -
                          Complex(0.5 * (c.squaredNorm() + cp.squaredNorm()),
                                  0.0);
  const CMatrix want =
      std::exp((t - r) * overlap) * numkit::mat_exp((t - r) * f.K);
  CHECK(rel_err(got, want) < 1e-12);
}

TEST_CASE("slices compose multiplicatively in time") {
  testsupport::Rng rng(204);
  for (int trial = 0; trial < 6; ++trial) {
    const auto f = ito::sample_quasicontractive(2, 2, 0.4, 6000 + trial);
    const StepFunction g =
        two_step(rng.cvector(2), rng.cvector(2), 0.45);
    const StepFunction gp =
        two_step(rng.cvector(2), rng.cvector(2), 0.8);
    const double r = 0.1, s = 0.6, t = 1.3;
    const CMatrix whole = sim::slice_cocycle(f, gp, g, r, t);
    const CMatrix split = sim::slice_cocycle(f, gp, g, r, s) *
                          sim::slice_cocycle(f, gp, g, s, t);
    CHECK(rel_err(whole, split) < 1e-12);
    CHECK(rel_err(sim::slice_cocycle(f, gp, g, r, r),
                  CMatrix::Identity(2, 2)) == 0.0);
  }
}

TEST_CASE("slices of quasicontractive cocycles obey the growth bound") {
  testsupport::Rng rng(205);
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = -0.5 + 1.5 * rng.uniform();
    const auto f = ito::sample_quasicontractive(2, 1, beta, 7000 + trial);
    const CVector c = rng.cvector(1);
    const StepFunction g = StepFunction::constant(c);
    const double t = 0.3 + rng.uniform();
    // Equal test functions on both sides: the slice is a compression of the
    // dressed cocycle, so its norm stays under exp(beta t).
    const double nrm = numkit::op_norm(sim::slice_cocycle(f, g, g, 0.0, t));
    CHECK(nrm <= std::exp(beta * t) * (1.0 + 1e-9));
  }
}

TEST_CASE("limit slice is the slice of the ordered series product") {
  testsupport::Rng rng(206);
  const auto f1 = ito::sample_quasicontractive(2, 1, 0.3, 8001);
  const auto f2 = ito::sample_quasicontractive(2, 1, -0.2, 8002);
  const auto f3 = ito::sample_quasicontractive(2, 1, 0.1, 8003);
  const StepFunction g = two_step(rng.cvector(1), rng.cvector(1), 0.5);
  const StepFunction gp = StepFunction::constant(rng.cvector(1));
  const CMatrix got = sim::trotter_limit_slice({f1, f2, f3}, gp, g, 0.0, 1.0);
  const CMatrix want = sim::slice_cocycle(
      ito::series(ito::series(f1, f2), f3), gp, g, 0.0, 1.0);
  CHECK(rel_err(got, want) < 1e-13);

  BlockGenerator bad = BlockGenerator::zero(2, 1);
  bad.C *= 2.0;
  CHECK_THROWS_AS(sim::trotter_limit_slice({f1, bad}, gp, g, 0.0, 1.0),
                  std::domain_error);
}

TEST_CASE("dressed constants reduce to the plain constant at zero dressing") {
  const auto f1 = ito::sample_quasicontractive(2, 1, 0.5, 9001);
  const auto f2 = ito::sample_quasicontractive(2, 1, 0.5, 9002);
  const StepFunction vac = StepFunction::constant(CVector::Zero(1));
  const double plain = ito::trotter_constant(f1, f2);
  const double dressed =
      sim::trotter_constant_dressed(f1, f2, vac, vac, 0.0, 1.0);
  CHECK(std::abs(plain - dressed) < 1e-13 * (1.0 + plain));
}

TEST_CASE("dressed constants maximize over the attained cells") {
  testsupport::Rng rng(207);
  const auto f1 = ito::sample_quasicontractive(1, 1, 0.2, 9100);
  const auto f2 = ito::sample_quasicontractive(1, 1, 0.2, 9101);
  const CVector a = rng.cvector(1), b = rng.cvector(1);
  const CVector ap = rng.cvector(1);
  const StepFunction g = two_step(a, b, 0.5);
  const StepFunction gp = StepFunction::constant(ap);

  auto cell_value = [&](const CVector& cp, const CVector& c) {
    const auto left =
        ito::series(ito::adjoint(sim::weyl_generator(cp, 1)), f1);
    const auto right = ito::series(f2, sim::weyl_generator(c, 1));
    return ito::trotter_constant(left, right);
  };
  const double want = std::max(cell_value(ap, a), cell_value(ap, b));
  const double got = sim::trotter_constant_dressed(f1, f2, gp, g, 0.0, 1.0);
  CHECK(std::abs(got - want) < 1e-13 * (1.0 + want));

  // A window inside the second cell only sees the second value.
  const double tail = sim::trotter_constant_dressed(f1, f2, gp, g, 0.6, 1.0);
  CHECK(std::abs(tail - cell_value(ap, b)) < 1e-13 * (1.0 + tail));
}

TEST_CASE("error bounds follow their closed expressions") {
  const auto f1 = ito::sample_quasicontractive(2, 1, 0.4, 9200);
  const auto f2 = ito::sample_quasicontractive(2, 1, -0.1, 9201);
  const double b1 = *ito::growth_bound(f1);
  const double b2 = *ito::growth_bound(f2);
  const double cc = ito::trotter_constant(f1, f2);
  const double t = 0.7;
  CHECK(std::abs(sim::expectation_error_bound(f1, f2, t) -
                 t * t * std::exp(t * (b1 + b2)) * cc * cc) < 1e-12);

  const StepFunction vac = StepFunction::constant(CVector::Zero(1));
  const std::vector<double> part{0.0, 0.25, 0.5, 0.75, 1.0};
  const double bound = sim::mesh_error_bound(f1, f2, vac, vac, 0.0, 1.0, part);
  const double ccd = sim::trotter_constant_dressed(f1, f2, vac, vac, 0.0, 1.0);
  CHECK(std::abs(bound - 0.25 * std::exp(b1 + b2) * ccd * ccd) < 1e-12);

  // Finer partitions tighten the bound linearly.
  const std::vector<double> fine{0.0, 0.125, 0.25, 0.375, 0.5,
                                 0.625, 0.75, 0.875, 1.0};
  CHECK(sim::mesh_error_bound(f1, f2, vac, vac, 0.0, 1.0, fine) <
        bound * 0.51);

  // The mesh is measured with 0 prepended, so a window away from the origin
  // picks up the initial gap.
  const std::vector<double> off{0.5, 0.75, 1.0};
  const double offb = sim::mesh_error_bound(f1, f2, vac, vac, 0.5, 1.0, off);
  CHECK(std::abs(offb - 0.5 * 0.5 * std::exp(0.5 * (b1 + b2)) * ccd * ccd) <
        1e-12);

  BlockGenerator bad = BlockGenerator::zero(2, 1);
  bad.C *= 3.0;
  CHECK_THROWS_AS(sim::expectation_error_bound(f1, bad, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(
      sim::mesh_error_bound(f1, f2, vac, vac, 0.0, 1.0, {}),
      std::invalid_argument);
}
