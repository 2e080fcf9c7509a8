#include "qstrotter/qform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qst::form {

namespace {

using numkit::hermitian_part;
using numkit::kSingularThreshold;
using numkit::op_norm;

CMatrix ident(Eigen::Index n) { return CMatrix::Identity(n, n); }

void require_same_space(const QuadForm& a, const QuadForm& b, const char* who) {
  if (a.dim_h != b.dim_h || a.dim_k != b.dim_k)
    throw std::invalid_argument(std::string(who) +
                                ": forms live on different spaces");
}

void check_block(const CMatrix& m, Eigen::Index rows, Eigen::Index cols,
                 const char* name) {
  if (m.rows() != rows || m.cols() != cols)
    throw std::invalid_argument(std::string("QuadForm: block ") + name +
                                " has wrong shape");
  if (m.size() > 0 && !m.allFinite())
    throw std::invalid_argument(std::string("QuadForm: block ") + name +
                                " has non-finite entries");
}

// Orthonormal basis of D_a intersect D_b. Any proper subspace contributes a
// singular value 1 to its complementary projector, so a stacked norm at
// roundoff level means both domains are full and the kernel cut (which is
// relative to the largest singular value) must not be applied to noise.
CMatrix domain_intersection(const CMatrix& fa, const CMatrix& fb) {
  const Eigen::Index n = fa.rows();
  CMatrix stacked(2 * n, n);
  stacked.topRows(n) = ident(n) - fa * fa.adjoint();
  stacked.bottomRows(n) = ident(n) - fb * fb.adjoint();
  if (op_norm(stacked) <= 1e-8) return ident(n);
  return numkit::kernel_basis(stacked);
}

// Frame coordinates of u, checking that u actually lies in the domain.
CVector domain_coords(const QuadForm& g, const CVector& u, const char* who) {
  if (u.size() != g.dim_h)
    throw std::invalid_argument(std::string(who) + ": u has wrong size");
  const CVector x = g.domain_frame.adjoint() * u;
  const double off = (u - g.domain_frame * x).norm();
  if (off > Tolerance{}.scaled(1.0 + u.norm()))
    throw std::domain_error(std::string(who) + ": u leaves the domain");
  return x;
}

void check_zeta(const QuadForm& g, const CVector& zeta, const char* who) {
  if (zeta.size() != g.noise_dim())
    throw std::invalid_argument(std::string(who) + ": zeta has wrong size");
}

// Noise part of (I + shift) xi, namely L x + C zeta.
CVector shifted_noise(const QuadForm& g, const FormVector& xi,
                      const char* who) {
  const CVector x = domain_coords(g, xi.u, who);
  check_zeta(g, xi.zeta, who);
  return g.L * x + g.C * xi.zeta;
}

}  // namespace

void QuadForm::validate() const {
  if (dim_h < 1 || dim_k < 0)
    throw std::invalid_argument("QuadForm: bad dimensions");
  const Eigen::Index n = noise_dim();
  const Eigen::Index m = domain_frame.cols();
  if (domain_frame.rows() != dim_h || m > dim_h)
    throw std::invalid_argument("QuadForm: domain frame has wrong shape");
  if (m > 0 && !domain_frame.allFinite())
    throw std::invalid_argument("QuadForm: domain frame has non-finite entries");
  check_block(gamma, m, m, "gamma");
  check_block(L, n, m, "L");
  check_block(Ltilde, n, m, "Ltilde");
  check_block(C, n, n, "C");
  if (m > 0 &&
      op_norm(domain_frame.adjoint() * domain_frame - ident(m)) > 1e-8)
    throw std::invalid_argument("QuadForm: domain frame is not orthonormal");
}

QuadForm qf_identity(int dim_h, int dim_k) {
  if (dim_h < 1 || dim_k < 0)
    throw std::invalid_argument("qf_identity: bad dimensions");
  QuadForm g;
  g.dim_h = dim_h;
  g.dim_k = dim_k;
  const Eigen::Index n = g.noise_dim();
  g.domain_frame = ident(dim_h);
  g.gamma = CMatrix::Zero(dim_h, dim_h);
  g.L = CMatrix::Zero(n, dim_h);
  g.Ltilde = CMatrix::Zero(n, dim_h);
  g.C = ident(n);
  return g;
}

QuadForm bounded_to_form(const ito::BlockGenerator& f) {
  f.validate();
  QuadForm g;
  g.dim_h = f.dim_h;
  g.dim_k = f.dim_k;
  g.domain_frame = ident(f.dim_h);
  g.gamma = -f.K;
  g.L = f.L;
  g.Ltilde = f.M.adjoint();
  g.C = f.C;
  return g;
}

Complex qf_eval(const QuadForm& g, const FormVector& xi) {
  return qf_eval(g, xi, xi);
}

Complex qf_eval(const QuadForm& g, const FormVector& xi,
                const FormVector& eta) {
  const CVector x = domain_coords(g, xi.u, "qf_eval");
  const CVector y = domain_coords(g, eta.u, "qf_eval");
  check_zeta(g, xi.zeta, "qf_eval");
  check_zeta(g, eta.zeta, "qf_eval");
  const Eigen::Index n = g.noise_dim();
  const Complex drift = (x.adjoint() * g.gamma * y).value();
  const Complex rest = (xi.zeta.adjoint() * (g.L * y)).value() +
                       ((g.Ltilde * x).adjoint() * eta.zeta).value() +
                       (xi.zeta.adjoint() * ((g.C - ident(n)) * eta.zeta)).value();
  return drift - rest;
}

QuadForm qf_adjoint(const QuadForm& g) {
  QuadForm out = g;
  out.gamma = g.gamma.adjoint();
  out.L = g.Ltilde;
  out.Ltilde = g.L;
  out.C = g.C.adjoint();
  return out;
}

QuadForm qf_delta(const QuadForm& a, const QuadForm& b) {
  require_same_space(a, b, "qf_delta");
  const Eigen::Index n = a.noise_dim();
  QuadForm out;
  out.dim_h = a.dim_h;
  out.dim_k = a.dim_k;
  out.domain_frame = domain_intersection(a.domain_frame, b.domain_frame);
  const CMatrix lt1 = a.Ltilde * (a.domain_frame.adjoint() * out.domain_frame);
  const CMatrix l2 = b.L * (b.domain_frame.adjoint() * out.domain_frame);
  out.gamma = -lt1.adjoint() * l2;
  out.L = (a.C - ident(n)) * l2;
  out.Ltilde = (b.C - ident(n)).adjoint() * lt1;
  out.C = (a.C - ident(n)) * (b.C - ident(n)) + ident(n);
  return out;
}

QuadForm qf_series(const QuadForm& a, const QuadForm& b) {
  require_same_space(a, b, "qf_series");
  QuadForm out;
  out.dim_h = a.dim_h;
  out.dim_k = a.dim_k;
  out.domain_frame = domain_intersection(a.domain_frame, b.domain_frame);
  const CMatrix ra = a.domain_frame.adjoint() * out.domain_frame;
  const CMatrix rb = b.domain_frame.adjoint() * out.domain_frame;
  const CMatrix lt1 = a.Ltilde * ra;
  const CMatrix l2 = b.L * rb;
  out.gamma = ra.adjoint() * a.gamma * ra + rb.adjoint() * b.gamma * rb -
              lt1.adjoint() * l2;
  out.L = a.L * ra + a.C * l2;
  out.Ltilde = b.C.adjoint() * lt1 + b.Ltilde * rb;
  out.C = a.C * b.C;
  return out;
}

QuadForm qf_linear_combine(Complex a, const QuadForm& ga, Complex b,
                           const QuadForm& gb) {
  require_same_space(ga, gb, "qf_linear_combine");
  const Eigen::Index n = ga.noise_dim();
  QuadForm out;
  out.dim_h = ga.dim_h;
  out.dim_k = ga.dim_k;
  out.domain_frame = domain_intersection(ga.domain_frame, gb.domain_frame);
  const CMatrix ra = ga.domain_frame.adjoint() * out.domain_frame;
  const CMatrix rb = gb.domain_frame.adjoint() * out.domain_frame;
  out.gamma = a * (ra.adjoint() * ga.gamma * ra) +
              b * (rb.adjoint() * gb.gamma * rb);
  out.L = a * (ga.L * ra) + b * (gb.L * rb);
  out.Ltilde =
      std::conj(a) * (ga.Ltilde * ra) + std::conj(b) * (gb.Ltilde * rb);
  out.C = a * (ga.C - ident(n)) + b * (gb.C - ident(n)) + ident(n);
  return out;
}

QuadForm qf_inverse(const QuadForm& g) {
  const Eigen::Index n = g.noise_dim();
  if (n > 0) {
    Eigen::JacobiSVD<CMatrix> svd(g.C);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= kSingularThreshold * s(0))
      throw std::domain_error("qf_inverse: C is singular");
  }
  const CMatrix cinv = (n > 0) ? CMatrix(g.C.inverse()) : CMatrix(0, 0);
  QuadForm out;
  out.dim_h = g.dim_h;
  out.dim_k = g.dim_k;
  out.domain_frame = g.domain_frame;
  out.gamma = -g.gamma - g.Ltilde.adjoint() * (cinv * g.L);
  out.L = -cinv * g.L;
  out.Ltilde = -cinv.adjoint() * g.Ltilde;
  out.C = cinv;
  return out;
}

CMatrix form_matrix(const QuadForm& g) {
  const Eigen::Index m = g.domain_dim();
  const Eigen::Index n = g.noise_dim();
  CMatrix out(m + n, m + n);
  out.topLeftCorner(m, m) = g.gamma;
  out.topRightCorner(m, n) = -g.Ltilde.adjoint();
  out.bottomLeftCorner(n, m) = -g.L;
  out.bottomRightCorner(n, n) = -(g.C - ident(n));
  return out;
}

CMatrix form_matrix_on(const QuadForm& g, const CMatrix& frame) {
  if (frame.rows() != g.dim_h)
    throw std::invalid_argument("form_matrix_on: frame has wrong row count");
  const CMatrix r = g.domain_frame.adjoint() * frame;
  if (op_norm(g.domain_frame * r - frame) > 1e-8 * (1.0 + op_norm(frame)))
    throw std::domain_error("form_matrix_on: frame leaves the domain");
  const Eigen::Index m = frame.cols();
  const Eigen::Index n = g.noise_dim();
  const CMatrix lr = g.L * r;
  const CMatrix ltr = g.Ltilde * r;
  CMatrix out(m + n, m + n);
  out.topLeftCorner(m, m) = r.adjoint() * g.gamma * r;
  out.topRightCorner(m, n) = -ltr.adjoint();
  out.bottomLeftCorner(n, m) = -lr;
  out.bottomRightCorner(n, n) = -(g.C - ident(n));
  return out;
}

CMatrix shift_matrix_on(const QuadForm& g, const CMatrix& frame) {
  if (frame.rows() != g.dim_h)
    throw std::invalid_argument("shift_matrix_on: frame has wrong row count");
  const CMatrix r = g.domain_frame.adjoint() * frame;
  if (op_norm(g.domain_frame * r - frame) > 1e-8 * (1.0 + op_norm(frame)))
    throw std::domain_error("shift_matrix_on: frame leaves the domain");
  const Eigen::Index m = frame.cols();
  const Eigen::Index n = g.noise_dim();
  CMatrix out = CMatrix::Zero(m + n, m + n);
  out.topLeftCorner(m, m) = ident(m);
  out.bottomLeftCorner(n, m) = g.L * r;
  out.bottomRightCorner(n, n) = g.C;
  return out;
}

double qf_triple_identity_residual(const QuadForm& a, const QuadForm& b,
                                   const QuadForm& c, const FormVector& xi) {
  require_same_space(a, b, "qf_triple_identity_residual");
  require_same_space(a, c, "qf_triple_identity_residual");
  const Complex lhs = qf_eval(qf_series(qf_series(a, b), c), xi);
  const Complex outer = qf_eval(qf_series(a, c), xi);
  // Arguments (I + shift_{a*}) xi and (I + shift_c) xi for the middle form.
  const FormVector left{xi.u, shifted_noise(qf_adjoint(a), xi,
                                            "qf_triple_identity_residual")};
  const FormVector right{
      xi.u, shifted_noise(c, xi, "qf_triple_identity_residual")};
  const Complex middle = qf_eval(b, left, right);
  return std::abs(lhs - outer - middle);
}

double qf_defect_exchange_residual(const QuadForm& g, const FormVector& xi) {
  const QuadForm gsg = qf_series(qf_adjoint(g), g);
  const Complex lhs = qf_eval(gsg, xi);
  const FormVector shifted{xi.u,
                           shifted_noise(g, xi, "qf_defect_exchange_residual")};
  const Complex flipped = qf_eval(qf_series(g, qf_adjoint(g)), shifted);
  const CVector x =
      domain_coords(gsg, xi.u, "qf_defect_exchange_residual");
  const CVector defect_noise =
      gsg.L * x + (gsg.C - ident(g.noise_dim())) * xi.zeta;
  return std::abs(lhs - flipped - defect_noise.squaredNorm());
}

bool qf_defect_check(const QuadForm& g, double beta, const Tolerance& tol) {
  const QuadForm gsg = qf_series(qf_adjoint(g), g);
  CMatrix m = form_matrix(gsg);
  if (m.rows() == 0) return true;
  const Eigen::Index md = gsg.domain_dim();
  m.topLeftCorner(md, md) -= 2.0 * beta * ident(md);
  const double scale = 1.0 + op_norm(m) + std::abs(beta);
  return numkit::lambda_min(hermitian_part(m)) >= -tol.scaled(scale);
}

bool qf_drift_accretive(const QuadForm& g, double beta, const Tolerance& tol) {
  if (g.domain_dim() == 0) return true;
  const CMatrix re = hermitian_part(g.gamma);
  const double scale = 1.0 + op_norm(re) + std::abs(beta);
  return numkit::lambda_min(re) + beta >= -tol.scaled(scale);
}

bool qf_drift_semisectorial(const QuadForm& g, double alpha,
                            const Tolerance& tol) {
  const Eigen::Index m = g.domain_dim();
  if (m == 0) return true;
  const CMatrix re = hermitian_part(g.gamma);
  const CMatrix im = (g.gamma - g.gamma.adjoint()) / Complex(0.0, 2.0);
  const CMatrix bound = alpha * (re + ident(m));
  const double scale = 1.0 + op_norm(bound) + op_norm(im);
  const double tolerance = tol.scaled(scale);
  return numkit::lambda_min(hermitian_part(bound - im)) >= -tolerance &&
         numkit::lambda_min(hermitian_part(bound + im)) >= -tolerance;
}

}  // namespace qst::form
