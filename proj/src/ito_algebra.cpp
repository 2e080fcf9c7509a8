#include "qstrotter/ito_algebra.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qst::ito {

namespace {

using numkit::hermitian_part;
using numkit::kron;
using numkit::op_norm;

const Complex kI(0.0, 1.0);

CMatrix ident(Eigen::Index n) { return CMatrix::Identity(n, n); }

void require_same_shape(const BlockGenerator& f1, const BlockGenerator& f2,
                        const char* who) {
  if (f1.dim_h != f2.dim_h || f1.dim_k != f2.dim_k)
    throw std::invalid_argument(std::string(who) +
                                ": generators live on different spaces");
}

void check_block(const CMatrix& m, Eigen::Index rows, Eigen::Index cols,
                 const char* name) {
  if (m.rows() != rows || m.cols() != cols)
    throw std::invalid_argument(std::string("BlockGenerator: block ") + name +
                                " has wrong shape");
  if (m.size() > 0 && !m.allFinite())
    throw std::invalid_argument(std::string("BlockGenerator: block ") + name +
                                " has non-finite entries");
}

// Columns j of the returned (dim_k*dim_h*dim_h) x dim_k matrix hold
// vec((C - I) E_{e_j}); its kernel is the Gaussian noise subspace of k.
CMatrix gauss_space_map(const BlockGenerator& f) {
  const Eigen::Index n = f.noise_dim();
  const CMatrix cmi = f.C - ident(n);
  CMatrix out(n * f.dim_h, f.dim_k);
  for (int j = 0; j < f.dim_k; ++j) {
    CMatrix col = cmi.middleCols(static_cast<Eigen::Index>(j) * f.dim_h,
                                 f.dim_h);  // (C - I) E_{e_j}
    out.col(j) = Eigen::Map<const CVector>(col.data(), col.size());
  }
  return out;
}

}  // namespace

BlockGenerator BlockGenerator::zero(int dim_h, int dim_k) {
  if (dim_h < 1 || dim_k < 0)
    throw std::invalid_argument("BlockGenerator::zero: bad dimensions");
  BlockGenerator f;
  f.dim_h = dim_h;
  f.dim_k = dim_k;
  const Eigen::Index n = f.noise_dim();
  f.K = CMatrix::Zero(dim_h, dim_h);
  f.M = CMatrix::Zero(dim_h, n);
  f.L = CMatrix::Zero(n, dim_h);
  f.C = CMatrix::Identity(n, n);
  return f;
}

void BlockGenerator::validate() const {
  if (dim_h < 1 || dim_k < 0)
    throw std::invalid_argument("BlockGenerator: bad dimensions");
  const Eigen::Index n = noise_dim();
  check_block(K, dim_h, dim_h, "K");
  check_block(M, dim_h, n, "M");
  check_block(L, n, dim_h, "L");
  check_block(C, n, n, "C");
}

CMatrix BlockGenerator::as_matrix() const {
  validate();
  const Eigen::Index n = noise_dim();
  CMatrix m(total_dim(), total_dim());
  m.topLeftCorner(dim_h, dim_h) = K;
  m.topRightCorner(dim_h, n) = M;
  m.bottomLeftCorner(n, dim_h) = L;
  m.bottomRightCorner(n, n) = C - ident(n);
  return m;
}

BlockGenerator BlockGenerator::from_matrix(const CMatrix& m, int dim_h,
                                           int dim_k) {
  if (dim_h < 1 || dim_k < 0)
    throw std::invalid_argument("BlockGenerator::from_matrix: bad dimensions");
  const Eigen::Index n = static_cast<Eigen::Index>(dim_k) * dim_h;
  if (m.rows() != dim_h + n || m.cols() != dim_h + n)
    throw std::invalid_argument("BlockGenerator::from_matrix: size mismatch");
  BlockGenerator f;
  f.dim_h = dim_h;
  f.dim_k = dim_k;
  f.K = m.topLeftCorner(dim_h, dim_h);
  f.M = m.topRightCorner(dim_h, n);
  f.L = m.bottomLeftCorner(n, dim_h);
  f.C = m.bottomRightCorner(n, n) + ident(n);
  f.validate();
  return f;
}

CMatrix noise_injection(const CVector& c, int dim_h) {
  return kron(c, ident(dim_h));
}

BlockGenerator series(const BlockGenerator& f1, const BlockGenerator& f2) {
  f1.validate();
  f2.validate();
  require_same_shape(f1, f2, "series");
  BlockGenerator g;
  g.dim_h = f1.dim_h;
  g.dim_k = f1.dim_k;
  g.K = f1.K + f2.K + f1.M * f2.L;
  g.M = f1.M * f2.C + f2.M;
  g.L = f1.L + f1.C * f2.L;
  g.C = f1.C * f2.C;
  return g;
}

BlockGenerator adjoint(const BlockGenerator& f) {
  f.validate();
  BlockGenerator g;
  g.dim_h = f.dim_h;
  g.dim_k = f.dim_k;
  g.K = f.K.adjoint();
  g.M = f.L.adjoint();
  g.L = f.M.adjoint();
  g.C = f.C.adjoint();
  return g;
}

CMatrix ito_defect(const BlockGenerator& f) {
  f.validate();
  const Eigen::Index n = f.noise_dim();
  CMatrix d(f.total_dim(), f.total_dim());
  d.topLeftCorner(f.dim_h, f.dim_h) =
      f.K.adjoint() + f.K + f.L.adjoint() * f.L;
  d.topRightCorner(f.dim_h, n) = f.L.adjoint() * f.C + f.M;
  d.bottomLeftCorner(n, f.dim_h) = d.topRightCorner(f.dim_h, n).adjoint();
  d.bottomRightCorner(n, n) = f.C.adjoint() * f.C - ident(n);
  return d;
}

CMatrix co_defect(const BlockGenerator& f) { return ito_defect(adjoint(f)); }

std::optional<double> growth_bound(const BlockGenerator& f,
                                   const Tolerance& tol) {
  f.validate();
  const Eigen::Index n = f.noise_dim();
  const double scale = 1.0 + f.norm();
  const double slack = tol.scaled(scale);
  if (op_norm(f.C) > 1.0 + slack) return std::nullopt;
  const CMatrix w = hermitian_part(ident(n) - f.C.adjoint() * f.C);
  const CMatrix b = f.M + f.L.adjoint() * f.C;
  const CMatrix p = numkit::range_projector(w);
  if (op_norm(b * (ident(n) - p)) > slack) return std::nullopt;
  const CMatrix core = hermitian_part(
      f.K + f.K.adjoint() + f.L.adjoint() * f.L +
      b * numkit::pseudo_inverse(w) * b.adjoint());
  return 0.5 * numkit::lambda_max(core);
}

std::optional<double> growth_bound_bisection(const BlockGenerator& f,
                                             const Tolerance& tol) {
  f.validate();
  const CMatrix defect = hermitian_part(ito_defect(f));
  const double scale = 1.0 + op_norm(defect);
  const double eps0 = std::max(1e-12 * scale, tol.abs_floor);
  // Past this point a "feasible" shift only exploits the eps0 slack, so the
  // generator is treated as having no finite growth bound.
  const double runaway = 1e8 * scale;
  auto feasible = [&](double beta) {
    CMatrix shifted = defect;
    shifted.topLeftCorner(f.dim_h, f.dim_h) -=
        2.0 * beta * ident(f.dim_h);
    return numkit::lambda_max(shifted) <= eps0;
  };
  const CMatrix corner =
      hermitian_part(f.K + f.K.adjoint() + f.L.adjoint() * f.L);
  double lo = 0.5 * numkit::lambda_min(corner) - 1.0;  // always infeasible
  double hi = 0.5 * numkit::lambda_max(corner) + 1.0;
  while (!feasible(hi)) {
    hi = 2.0 * std::abs(hi) + 1.0;
    if (hi > runaway) return std::nullopt;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

GeneratorClassReport classify(const BlockGenerator& f, const Tolerance& tol) {
  f.validate();
  GeneratorClassReport r;
  const Eigen::Index n = f.noise_dim();
  const double t = tol.scaled(1.0 + f.norm());
  const CMatrix defect = ito_defect(f);
  r.defect_spectrum = numkit::hermitian_spectrum(defect);
  r.beta0 = growth_bound(f, tol);
  // The reported bound gets the same tolerance as the predicates, so a
  // contractive-within-tolerance generator reports exactly zero.
  if (r.beta0 && std::abs(*r.beta0) <= t) r.beta0 = 0.0;
  r.is_quasicontractive = r.beta0.has_value();
  r.is_contractive =
      numkit::loewner_leq(defect, CMatrix::Zero(defect.rows(), defect.cols()),
                          tol);
  r.is_isometric = op_norm(defect) <= t;
  r.is_coisometric = op_norm(co_defect(f)) <= t;
  r.is_unitary = r.is_isometric && r.is_coisometric;
  const CMatrix cmi = f.C - ident(n);
  r.is_gaussian = op_norm(cmi) <= t;
  r.is_pure_gaussian =
      r.is_gaussian &&
      op_norm(f.K + 0.5 * f.L.adjoint() * f.L) <= t &&
      op_norm(f.M + f.L.adjoint()) <= t;
  r.is_wholly_non_gaussian =
      numkit::kernel_basis(gauss_space_map(f)).cols() == 0;
  r.is_pure_preservation =
      op_norm(f.K) <= t && op_norm(f.M) <= t && op_norm(f.L) <= t;
  r.is_pure_drift = op_norm(f.M) <= t && op_norm(f.L) <= t && op_norm(cmi) <= t;
  return r;
}

double defect_exchange_residual(const BlockGenerator& f) {
  f.validate();
  const Eigen::Index d = f.total_dim();
  CMatrix delta = CMatrix::Zero(d, d);
  delta.bottomRightCorner(f.noise_dim(), f.noise_dim()) =
      ident(f.noise_dim());
  const CMatrix fm = f.as_matrix();
  const CMatrix defect = ito_defect(f);
  const CMatrix codefect = co_defect(f);
  const CMatrix dressed = delta * fm + ident(d);
  const CMatrix lhs = dressed.adjoint() * codefect * dressed;
  const CMatrix rhs = defect + defect * delta * defect;
  return op_norm(lhs - rhs);
}

SeriesDecomposition left_series_decomposition(const BlockGenerator& f,
                                              const Tolerance& tol) {
  const auto beta = growth_bound(f, tol);
  if (!beta)
    throw std::domain_error(
        "left_series_decomposition: generator has no finite growth bound");
  const Eigen::Index n = f.noise_dim();
  const CMatrix im_k = (f.K - f.K.adjoint()) / Complex(0.0, 2.0);
  const CMatrix re_k = hermitian_part(f.K);

  SeriesDecomposition d;
  d.first = BlockGenerator::zero(f.dim_h, f.dim_k);
  d.first.K = *beta * ident(f.dim_h) + kI * im_k;

  d.second = BlockGenerator::zero(f.dim_h, f.dim_k);
  d.second.K = -0.5 * f.L.adjoint() * f.L;
  d.second.M = -f.L.adjoint();
  d.second.L = f.L;

  d.third = BlockGenerator::zero(f.dim_h, f.dim_k);
  d.third.K = re_k + 0.5 * f.L.adjoint() * f.L - *beta * ident(f.dim_h);
  d.third.M = f.M + f.L.adjoint() * f.C;
  d.third.L = CMatrix::Zero(n, f.dim_h);
  d.third.C = f.C;
  return d;
}

SeriesDecomposition right_series_decomposition(const BlockGenerator& f,
                                               const Tolerance& tol) {
  const auto beta = growth_bound(f, tol);
  if (!beta)
    throw std::domain_error(
        "right_series_decomposition: generator has no finite growth bound");
  const Eigen::Index n = f.noise_dim();
  const CMatrix im_k = (f.K - f.K.adjoint()) / Complex(0.0, 2.0);
  const CMatrix re_k = hermitian_part(f.K);

  SeriesDecomposition d;
  d.first = BlockGenerator::zero(f.dim_h, f.dim_k);
  d.first.K = *beta * ident(f.dim_h) + kI * im_k;

  d.second = BlockGenerator::zero(f.dim_h, f.dim_k);
  d.second.K =
      re_k + 0.5 * f.M * f.M.adjoint() - *beta * ident(f.dim_h);
  d.second.M = CMatrix::Zero(f.dim_h, n);
  d.second.L = f.L + f.C * f.M.adjoint();
  d.second.C = f.C;

  d.third = BlockGenerator::zero(f.dim_h, f.dim_k);
  d.third.K = -0.5 * f.M * f.M.adjoint();
  d.third.M = f.M;
  d.third.L = -f.M.adjoint();
  return d;
}

BlockGenerator concat(const BlockGenerator& f1, const BlockGenerator& f2) {
  f1.validate();
  f2.validate();
  if (f1.dim_h != f2.dim_h)
    throw std::invalid_argument("concat: initial spaces differ");
  BlockGenerator g;
  g.dim_h = f1.dim_h;
  g.dim_k = f1.dim_k + f2.dim_k;
  const Eigen::Index n1 = f1.noise_dim(), n2 = f2.noise_dim();
  g.K = f1.K + f2.K;
  g.M = CMatrix(f1.dim_h, n1 + n2);
  g.M.leftCols(n1) = f1.M;
  g.M.rightCols(n2) = f2.M;
  g.L = CMatrix(n1 + n2, f1.dim_h);
  g.L.topRows(n1) = f1.L;
  g.L.bottomRows(n2) = f2.L;
  g.C = CMatrix::Zero(n1 + n2, n1 + n2);
  g.C.topLeftCorner(n1, n1) = f1.C;
  g.C.bottomRightCorner(n2, n2) = f2.C;
  return g;
}

BlockGenerator embed_left(const BlockGenerator& f, int extra_dim_k) {
  return concat(f, BlockGenerator::zero(f.dim_h, extra_dim_k));
}

BlockGenerator embed_right(const BlockGenerator& f, int extra_dim_k) {
  return concat(BlockGenerator::zero(f.dim_h, extra_dim_k), f);
}

BlockGenerator compress_noise(const BlockGenerator& f, const CMatrix& frame) {
  f.validate();
  if (frame.rows() != f.dim_k)
    throw std::invalid_argument("compress_noise: frame has wrong height");
  const Eigen::Index p = frame.cols();
  if (op_norm(frame.adjoint() * frame - ident(p)) > 1e-8)
    throw std::invalid_argument("compress_noise: frame is not orthonormal");
  const CMatrix j = kron(frame, ident(f.dim_h));
  BlockGenerator g;
  g.dim_h = f.dim_h;
  g.dim_k = static_cast<int>(p);
  g.K = f.K;
  g.M = f.M * j;
  g.L = j.adjoint() * f.L;
  g.C = j.adjoint() * f.C * j;
  return g;
}

GaussianSplit gaussian_split(const BlockGenerator& f, const Tolerance& tol) {
  if (!growth_bound(f, tol))
    throw std::domain_error(
        "gaussian_split: generator has no finite growth bound");
  GaussianSplit s;
  s.basis_gauss = numkit::kernel_basis(gauss_space_map(f));
  s.basis_pres = numkit::kernel_basis(CMatrix(s.basis_gauss.adjoint()));

  const CMatrix jg = kron(s.basis_gauss, ident(f.dim_h));
  const CMatrix lg = jg.adjoint() * f.L;

  s.non_gaussian_part = compress_noise(f, s.basis_pres);
  s.non_gaussian_part.K = f.K + 0.5 * lg.adjoint() * lg;

  s.gaussian_part.dim_h = f.dim_h;
  s.gaussian_part.dim_k = static_cast<int>(s.basis_gauss.cols());
  s.gaussian_part.K = -0.5 * lg.adjoint() * lg;
  s.gaussian_part.M = f.M * jg;
  s.gaussian_part.L = lg;
  s.gaussian_part.C = ident(lg.rows());
  return s;
}

BlockGenerator reassemble(const GaussianSplit& split) {
  const BlockGenerator cat =
      concat(split.non_gaussian_part, split.gaussian_part);
  const int dim_k = cat.dim_k;
  CMatrix u(dim_k, dim_k);
  u.leftCols(split.basis_pres.cols()) = split.basis_pres;
  u.rightCols(split.basis_gauss.cols()) = split.basis_gauss;
  const CMatrix ju = kron(u, ident(cat.dim_h));
  BlockGenerator g;
  g.dim_h = cat.dim_h;
  g.dim_k = dim_k;
  g.K = cat.K;
  g.M = cat.M * ju.adjoint();
  g.L = ju * cat.L;
  g.C = ju * cat.C * ju.adjoint();
  return g;
}

BlockGenerator dilate_to_unitary(const BlockGenerator& f,
                                 const Tolerance& tol) {
  f.validate();
  const Eigen::Index n = f.noise_dim();
  const Eigen::Index h = f.dim_h;
  const CMatrix defect = ito_defect(f);
  if (!numkit::loewner_leq(defect,
                           CMatrix::Zero(defect.rows(), defect.cols()), tol))
    throw std::domain_error("dilate_to_unitary: generator is not contractive");

  const CMatrix a = numkit::psd_sqrt(
      -hermitian_part(f.K.adjoint() + f.K + f.L.adjoint() * f.L), tol);

  // Both preservation defect roots come from one SVD of C so that they share
  // singular vectors; the exchange relation C* t = s C* then holds to
  // roundoff. Separate eigendecompositions lose half the digits on exactly
  // isometric directions, where the defect eigenvalue is pure noise.
  CMatrix s = CMatrix::Zero(n, n);
  CMatrix t = CMatrix::Zero(n, n);
  CMatrix s_pinv = CMatrix::Zero(n, n);
  if (n > 0) {
    const Eigen::JacobiSVD<CMatrix> svd(
        f.C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sig = svd.singularValues();
    const double gap_floor = 1e-13 * (1.0 + sig(0) * sig(0));
    Eigen::VectorXd root(n), root_inv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gap = 1.0 - sig(i) * sig(i);
      if (gap <= gap_floor) {
        root(i) = 0.0;
        root_inv(i) = 0.0;
      } else {
        root(i) = std::sqrt(gap);
        root_inv(i) = 1.0 / root(i);
      }
    }
    s = svd.matrixV() * root.asDiagonal() * svd.matrixV().adjoint();
    t = svd.matrixU() * root.asDiagonal() * svd.matrixU().adjoint();
    s_pinv = svd.matrixV() * root_inv.asDiagonal() * svd.matrixV().adjoint();
  }
  const CMatrix coupling = -(f.M + f.L.adjoint() * f.C);
  const CMatrix d = numkit::pseudo_inverse(a) * coupling * s_pinv;
  if (op_norm(a * d * s - coupling) > tol.scaled(1.0 + f.norm()))
    throw std::runtime_error(
        "dilate_to_unitary: coupling block is not factorizable");
  const CMatrix r =
      numkit::psd_sqrt(hermitian_part(ident(h) - d * d.adjoint()), tol);

  BlockGenerator g;
  g.dim_h = f.dim_h;
  g.dim_k = 2 * f.dim_k + 1;
  const Eigen::Index np = g.noise_dim();  // = 2n + h
  g.K = f.K;
  g.M = CMatrix(h, np);
  g.M.leftCols(n) = f.M;
  g.M.middleCols(n, n) = f.L.adjoint() * t - a * d * f.C.adjoint();
  g.M.rightCols(h) = -a * r;
  g.L = CMatrix(np, h);
  g.L.topRows(n) = f.L;
  g.L.middleRows(n, n) = d.adjoint() * a;
  g.L.bottomRows(h) = r * a;
  g.C = CMatrix::Zero(np, np);
  g.C.topLeftCorner(n, n) = f.C;
  g.C.block(0, n, n, n) = -t;
  g.C.block(n, 0, n, n) = s;
  g.C.block(n, n, n, n) = f.C.adjoint();
  g.C.bottomRightCorner(h, h) = ident(h);
  return g;
}

CMatrix phi(const BlockGenerator& f) {
  f.validate();
  const Eigen::Index n = f.noise_dim(), h = f.dim_h;
  CMatrix t = CMatrix::Zero(2 * h + n, 2 * h + n);
  t.topLeftCorner(h, h) = ident(h);
  t.block(0, h, h, n) = f.M;
  t.topRightCorner(h, h) = f.K;
  t.block(h, h, n, n) = f.C;
  t.block(h, h + n, n, h) = f.L;
  t.bottomRightCorner(h, h) = ident(h);
  return t;
}

CMatrix phi_star(const CMatrix& t, int dim_h, int dim_k) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_k) * dim_h;
  const Eigen::Index d = 2 * dim_h + n;
  if (t.rows() != d || t.cols() != d)
    throw std::invalid_argument("phi_star: size mismatch");
  CMatrix xi = CMatrix::Zero(d, d);
  xi.topRightCorner(dim_h, dim_h) = ident(dim_h);
  xi.block(dim_h, dim_h, n, n) = ident(n);
  xi.bottomLeftCorner(dim_h, dim_h) = ident(dim_h);
  return xi * t.adjoint() * xi;
}

BlockGenerator inverse(const BlockGenerator& f) {
  f.validate();
  const Eigen::Index n = f.noise_dim();
  if (n > 0) {
    const Eigen::JacobiSVD<CMatrix> svd(f.C);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= numkit::kSingularThreshold * sv(0))
      throw std::domain_error("inverse: preservation block is singular");
  }
  const CMatrix cinv = n > 0 ? f.C.partialPivLu().solve(ident(n)).eval()
                             : CMatrix(ident(0));
  BlockGenerator g;
  g.dim_h = f.dim_h;
  g.dim_k = f.dim_k;
  g.K = f.M * cinv * f.L - f.K;
  g.M = -f.M * cinv;
  g.L = -cinv * f.L;
  g.C = cinv;
  return g;
}

namespace {

// Self-contained draw stream so identical seeds give byte-identical samples.
class DrawStream {
 public:
  explicit DrawStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u));
    spare_ = radius * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return radius * std::cos(2.0 * M_PI * v);
  }

  Complex cnormal() {
    const double re = normal();
    return Complex(re, normal()) * M_SQRT1_2;
  }

  CMatrix cmatrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

CMatrix scaled_to_norm(const CMatrix& m, double target) {
  const double nrm = op_norm(m);
  if (nrm == 0.0) return m;
  return m * (target / nrm);
}

}  // namespace

BlockGenerator sample_quasicontractive(int dim_h, int dim_k, double beta,
                                       std::uint64_t seed,
                                       const SampleOptions& opts) {
  if (dim_h < 1 || dim_k < 0)
    throw std::invalid_argument("sample_quasicontractive: bad dimensions");
  DrawStream rng(seed);
  const Eigen::Index n = static_cast<Eigen::Index>(dim_k) * dim_h;

  const CMatrix hmat =
      hermitian_part(rng.cmatrix(dim_h, dim_h)) * (0.7 / std::sqrt(dim_h));

  CMatrix a = CMatrix::Zero(dim_h, dim_h);
  if (rng.uniform() >= opts.p_zero_a) {
    const CMatrix ga = rng.cmatrix(dim_h, dim_h);
    a = scaled_to_norm(CMatrix(ga * ga.adjoint()),
                       0.2 + 0.8 * rng.uniform());
  }

  const CMatrix l =
      n > 0 ? CMatrix(rng.cmatrix(n, dim_h) * (0.8 / std::sqrt(double(n))))
            : CMatrix::Zero(n, dim_h);

  CMatrix c(n, n);
  CMatrix s(n, n);
  if (n > 0) {
    if (rng.uniform() < opts.p_unitary_c) {
      const Eigen::HouseholderQR<CMatrix> qr(rng.cmatrix(n, n));
      CMatrix q = qr.householderQ();
      const CVector rdiag = qr.matrixQR().diagonal();
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex z = rdiag(i);
        q.col(i) *= std::abs(z) == 0.0 ? Complex(1.0) : z / std::abs(z);
      }
      c = q;
      s = CMatrix::Zero(n, n);  // exact: keeps the coupling residual at zero
    } else {
      c = scaled_to_norm(rng.cmatrix(n, n), 0.97 * rng.uniform());
      s = numkit::psd_sqrt(hermitian_part(ident(n) - c.adjoint() * c));
    }
  }

  const CMatrix d =
      n > 0 ? CMatrix(scaled_to_norm(rng.cmatrix(dim_h, n), rng.uniform()))
            : CMatrix::Zero(dim_h, n);

  BlockGenerator f;
  f.dim_h = dim_h;
  f.dim_k = dim_k;
  f.K = beta * ident(dim_h) + kI * hmat -
        0.5 * (l.adjoint() * l + a * a);
  f.L = l;
  f.C = n > 0 ? c : ident(0);
  f.M = -l.adjoint() * f.C - a * d * s;
  return f;
}

double trotter_constant(const BlockGenerator& f1, const BlockGenerator& f2) {
  f1.validate();
  f2.validate();
  return op_norm(f1.K) + op_norm(f2.K) + op_norm(f1.M) * op_norm(f2.L);
}

double trotter_constant_n(const std::vector<BlockGenerator>& fs) {
  if (fs.empty())
    throw std::invalid_argument("trotter_constant_n: empty list");
  // Scalar shadow of the series product on 2x2 nonnegative block norms.
  Eigen::Matrix2d acc;
  auto shadow = [](const BlockGenerator& f) {
    Eigen::Matrix2d m;
    m << op_norm(f.K), op_norm(f.M), op_norm(f.L),
        op_norm(f.C - CMatrix::Identity(f.noise_dim(), f.noise_dim()));
    return m;
  };
  acc = shadow(fs[0]);
  for (std::size_t i = 1; i < fs.size(); ++i) {
    const Eigen::Matrix2d g = shadow(fs[i]);
    Eigen::Matrix2d next;
    next(0, 0) = acc(0, 0) + g(0, 0) + acc(0, 1) * g(1, 0);
    next(0, 1) = acc(0, 1) * g(1, 1) + g(0, 1) + acc(0, 1);
    next(1, 0) = acc(1, 0) + acc(1, 1) * g(1, 0) + g(1, 0);
    next(1, 1) = acc(1, 1) * g(1, 1) + acc(1, 1) + g(1, 1);
    acc = next;
  }
  return acc(0, 0);
}

}  // namespace qst::ito
