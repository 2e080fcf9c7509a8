#include "qstrotter/numkit.hpp"

#include <cmath>
#include <stdexcept>

namespace qst::numkit {

namespace {

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string(who) + ": square matrix required");
}

void require_hermitian(const CMatrix& a, double scale, const Tolerance& tol,
                       const char* who) {
  if (anti_hermitian_norm(a) > tol.scaled(scale))
    throw std::invalid_argument(std::string(who) +
                                ": anti-Hermitian part above tolerance");
}

}  // namespace

double op_norm(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

CMatrix hermitian_part(const CMatrix& a) {
  require_square(a, "hermitian_part");
  return 0.5 * (a + a.adjoint());
}

double anti_hermitian_norm(const CMatrix& a) {
  require_square(a, "anti_hermitian_norm");
  return op_norm(0.5 * (a - a.adjoint()));
}

std::vector<double> hermitian_spectrum(const CMatrix& a) {
  require_square(a, "hermitian_spectrum");
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a),
                                            Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return std::vector<double>(v.data(), v.data() + v.size());
}

double lambda_max(const CMatrix& hermitian) {
  auto s = hermitian_spectrum(hermitian);
  if (s.empty()) throw std::invalid_argument("lambda_max: empty matrix");
  return s.back();
}

double lambda_min(const CMatrix& hermitian) {
  auto s = hermitian_spectrum(hermitian);
  if (s.empty()) throw std::invalid_argument("lambda_min: empty matrix");
  return s.front();
}

CMatrix mat_exp(const CMatrix& a) {
  require_square(a, "mat_exp");
  const Eigen::Index n = a.rows();
  if (n == 0) return CMatrix(0, 0);
  if (!a.allFinite()) throw std::invalid_argument("mat_exp: non-finite input");

  // Degree-13 Pade threshold for the 1-norm.
  constexpr double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  CMatrix as = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    as /= std::pow(2.0, squarings);
  }

  static const double b[14] = {64764752532480000.0,
                               32382376266240000.0,
                               7771770303897600.0,
                               1187353796428800.0,
                               129060195264000.0,
                               10559470521600.0,
                               670442572800.0,
                               33522128640.0,
                               1323241920.0,
                               40840800.0,
                               960960.0,
                               16380.0,
                               182.0,
                               1.0};
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = as * as;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a2 * a4;
  const CMatrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                    b[4] * a4 + b[2] * a2 + b[0] * id;
  CMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

CMatrix psd_sqrt(const CMatrix& a, const Tolerance& tol) {
  require_square(a, "psd_sqrt");
  if (a.rows() == 0) return a;
  const double scale = op_norm(a);
  require_hermitian(a, 1.0 + scale, tol, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  Eigen::VectorXd lam = es.eigenvalues();
  const double clamp = tol.scaled(scale);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -clamp)
      throw std::domain_error("psd_sqrt: input not positive semidefinite");
    lam(i) = std::sqrt(std::max(lam(i), 0.0));
  }
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

CMatrix pseudo_inverse(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return CMatrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = kSingularThreshold * s(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.cast<Complex>().asDiagonal() *
         svd.matrixU().adjoint();
}

CMatrix kernel_basis(const CMatrix& a) {
  const Eigen::Index n = a.cols();
  if (n == 0) return CMatrix::Zero(0, 0);
  if (a.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = kSingularThreshold * s(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

CMatrix range_projector(const CMatrix& a) {
  if (a.rows() == 0) return CMatrix::Zero(0, 0);
  if (a.cols() == 0) return CMatrix::Zero(a.rows(), a.rows());
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = kSingularThreshold * s(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) ++rank;
  const CMatrix u = svd.matrixU().leftCols(rank);
  return u * u.adjoint();
}

bool loewner_leq(const CMatrix& a, const CMatrix& b, const Tolerance& tol) {
  require_square(a, "loewner_leq");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("loewner_leq: dimension mismatch");
  if (a.rows() == 0) return true;
  const double scale = 1.0 + op_norm(a) + op_norm(b);
  require_hermitian(a, scale, tol, "loewner_leq");
  require_hermitian(b, scale, tol, "loewner_leq");
  return lambda_max(hermitian_part(a) - hermitian_part(b)) <=
         tol.rel_eps * scale;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace qst::numkit
