#include "qstrotter/toy_fock.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qstrotter/ito_algebra.hpp"

namespace qst::walk {
namespace {

using numkit::Complex;
using numkit::kron;
using numkit::op_norm;

CMatrix ident(Eigen::Index n) { return CMatrix::Identity(n, n); }

void check_cell_inputs(const std::vector<BlockGenerator>& fs,
                       const CVector& cprime, const CVector& c) {
  if (fs.empty()) throw std::invalid_argument("cell slice needs a generator");
  for (const auto& f : fs) {
    f.validate();
    if (f.dim_h != fs.front().dim_h || f.dim_k != fs.front().dim_k)
      throw std::invalid_argument("cell slice factors must share dimensions");
  }
  if (cprime.size() != fs.front().dim_k || c.size() != fs.front().dim_k)
    throw std::invalid_argument("argument vector does not match noise dim");
}

// dim_h^n with the built-in workspace cap. The transfer operator lives on
// the n-fold tensor power of the initial space; past this size the dense
// representation stops being a sensible tool.
Eigen::Index transfer_dim(int dim_h, std::size_t n) {
  long long d = 1;
  for (std::size_t i = 0; i < n; ++i) {
    d *= dim_h;
    if (d > 256)
      throw std::invalid_argument(
          "cell slice workspace limit exceeded (initial dim^factors > 256)");
  }
  return static_cast<Eigen::Index>(d);
}

// <x| G |y> as an operator on the initial space, for x, y in the one-step
// space C + k (component 0 is the vacuum slot).
CMatrix partial_sandwich(const CMatrix& g, int dim_h, int dim_k,
                         const CVector& x, const CVector& y) {
  const Eigen::Index dh = dim_h;
  const Eigen::Index nk = static_cast<Eigen::Index>(dim_k) * dh;
  const CMatrix ex = ito::noise_injection(x.tail(dim_k), dim_h);
  const CMatrix ey = ito::noise_injection(y.tail(dim_k), dim_h);
  CMatrix out = std::conj(x(0)) * y(0) * g.topLeftCorner(dh, dh);
  out += std::conj(x(0)) * g.topRightCorner(dh, nk) * ey;
  out += y(0) * ex.adjoint() * g.bottomLeftCorner(nk, dh);
  out += ex.adjoint() * g.bottomRightCorner(nk, nk) * ey;
  return out;
}

// Deviation of the one-substep transfer operator from the identity on the
// n-fold tensor power, assembled without ever subtracting from 1: the
// all-vacuum chain is expanded analytically (its scalar through expm1/log1p,
// its matrix part as an iterated small-term product) and every other
// internal chain is a plain product of small factors.
CMatrix transfer_deviation(const std::vector<BlockGenerator>& fs,
                           const CVector& cprime, const CVector& c, double h) {
  const int dh = fs.front().dim_h;
  const int dk = fs.front().dim_k;
  const std::size_t n = fs.size();
  const Eigen::Index dim = transfer_dim(dh, n);

  std::vector<CMatrix> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = walk_step(fs[i], h);

  const double c2 = c.squaredNorm();
  const double cp2 = cprime.squaredNorm();
  const double w = h * c2 + h * cp2 + h * c2 * h * cp2;
  // 1 / (nu nu') - 1 with nu nu' = sqrt((1 + h|c|^2)(1 + h|c'|^2)).
  const double gm1 = std::expm1(-0.5 * std::log1p(w));

  const CMatrix ecp = ito::noise_injection(cprime, dh);
  const CMatrix ec = ito::noise_injection(c, dh);

  // Vacuum-chain factors A_i = scalar * (I + h D_i).
  std::vector<CMatrix> dmat(n);
  if (n == 1) {
    dmat[0] = fs[0].K + fs[0].M * ec + ecp.adjoint() * fs[0].L +
              ecp.adjoint() * fs[0].C * ec;
  } else {
    dmat[0] = fs[0].K + ecp.adjoint() * fs[0].L;
    for (std::size_t i = 1; i + 1 < n; ++i) dmat[i] = fs[i].K;
    dmat[n - 1] = fs[n - 1].K + fs[n - 1].M * ec;
  }

  CMatrix u = h * dmat[0];
  Eigen::Index prev = dh;
  for (std::size_t i = 1; i < n; ++i) {
    const CMatrix hd = h * dmat[i];
    u = kron(u, ident(dh)) + kron(ident(prev), hd) + kron(u, hd);
    prev *= dh;
  }
  CMatrix r = gm1 * ident(dim) + (1.0 + gm1) * u;

  if (dk > 0 && n >= 2) {
    double chains = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) chains *= 1.0 + dk;
    if (chains > 1e6)
      throw std::invalid_argument(
          "cell slice workspace limit exceeded (internal chain count)");

    const double nu = std::sqrt(1.0 + h * c2);
    const double nup = std::sqrt(1.0 + h * cp2);
    CVector eta = CVector::Zero(1 + dk);
    eta(0) = 1.0;
    eta.tail(dk) = std::sqrt(h) * c;
    eta /= nu;
    CVector etap = CVector::Zero(1 + dk);
    etap(0) = 1.0;
    etap.tail(dk) = std::sqrt(h) * cprime;
    etap /= nup;
    std::vector<CVector> basis(1 + dk);
    for (int b = 0; b <= dk; ++b) {
      basis[b] = CVector::Zero(1 + dk);
      basis[b](b) = 1.0;
    }

    std::vector<CMatrix> first(1 + dk), last(1 + dk);
    for (int b = 0; b <= dk; ++b) {
      first[b] = partial_sandwich(g[0], dh, dk, etap, basis[b]);
      last[b] = partial_sandwich(g[n - 1], dh, dk, basis[b], eta);
    }
    // mid[i][a * (1 + dk) + b] for the (i + 1)-th generator.
    std::vector<std::vector<CMatrix>> mid(n >= 2 ? n - 2 : 0);
    for (std::size_t i = 0; i + 2 < n; ++i) {
      mid[i].resize((1 + dk) * (1 + dk));
      for (int a = 0; a <= dk; ++a)
        for (int b = 0; b <= dk; ++b)
          mid[i][a * (1 + dk) + b] =
              partial_sandwich(g[i + 1], dh, dk, basis[a], basis[b]);
    }

    std::vector<int> idx(n - 1, 0);
    for (;;) {
      // Advance to the next chain, skipping the all-vacuum one.
      std::size_t pos = 0;
      while (pos < idx.size() && idx[pos] == dk) idx[pos++] = 0;
      if (pos == idx.size()) break;
      ++idx[pos];

      CMatrix term = first[idx[0]];
      for (std::size_t i = 0; i + 2 < n; ++i)
        term = kron(term, mid[i][idx[i] * (1 + dk) + idx[i + 1]]);
      term = kron(term, last[idx[n - 2]]);
      r += term;
    }
  }
  return r;
}

// S with (I + r)^m = I + S, by square-and-multiply on deviations. All
// factors are powers of one matrix, so the multiply order is immaterial.
CMatrix dev_power(CMatrix r, long long m) {
  CMatrix s = CMatrix::Zero(r.rows(), r.cols());
  while (m > 0) {
    if (m & 1) s = s + r + s * r;
    m >>= 1;
    if (m > 0) r = 2.0 * r + r * r;
  }
  return s;
}

// Linear part of the factor-multiplication map B(h)^{tensor n} -> B(h):
// out(a, b) = sum_J t(a * inner + J, J * dh + b).
CMatrix phi_contract(const CMatrix& t, int dim_h, std::size_t n) {
  const Eigen::Index dh = dim_h;
  Eigen::Index inner = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) inner *= dh;
  CMatrix out = CMatrix::Zero(dh, dh);
  for (Eigen::Index a = 0; a < dh; ++a)
    for (Eigen::Index b = 0; b < dh; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index j = 0; j < inner; ++j)
        acc += t(a * inner + j, j * dh + b);
      out(a, b) = acc;
    }
  return out;
}

CMatrix cell_deviation(const std::vector<BlockGenerator>& fs,
                       const CVector& cprime, const CVector& c, double delta,
                       long long m) {
  const CMatrix r = transfer_deviation(fs, cprime, c, delta / m);
  return phi_contract(dev_power(r, m), fs.front().dim_h, fs.size());
}

// Cell edges of [r, t]: window ends, interior partition points, and the
// breakpoints of both step functions.
std::vector<double> refined_edges(const std::vector<double>& partition,
                                  const StepFunction& gprime,
                                  const StepFunction& g, double r, double t) {
  if (!(r <= t))
    throw std::invalid_argument("slice window must satisfy r <= t");
  std::vector<double> edges = {r, t};
  for (double p : partition)
    if (p > r && p < t) edges.push_back(p);
  for (double b : gprime.breaks_in(r, t)) edges.push_back(b);
  for (double b : g.breaks_in(r, t)) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

void check_substeps(long long m) {
  if (m < 1) throw std::invalid_argument("substep count must be positive");
  if (m > (1LL << 31))
    throw std::invalid_argument("substep count exceeds the built-in cap");
}

}  // namespace

CMatrix walk_step(const BlockGenerator& f, double h) {
  f.validate();
  if (!(h >= 0.0)) throw std::invalid_argument("step width must be >= 0");
  const Eigen::Index dh = f.dim_h;
  const Eigen::Index nk = static_cast<Eigen::Index>(f.dim_k) * dh;
  CMatrix g(dh + nk, dh + nk);
  g.topLeftCorner(dh, dh) = ident(dh) + h * f.K;
  g.topRightCorner(dh, nk) = std::sqrt(h) * f.M;
  g.bottomLeftCorner(nk, dh) = std::sqrt(h) * f.L;
  g.bottomRightCorner(nk, nk) = f.C;
  return g;
}

CMatrix walk_cell_slice_raw(const std::vector<BlockGenerator>& fs,
                            const CVector& cprime, const CVector& c,
                            double delta, long long m) {
  check_cell_inputs(fs, cprime, c);
  check_substeps(m);
  const Eigen::Index dh = fs.front().dim_h;
  if (delta == 0.0) return ident(dh);
  if (!(delta > 0.0)) throw std::invalid_argument("cell width must be >= 0");
  return ident(dh) + cell_deviation(fs, cprime, c, delta, m);
}

SliceResult cell_product_slice(const std::vector<BlockGenerator>& fs,
                               const CVector& cprime, const CVector& c,
                               double delta, long long m) {
  check_cell_inputs(fs, cprime, c);
  check_substeps(m);
  const Eigen::Index dh = fs.front().dim_h;
  if (delta == 0.0) return {ident(dh), 0.0, m};
  if (!(delta > 0.0)) throw std::invalid_argument("cell width must be >= 0");
  const CMatrix s1 = cell_deviation(fs, cprime, c, delta, m);
  const CMatrix s2 = cell_deviation(fs, cprime, c, delta, 2 * m);
  return {ident(dh) + 2.0 * s2 - s1, op_norm(s2 - s1), m};
}

SliceResult trotter_approximant_slice(const std::vector<BlockGenerator>& fs,
                                      const StepFunction& gprime,
                                      const StepFunction& g, double r,
                                      double t,
                                      const std::vector<double>& partition,
                                      long long m) {
  if (fs.empty())
    throw std::invalid_argument("approximant needs at least one generator");
  gprime.validate();
  g.validate();
  const auto edges = refined_edges(partition, gprime, g, r, t);
  CMatrix acc = ident(fs.front().dim_h);
  std::vector<double> norms, ests;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double width = edges[i + 1] - edges[i];
    if (width <= 0.0) continue;
    const auto cell = cell_product_slice(fs, gprime.value_at(edges[i]),
                                         g.value_at(edges[i]), width, m);
    acc = acc * cell.matrix;
    norms.push_back(op_norm(cell.matrix));
    ests.push_back(cell.truncation_estimate);
  }
  // First-order aggregate: each cell's estimate times the norms of all the
  // other cell values.
  const std::size_t cells = norms.size();
  std::vector<double> prefix(cells + 1, 1.0), suffix(cells + 1, 1.0);
  for (std::size_t i = 0; i < cells; ++i) prefix[i + 1] = prefix[i] * norms[i];
  for (std::size_t i = cells; i > 0; --i)
    suffix[i - 1] = suffix[i] * norms[i - 1];
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i)
    total += ests[i] * prefix[i] * suffix[i + 1];
  return {acc, total, m};
}

CMatrix walk_slice(const BlockGenerator& f, const StepFunction& gprime,
                   const StepFunction& g, double r, double t, long long m) {
  f.validate();
  gprime.validate();
  g.validate();
  const auto edges = refined_edges({}, gprime, g, r, t);
  CMatrix acc = ident(f.dim_h);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double width = edges[i + 1] - edges[i];
    if (width <= 0.0) continue;
    acc = acc * walk_cell_slice_raw({f}, gprime.value_at(edges[i]),
                                    g.value_at(edges[i]), width, m);
  }
  return acc;
}

TrotterReport trotter_report(const std::vector<BlockGenerator>& fs,
                             const StepFunction& gprime, const StepFunction& g,
                             double r, double t, const ReportOptions& opts) {
  if (opts.meshes.empty())
    throw std::invalid_argument("report needs at least one mesh");
  const CMatrix limit = sim::trotter_limit_slice(fs, gprime, g, r, t);
  const double scale = 1.0 + op_norm(limit);
  const double trunc_floor = 1e-9 * scale;

  const auto row_for = [&](double mesh) {
    if (!(mesh > 0.0)) throw std::invalid_argument("mesh must be positive");
    const auto ncell =
        std::max<long long>(1, static_cast<long long>(
                                   std::ceil((t - r) / mesh - 1e-12)));
    std::vector<double> partition(ncell + 1);
    for (long long i = 0; i <= ncell; ++i)
      partition[i] = r + (t - r) * static_cast<double>(i) / ncell;
    partition.back() = t;

    ReportRow row;
    // Rows are keyed by the requested mesh; the uniform partition realizes it
    // up to rounding and any breakpoint refinement only shrinks cells, so the
    // bound computed from the unrefined partition stays an upper bound.
    row.mesh = mesh;
    row.bound = sim::mesh_error_bound_n(fs, gprime, g, r, t, partition);

    long long m = opts.substeps > 0 ? opts.substeps : 1024;
    for (;;) {
      const auto res = trotter_approximant_slice(fs, gprime, g, r, t,
                                                 partition, m);
      row.measured_error = op_norm(res.matrix - limit);
      row.truncation_estimate = res.truncation_estimate;
      row.substeps = m;
      row.conclusive = row.truncation_estimate <=
                       std::max(0.1 * row.measured_error, trunc_floor);
      if (row.conclusive || opts.substeps > 0 || m >= (1LL << 30)) break;
      m <<= 1;
    }
    return row;
  };

  // Rows are independent; evaluate them concurrently but emit in mesh order.
  TrotterReport report;
  std::vector<std::future<ReportRow>> pending;
  pending.reserve(opts.meshes.size());
  for (double mesh : opts.meshes)
    pending.push_back(
        std::async(std::launch::async, [&row_for, mesh] { return row_for(mesh); }));
  for (auto& fut : pending) report.rows.push_back(fut.get());

  std::vector<double> xs, ys;
  for (const auto& row : report.rows) {
    const bool significant = row.conclusive &&
                             row.measured_error >=
                                 10.0 * row.truncation_estimate &&
                             row.measured_error >= 1e-8 * scale;
    if (significant && row.mesh > 0.0 && row.measured_error > 0.0) {
      xs.push_back(std::log(row.mesh));
      ys.push_back(std::log(row.measured_error));
    }
  }
  if (xs.size() >= 2) {
    const double xbar =
        std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double ybar =
        std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - xbar) * (xs[i] - xbar);
      sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx > 0.0) report.slope = sxy / sxx;
  }

  report.pass = true;
  for (const auto& row : report.rows)
    if (!row.conclusive ||
        row.measured_error > row.bound + row.truncation_estimate)
      report.pass = false;
  if (report.slope && (*report.slope < 0.8 || *report.slope > 1.2))
    report.pass = false;
  return report;
}

}  // namespace qst::walk
