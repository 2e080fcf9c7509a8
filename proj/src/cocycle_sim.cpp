#include "qstrotter/cocycle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qst::sim {

namespace {

using numkit::op_norm;

std::optional<double> require_growth_bound(const BlockGenerator& f,
                                           const char* who) {
  auto b = ito::growth_bound(f);
  if (!b)
    throw std::domain_error(std::string(who) +
                            ": generator has no finite growth bound");
  return b;
}

void require_window(double r, double t, const char* who) {
  if (!(r <= t) || !std::isfinite(r) || !std::isfinite(t))
    throw std::invalid_argument(std::string(who) + ": bad time window");
}

void require_dims(const BlockGenerator& f, const StepFunction& gprime,
                  const StepFunction& g, const char* who) {
  if (g.dim() != f.dim_k || gprime.dim() != f.dim_k)
    throw std::invalid_argument(
        std::string(who) + ": step function dimension does not match noise");
}

// Cell edges of [r, t] refined by the breakpoints of both step functions.
std::vector<double> cell_edges(const StepFunction& gprime,
                               const StepFunction& g, double r, double t) {
  std::vector<double> pts{r};
  for (double x : gprime.breaks_in(r, t)) pts.push_back(x);
  for (double x : g.breaks_in(r, t)) pts.push_back(x);
  pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

StepFunction StepFunction::constant(const CVector& v) {
  StepFunction s;
  s.values.push_back(v);
  return s;
}

void StepFunction::validate() const {
  if (values.empty())
    throw std::invalid_argument("StepFunction: no values");
  if (values.size() != breaks.size() + 1)
    throw std::invalid_argument(
        "StepFunction: need exactly one more value than breakpoints");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i] < breaks[i + 1]))
      throw std::invalid_argument(
          "StepFunction: breakpoints must be strictly increasing");
  for (double b : breaks)
    if (!std::isfinite(b))
      throw std::invalid_argument("StepFunction: non-finite breakpoint");
  for (const CVector& v : values)
    if (v.size() != values.front().size())
      throw std::invalid_argument("StepFunction: mixed value dimensions");
}

int StepFunction::dim() const {
  validate();
  return static_cast<int>(values.front().size());
}

const CVector& StepFunction::value_at(double t) const {
  validate();
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  return values[static_cast<std::size_t>(it - breaks.begin())];
}

std::vector<double> StepFunction::breaks_in(double r, double t) const {
  validate();
  std::vector<double> out;
  for (double b : breaks)
    if (r < b && b < t) out.push_back(b);
  return out;
}

BlockGenerator weyl_generator(const CVector& c, int dim_h) {
  BlockGenerator f;
  f.dim_h = dim_h;
  f.dim_k = static_cast<int>(c.size());
  const CMatrix e = ito::noise_injection(c, dim_h);
  f.K = -0.5 * c.squaredNorm() * CMatrix::Identity(dim_h, dim_h);
  f.M = -e.adjoint();
  f.L = e;
  f.C = CMatrix::Identity(e.rows(), e.rows());
  return f;
}

BlockGenerator dressed_generator(const BlockGenerator& f, const CVector& cprime,
                                 const CVector& c) {
  f.validate();
  if (c.size() != f.dim_k || cprime.size() != f.dim_k)
    throw std::invalid_argument(
        "dressed_generator: direction dimension does not match noise");
  const auto wc = weyl_generator(c, f.dim_h);
  const auto wp = ito::adjoint(weyl_generator(cprime, f.dim_h));
  return ito::series(wp, ito::series(f, wc));
}

CMatrix slice_cocycle(const BlockGenerator& f, const StepFunction& gprime,
                      const StepFunction& g, double r, double t) {
  f.validate();
  require_window(r, t, "slice_cocycle");
  require_dims(f, gprime, g, "slice_cocycle");
  CMatrix acc = CMatrix::Identity(f.dim_h, f.dim_h);
  const auto edges = cell_edges(gprime, g, r, t);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double delta = edges[i + 1] - edges[i];
    if (delta <= 0.0) continue;
    const CMatrix ktilde =
        dressed_generator(f, gprime.value_at(edges[i]), g.value_at(edges[i]))
            .K;
    acc = acc * numkit::mat_exp(delta * ktilde);
  }
  return acc;
}

CMatrix trotter_limit_slice(const std::vector<BlockGenerator>& fs,
                            const StepFunction& gprime, const StepFunction& g,
                            double r, double t) {
  if (fs.empty())
    throw std::invalid_argument("trotter_limit_slice: empty factor list");
  BlockGenerator prod = fs.front();
  require_growth_bound(prod, "trotter_limit_slice");
  for (std::size_t i = 1; i < fs.size(); ++i) {
    require_growth_bound(fs[i], "trotter_limit_slice");
    prod = ito::series(prod, fs[i]);
  }
  return slice_cocycle(prod, gprime, g, r, t);
}

double trotter_constant_dressed(const BlockGenerator& f1,
                                const BlockGenerator& f2,
                                const StepFunction& gprime,
                                const StepFunction& g, double r, double t) {
  return trotter_constant_dressed_n({f1, f2}, gprime, g, r, t);
}

double trotter_constant_dressed_n(const std::vector<BlockGenerator>& fs,
                                  const StepFunction& gprime,
                                  const StepFunction& g, double r, double t) {
  if (fs.empty())
    throw std::invalid_argument("trotter_constant_dressed_n: empty list");
  require_window(r, t, "trotter_constant_dressed_n");
  require_dims(fs.front(), gprime, g, "trotter_constant_dressed_n");
  const auto edges = cell_edges(gprime, g, r, t);
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    const CVector& c = g.value_at(edges[i]);
    const CVector& cp = gprime.value_at(edges[i]);
    std::vector<BlockGenerator> dressed = fs;
    dressed.front() = ito::series(
        ito::adjoint(weyl_generator(cp, fs.front().dim_h)), dressed.front());
    dressed.back() =
        ito::series(dressed.back(), weyl_generator(c, fs.back().dim_h));
    best = std::max(best, ito::trotter_constant_n(dressed));
  }
  return best;
}

double expectation_error_bound(const BlockGenerator& f1,
                               const BlockGenerator& f2, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("expectation_error_bound: bad time");
  const auto b1 = require_growth_bound(f1, "expectation_error_bound");
  const auto b2 = require_growth_bound(f2, "expectation_error_bound");
  const double cc = ito::trotter_constant(f1, f2);
  return t * t * std::exp(t * (*b1 + *b2)) * cc * cc;
}

namespace {

// Mesh of the partition with 0 prepended.
double mesh_with_zero(std::vector<double> pts, double r, double t) {
  pts.erase(std::remove_if(pts.begin(), pts.end(),
                           [&](double p) { return p < r || p > t; }),
            pts.end());
  if (pts.empty())
    throw std::invalid_argument("mesh_error_bound: empty partition");
  pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  double mesh = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    mesh = std::max(mesh, pts[i + 1] - pts[i]);
  return mesh;
}

}  // namespace

double mesh_error_bound(const BlockGenerator& f1, const BlockGenerator& f2,
                        const StepFunction& gprime, const StepFunction& g,
                        double r, double t,
                        const std::vector<double>& partition) {
  return mesh_error_bound_n({f1, f2}, gprime, g, r, t, partition);
}

double mesh_error_bound_n(const std::vector<BlockGenerator>& fs,
                          const StepFunction& gprime, const StepFunction& g,
                          double r, double t,
                          const std::vector<double>& partition) {
  if (fs.empty())
    throw std::invalid_argument("mesh_error_bound_n: empty list");
  require_window(r, t, "mesh_error_bound_n");
  double beta_sum = 0.0;
  for (const auto& f : fs)
    beta_sum += *require_growth_bound(f, "mesh_error_bound_n");
  const double mesh = mesh_with_zero(partition, r, t);
  const double cc = trotter_constant_dressed_n(fs, gprime, g, r, t);
  return mesh * (t - r) * std::exp((t - r) * beta_sum) * cc * cc;
}

}  // namespace qst::sim
