#include "twistred/ym.hpp"

#include <algorithm>
#include <fstream>
#include <cmath>

namespace twistred {

double FieldConfig::mark(int k) const {
  int nn = n();
  int idx = k - 1;
  int q = static_cast<int>(std::floor(static_cast<double>(idx) / nn));
  int r = idx - q * nn;
  return marks[r] + q;
}

AlgebraVector FieldConfig::tau_apply(const AlgebraVector& v) const {
  return gamma.matrix.transpose() * v;
}

AlgebraVector FieldConfig::plus_limit(int k) const {
  int nn = n();
  int q = static_cast<int>(std::floor(static_cast<double>(k) / nn));
  int r = k - q * nn;
  AlgebraVector v = plus_limits[r];
  for (int i = 0; i < q; ++i) v = tau_apply(v);
  for (int i = 0; i > q; --i) v = gamma.matrix * v;
  return v;
}

AlgebraVector FieldConfig::minus_limit(int k) const {
  double dx = mark(k) - mark(k - 1);
  return exp_ad_cartan(*alg, chi, plus_limit(k - 1), -dx);
}

AlgebraVector FieldConfig::field_at(double x) const {
  double x0 = mark(0);
  int m = static_cast<int>(std::floor(x - x0));
  double xb = x - m;  // in [x_0, x_N)
  int k = 0;
  while (k + 1 <= n() && mark(k + 1) <= xb) ++k;
  AlgebraVector e = exp_ad_cartan(*alg, chi, plus_limit(k), -(xb - mark(k)));
  for (int i = 0; i < m; ++i) e = tau_apply(e);
  for (int i = 0; i > m; --i) e = gamma.matrix * e;
  return e;
}

CouplingVector coupling_from_marks(const Eigen::VectorXd& marks) {
  int n = static_cast<int>(marks.size());
  if (n < 1) throw ValidationError("marks: need at least one point");
  for (int k = 0; k + 1 < n; ++k)
    if (marks[k + 1] <= marks[k])
      throw ValidationError("marks must be strictly increasing");
  if (marks[0] <= 0.0 || marks[n - 1] >= 1.0)
    throw ValidationError("marks must lie in (0, 1)");
  Eigen::VectorXd lam(n);
  double prev = marks[n - 1] - 1.0;
  for (int k = 0; k < n; ++k) {
    lam[k] = 1.0 / (marks[k] - prev);
    prev = marks[k];
  }
  return CouplingVector(lam);
}

FieldConfig solve_slice(const SimpleLieAlgebra& alg, const DiagramAutomorphism& gamma,
                        const Eigen::VectorXd& marks,
                        const std::vector<AlgebraVector>& charges,
                        const AlgebraVector& chi, const AlgebraVector& momentum) {
  CouplingVector lam = coupling_from_marks(marks);
  int n = lam.n();
  if (static_cast<int>(charges.size()) != n)
    throw ValidationError("solve_slice: need one charge per mark");
  ProductSpace space(alg, gamma, lam);
  ProductVector xi(space.pdim());
  for (int k = 0; k < n; ++k)
    xi.segment(k * alg.dim, alg.dim) = charges[k] / lam.lambdas[k];
  ProductVector j = space.solve_momentum_constraint(chi, momentum, xi);

  FieldConfig cfg;
  cfg.alg = &alg;
  cfg.gamma = gamma;
  cfg.marks = marks;
  cfg.charges = charges;
  cfg.chi = chi;
  cfg.momentum = momentum;
  cfg.plus_limits.resize(n);
  for (int k = 1; k <= n; ++k)
    cfg.plus_limits[k - 1] = lam.lambdas[k - 1] * space.component(j, k - 1);
  return cfg;
}

double jump_residual(const FieldConfig& cfg) {
  double worst = 0.0;
  for (int k = 1; k <= cfg.n(); ++k) {
    AlgebraVector r = cfg.charges[k - 1] + cfg.plus_limit(k) - cfg.minus_limit(k);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double correspondence_residual(const FieldConfig& cfg) {
  SliceData sd = slice_to_reduced(cfg);
  const Eigen::VectorXd& lam = sd.coupling.lambdas;
  const SimpleLieAlgebra& alg = *cfg.alg;
  int n = cfg.n();
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    AlgebraVector jnext = (k + 1 < n)
                              ? AlgebraVector(sd.j.segment((k + 1) * alg.dim, alg.dim))
                              : cfg.tau_apply(sd.j.segment(0, alg.dim));
    double lnext = (k + 1 < n) ? lam[k + 1] : lam[0];
    AlgebraVector r =
        sd.point.xi.segment(k * alg.dim, alg.dim) + (lnext / lam[k]) * jnext -
        exp_ad_cartan(alg, cfg.chi / lam[k], sd.j.segment(k * alg.dim, alg.dim), -1.0);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double field_energy(const FieldConfig& cfg) {
  double e = 0.0;
  for (int k = 1; k <= cfg.n(); ++k) {
    AlgebraVector ep = cfg.plus_limit(k - 1);
    e += (cfg.mark(k) - cfg.mark(k - 1)) * ep.dot(ep);
  }
  return e;
}

double theta_pairing_check(const FieldConfig& cfg) {
  Eigen::MatrixXd tf = fixed_cartan_basis(*cfg.alg, cfg.gamma);
  AlgebraVector acc = AlgebraVector::Zero(cfg.alg->dim);
  for (int k = 1; k <= cfg.n(); ++k)
    acc += (cfg.mark(k) - cfg.mark(k - 1)) * cfg.plus_limit(k - 1);
  AlgebraVector proj = tf * (tf.transpose() * acc);
  return (proj - cfg.momentum).norm();
}

SliceData slice_to_reduced(const FieldConfig& cfg) {
  CouplingVector lam = coupling_from_marks(cfg.marks);
  const SimpleLieAlgebra& alg = *cfg.alg;
  int n = cfg.n();
  ReducedPoint pt;
  pt.q = cfg.chi;
  pt.p = cfg.momentum;
  pt.xi.resize(n * alg.dim);
  ProductVector j(n * alg.dim);
  for (int k = 0; k < n; ++k) {
    pt.xi.segment(k * alg.dim, alg.dim) = cfg.charges[k] / lam.lambdas[k];
    j.segment(k * alg.dim, alg.dim) = cfg.plus_limits[k] / lam.lambdas[k];
  }
  return SliceData{lam, pt, j};
}

// ---------------------------------------------------------------------------
// Wilson lines
// ---------------------------------------------------------------------------

Eigen::MatrixXcd ConnectionSample::at(double x) const {
  int m = static_cast<int>(std::floor(x));
  double xb = x - m;
  Eigen::MatrixXcd v = base(xb);
  if (twist == GroupTwistYM::EntrywiseConjugate && (m % 2 != 0)) v = v.conjugate();
  return v;
}

namespace {

// Fourth-order commutator-free step for y' = y A over [t, t+h]: the
// earlier Gauss node carries the larger weight in the left factor.
Eigen::MatrixXcd cf4_step(const ConnectionSample& a, const Eigen::MatrixXcd& y,
                          double t, double h) {
  static const double node = std::sqrt(3.0) / 6.0;
  static const double a1 = 0.25 + node, a2 = 0.25 - node;
  Eigen::MatrixXcd m1 = a.at(t + (0.5 - node) * h);
  Eigen::MatrixXcd m2 = a.at(t + (0.5 + node) * h);
  return y * sun_exp(h * (a1 * m1 + a2 * m2)) * sun_exp(h * (a2 * m1 + a1 * m2));
}

std::vector<double> segment_points(const ConnectionSample& a, double x_end) {
  std::vector<double> pts{0.0, x_end};
  int periods = static_cast<int>(std::ceil(x_end)) + 1;
  for (int period = 0; period < periods; ++period) {
    for (double b : a.breaks) {
      double p = b + period;
      if (p > 1e-14 && p < x_end - 1e-14) pts.push_back(p);
    }
    // integer points are always smooth-gluing boundaries
    double p = static_cast<double>(period + 1);
    if (p < x_end - 1e-14) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-14; }),
            pts.end());
  return pts;
}

}  // namespace

Eigen::MatrixXcd wilson_line(const ConnectionSample& a, double x,
                             const WilsonOptions& opt) {
  std::vector<double> xs{x};
  return wilson_line_path(a, xs, opt)[0];
}

std::vector<Eigen::MatrixXcd> wilson_line_path(const ConnectionSample& a,
                                               const std::vector<double>& xs,
                                               const WilsonOptions& opt) {
  for (double x : xs)
    if (x < 0.0) throw ValidationError("wilson_line: negative arguments unsupported");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i + 1] < xs[i])
      throw ValidationError("wilson_line: sample points must be ascending");

  double x_end = xs.empty() ? 0.0 : xs.back();
  std::vector<double> cuts = segment_points(a, std::max(x_end, 1e-14));
  // merge the sample points into the cut list
  for (double x : xs) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double u, double v) { return std::abs(u - v) < 1e-14; }),
             cuts.end());

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(a.n, a.n);
  std::vector<Eigen::MatrixXcd> out(xs.size());
  std::size_t next_sample = 0;
  auto record = [&](double t) {
    while (next_sample < xs.size() && std::abs(xs[next_sample] - t) < 1e-13) {
      out[next_sample] = y;
      ++next_sample;
    }
  };
  record(0.0);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double t0 = cuts[s], t1 = cuts[s + 1];
    if (t1 <= t0) continue;
    int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) * opt.steps_per_unit)));
    double h = (t1 - t0) / steps;
    for (int i = 0; i < steps; ++i) y = cf4_step(a, y, t0 + i * h, h);
    double defect = unitarity_defect(y);
    if (defect > opt.unitarity_threshold) {
      if (defect > 1e-3)
        throw NumericalError("wilson_line: unitarity lost (defect " +
                             std::to_string(defect) + ")");
      y = project_special_unitary(y);
    }
    record(t1);
  }
  if (next_sample != xs.size())
    throw NumericalError("wilson_line: failed to hit all sample points");
  return out;
}

ConnectionSample gauge_transform(const ConnectionSample& a,
                                 std::function<Eigen::MatrixXcd(double)> g,
                                 std::function<Eigen::MatrixXcd(double)> gdot) {
  ConnectionSample out = a;
  auto base = a.base;
  out.base = [base, g, gdot](double x) {
    Eigen::MatrixXcd gx = g(x);
    Eigen::MatrixXcd gi = gx.inverse();
    return Eigen::MatrixXcd(gx * base(x) * gi - gdot(x) * gi);
  };
  return out;
}

void write_wilson_csv(const std::string& path, const ConnectionSample& a,
                      const std::vector<double>& xs, const WilsonOptions& opt) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open Wilson line output file " + path);
  out << "x";
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      out << ",re_" << i << j << ",im_" << i << j;
  out << "\n";
  auto ys = wilson_line_path(a, xs, opt);
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (std::size_t s = 0; s < xs.size(); ++s) {
    put(xs[s]);
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) {
        out << ",";
        put(ys[s](i, j).real());
        out << ",";
        put(ys[s](i, j).imag());
      }
    out << "\n";
  }
}

Eigen::MatrixXcd ConstantGauge::at(double x) const {
  return sun_exp(-x * chi_mat) * w * wilson_line(connection, x, options);
}

std::vector<Eigen::MatrixXcd> ConstantGauge::path(const std::vector<double>& xs) const {
  std::vector<Eigen::MatrixXcd> ys = wilson_line_path(connection, xs, options);
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = sun_exp(-xs[i] * chi_mat) * w * ys[i];
  return ys;
}

ConstantGauge gauge_to_constant(const SunRealization& real, const ConnectionSample& a,
                                const WilsonOptions& opt) {
  if (a.twist != GroupTwistYM::Identity)
    throw ValidationError(
        "gauge_to_constant: alcove step implemented for the identity twist only");
  Eigen::MatrixXcd y1 = wilson_line(a, 1.0, opt);
  AlcoveProjection proj = alcove_project(real, y1);
  ConstantGauge out;
  out.chi = proj.q;
  out.w = proj.w;
  out.chi_mat = real.to_matrix(proj.q);
  out.connection = a;
  out.options = opt;
  return out;
}

}  // namespace twistred
