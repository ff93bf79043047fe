#pragma once

// Resolvent kernel of the kinetic operator, G_E = (T - E)^-1 for
// -alpha^-1 < E < 0, as a radial function of u = |x - y|:
//
//   G_E(u) = a e^{-nu u} / (4 pi u)
//          + (m / 2 pi^2) K_1(m u) / u
//          + a^2 (m / 2 pi^2) [K_1(m |.|) / |.|  *  e^{-nu |.|} / (4 pi |.|)](u)
//
// with m = alpha^-1, a = E + m and nu = sqrt(m^2 - a^2). Radial 3D
// convolutions use
//   r (f * g)(r) = 2 pi int_0^inf s f(s) [Gc(r + s) - Gc(|r - s|)] ds,
//   Gc(v) = int_0^v u g(u) du,
// on a mesh u(x) = scale * log(1 + e^x) with uniform x: logarithmic near 0,
// uniform for u >> scale. Integrals use 8-point Gauss-Legendre per x-interval.

#include <Eigen/Dense>
#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "prhf/bessel.hpp"
#include "prhf/error.hpp"
#include "prhf/radial.hpp"

namespace prhf {

using RadialFunction = std::function<double(double)>;

/// sqrt(-E (2 alpha^-1 + E)), the decay rate of G_E.
inline double nu_of_energy(double E, double alpha) {
  const double m = 1.0 / alpha;
  if (!(E > -m && E < 0.0)) {
    throw DomainError("energy " + std::to_string(E) + " outside (-alpha^-1, 0)");
  }
  return std::sqrt(-E * (2.0 * m + E));
}

namespace detail {

/// 8-point Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::array<double, 8> t{};
  std::array<double, 8> w{};
  GaussRule() {
    using G = boost::math::quadrature::gauss<double, 8>;
    const auto& x = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < 4; ++i) {
      t[i] = 0.5 * (1.0 - x[3 - i]);
      w[i] = 0.5 * wt[3 - i];
      t[7 - i] = 0.5 * (1.0 + x[3 - i]);
      w[7 - i] = 0.5 * wt[3 - i];
    }
  }
};

inline const GaussRule& gauss8() {
  static const GaussRule rule;
  return rule;
}

}  // namespace detail

struct KernelMesh {
  double scale = 1.0;
  double x_min = -25.0;
  double dx = 0.2;
  int intervals = 300;

  double u_of(double x) const {
    return scale * (x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)));
  }
  double dudx(double x) const { return scale / (1.0 + std::exp(-x)); }
  double x_of(double u) const {
    const double y = u / scale;
    return y + std::log(-std::expm1(-y));
  }
  double x_node(int k) const { return x_min + k * dx; }
  double node(int k) const { return u_of(x_node(k)); }
  double u_min() const { return node(0); }
  double u_max() const { return node(intervals); }
  int size() const { return intervals + 1; }
  /// Interval index containing u, clamped to [0, intervals - 1].
  int interval_of(double u) const {
    const int k = static_cast<int>(std::floor((x_of(u) - x_min) / dx));
    return std::clamp(k, 0, intervals - 1);
  }
};

/// Mesh covering [u_min, u_max] with x-spacing dx.
inline KernelMesh make_kernel_mesh(double scale, double u_min, double u_max, double dx = 0.2) {
  if (!(scale > 0.0) || !(u_min > 0.0) || !(u_max > u_min) || !(dx > 0.0)) {
    throw DomainError("kernel mesh needs 0 < u_min < u_max and positive scale, dx");
  }
  KernelMesh mesh;
  mesh.scale = scale;
  mesh.dx = dx;
  mesh.x_min = mesh.x_of(u_min);
  mesh.intervals = static_cast<int>(std::ceil((mesh.x_of(u_max) - mesh.x_min) / dx));
  return mesh;
}

/// Values on the mesh nodes, interpolated by 4-point Lagrange in x.
/// Below u_min the first value is returned, above u_max zero.
struct RadialTable {
  KernelMesh mesh;
  Eigen::VectorXd values;

  double operator()(double u) const {
    if (u <= mesh.u_min()) return values[0];
    if (u > mesh.u_max()) return 0.0;
    const double xi = (mesh.x_of(u) - mesh.x_min) / mesh.dx;
    const int last = static_cast<int>(values.size()) - 1;
    const int k = std::clamp(static_cast<int>(std::floor(xi)) - 1, 0, std::max(last - 3, 0));
    const double t = xi - k;
    double out = 0.0;
    for (int j = 0; j < 4 && k + j <= last; ++j) {
      double l = 1.0;
      for (int i = 0; i < 4; ++i) {
        if (i != j) l *= (t - i) / (j - i);
      }
      out += l * values[k + j];
    }
    return out;
  }
};

/// Gc(v) = int_0^v u g(u) du for a callable g, tabulated on the mesh and
/// completed inside an interval by a partial Gauss rule. Gc is linear below
/// u_min and constant above u_max.
class CumulativeIntegral {
 public:
  CumulativeIntegral(RadialFunction g, const KernelMesh& mesh) : g_(std::move(g)), mesh_(mesh) {
    nodes_.resize(mesh_.size());
    const double u0 = mesh_.u_min();
    nodes_[0] = 0.5 * u0 * u0 * g_(u0);
    for (int k = 0; k < mesh_.intervals; ++k) nodes_[k + 1] = nodes_[k] + partial(k, mesh_.x_node(k + 1));
  }

  double operator()(double v) const {
    if (v <= 0.0) return 0.0;
    if (v <= mesh_.u_min()) return nodes_[0] * v / mesh_.u_min();
    if (v >= mesh_.u_max()) return nodes_[mesh_.intervals];
    const int k = mesh_.interval_of(v);
    return nodes_[k] + partial(k, mesh_.x_of(v));
  }

  double total() const { return nodes_[mesh_.intervals]; }

 private:
  double partial(int k, double x_end) const {
    const auto& q = detail::gauss8();
    const double x0 = mesh_.x_node(k);
    const double len = x_end - x0;
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      const double x = x0 + q.t[i] * len;
      const double u = mesh_.u_of(x);
      s += q.w[i] * u * g_(u) * mesh_.dudx(x);
    }
    return s * len;
  }

  RadialFunction g_;
  KernelMesh mesh_;
  Eigen::VectorXd nodes_;
};

namespace detail {

/// Quadrature of int s f(s) bracket(r, s) ds over the mesh with f sampled
/// once at the standard nodes. Pieces containing s = r or s_max are split.
class OuterRule {
 public:
  OuterRule(const RadialFunction& f, const KernelMesh& mesh) : f_(f), mesh_(mesh) {
    const auto& q = gauss8();
    weight_.resize(static_cast<std::size_t>(mesh.intervals) * 8);
    node_.resize(weight_.size());
    for (int k = 0; k < mesh.intervals; ++k) {
      for (std::size_t i = 0; i < 8; ++i) {
        const double x = mesh.x_node(k) + q.t[i] * mesh.dx;
        const double s = mesh.u_of(x);
        node_[k * 8 + i] = s;
        weight_[k * 8 + i] = q.w[i] * mesh.dx * mesh.dudx(x) * s * f(s);
      }
    }
  }

  template <class Bracket>
  double integrate(double r, double s_max, Bracket&& bracket) const {
    const double upper = std::min(s_max, mesh_.u_max());
    if (upper <= mesh_.u_min()) return 0.0;
    const int k_end = mesh_.interval_of(upper);
    const bool split_r = r > mesh_.u_min() && r < upper;
    const int k_r = split_r ? mesh_.interval_of(r) : -1;
    double sum = 0.0;
    for (int k = 0; k <= k_end; ++k) {
      if (k == k_r || k == k_end) {
        const double x0 = mesh_.x_node(k);
        const double x1 = k == k_end ? mesh_.x_of(upper) : mesh_.x_node(k + 1);
        if (k == k_r && mesh_.x_of(r) < x1) {
          const double xr = mesh_.x_of(r);
          sum += piece(x0, xr, r, bracket) + piece(xr, x1, r, bracket);
        } else {
          sum += piece(x0, x1, r, bracket);
        }
        continue;
      }
      for (int i = 0; i < 8; ++i) sum += weight_[k * 8 + i] * bracket(r, node_[k * 8 + i]);
    }
    return sum;
  }

 private:
  template <class Bracket>
  double piece(double x0, double x1, double r, Bracket&& bracket) const {
    if (!(x1 > x0)) return 0.0;
    const auto& q = gauss8();
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      const double x = x0 + q.t[i] * (x1 - x0);
      const double u = mesh_.u_of(x);
      s += q.w[i] * mesh_.dudx(x) * u * f_(u) * bracket(r, u);
    }
    return s * (x1 - x0);
  }

  RadialFunction f_;
  KernelMesh mesh_;
  std::vector<double> weight_;
  std::vector<double> node_;
};

}  // namespace detail

/// (f * g)(r) for radial f, g. f should be the rougher of the two (it is
/// sampled, g is integrated cumulatively).
inline double convolve_at(const RadialFunction& f, const RadialFunction& g, const KernelMesh& mesh, double r) {
  const detail::OuterRule outer(f, mesh);
  const CumulativeIntegral gc(g, mesh);
  const double m = outer.integrate(r, std::numeric_limits<double>::infinity(),
                                   [&](double rr, double s) { return gc(rr + s) - gc(std::abs(rr - s)); });
  return 2.0 * std::numbers::pi * m / r;
}

/// (f * g) tabulated on the mesh nodes.
inline RadialTable radial_convolution(const RadialFunction& f, const RadialFunction& g, const KernelMesh& mesh) {
  const detail::OuterRule outer(f, mesh);
  const CumulativeIntegral gc(g, mesh);
  RadialTable out{mesh, Eigen::VectorXd(mesh.size())};
  for (int k = 0; k < mesh.size(); ++k) {
    const double r = mesh.node(k);
    const double m = outer.integrate(r, std::numeric_limits<double>::infinity(),
                                     [&](double rr, double s) { return gc(rr + s) - gc(std::abs(rr - s)); });
    out.values[k] = 2.0 * std::numbers::pi * m / r;
  }
  return out;
}

/// Default mesh for G_E: from 1e-9 min(1/m, 1/nu) out to 40/nu.
inline KernelMesh default_kernel_mesh(double E, double alpha) {
  const double nu = nu_of_energy(E, alpha);
  const double m = 1.0 / alpha;
  return make_kernel_mesh(1.0 / nu, 1e-9 * std::min(1.0 / m, 1.0 / nu), 40.0 / nu, 0.2);
}

/// int_0^inf s K_1(m s) e^{nu s} ds, finite for nu < m.
inline double bessel_exponential_moment(double m, double nu) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double s) {
    if (s <= 0.0) return 1.0 / m;
    if (m * s > kBesselUnderflow) return 0.0;
    return s * bessel_k(1, m * s) * std::exp(nu * s);
  });
}

struct GreensKernel {
  double E = 0.0;
  double alpha = 1.0;
  double m = 1.0;   ///< alpha^-1
  double a = 0.0;   ///< E + alpha^-1
  double nu = 0.0;
  /// C with G_E(u) <= C e^{-nu u} / (4 pi u) + (m / 2 pi^2) K_1(m u) / u.
  double bound_constant = 0.0;
  KernelMesh mesh;
  RadialTable convolution;  ///< [K_1(m|.|)/|.| * e^{-nu|.|}/(4 pi |.|)] on the mesh

  double term1(double u) const { return a * std::exp(-nu * u) / (4.0 * std::numbers::pi * u); }
  double term2(double u) const {
    return m / (2.0 * std::numbers::pi * std::numbers::pi) * bessel_k(1, m * u) / u;
  }
  double term3(double u) const {
    return a * a * m / (2.0 * std::numbers::pi * std::numbers::pi) * convolution(u);
  }
  /// term3 at mesh node k, without interpolation.
  double term3_node(int k) const {
    return a * a * m / (2.0 * std::numbers::pi * std::numbers::pi) * convolution.values[k];
  }
  double operator()(double u) const { return term1(u) + term2(u) + term3(u); }
  double est1_bound(double u) const {
    return bound_constant * std::exp(-nu * u) / (4.0 * std::numbers::pi * u) + term2(u);
  }
};

inline GreensKernel greens_kernel(double E, double alpha, std::optional<KernelMesh> mesh = std::nullopt) {
  GreensKernel k;
  k.E = E;
  k.alpha = alpha;
  k.nu = nu_of_energy(E, alpha);
  k.m = 1.0 / alpha;
  k.a = E + k.m;
  k.mesh = mesh ? *mesh : default_kernel_mesh(E, alpha);
  const double pi = std::numbers::pi;
  k.bound_constant =
      k.a + k.a * k.a * k.m / (2.0 * pi * pi) * 4.0 * pi * bessel_exponential_moment(k.m, k.nu);

  // Yukawa factor in the inner slot has Gc(v) = (1 - e^{-nu v}) / (4 pi nu),
  // so the bracket is available in closed form.
  const double m = k.m;
  const double nu = k.nu;
  const detail::OuterRule outer([m](double s) { return bessel_k(1, m * s) / s; }, k.mesh);
  auto bracket = [nu, pi](double r, double s) {
    return std::exp(-nu * std::abs(r - s)) * -std::expm1(-2.0 * nu * std::min(r, s)) / (4.0 * pi * nu);
  };
  k.convolution.mesh = k.mesh;
  k.convolution.values.resize(k.mesh.size());
  for (int j = 0; j < k.mesh.size(); ++j) {
    const double r = k.mesh.node(j);
    k.convolution.values[j] = 2.0 * pi * outer.integrate(r, std::numeric_limits<double>::infinity(), bracket) / r;
  }
  return k;
}

/// Mesh nodes with the three terms and their sum.
struct KernelSamples {
  Eigen::VectorXd u, total, term1, term2, term3;
};

inline KernelSamples sample_kernel(const GreensKernel& k) {
  const int n = k.mesh.size();
  KernelSamples s{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    const double u = k.mesh.node(j);
    s.u[j] = u;
    s.term1[j] = k.term1(u);
    s.term2[j] = k.term2(u);
    s.term3[j] = k.term3_node(j);
    s.total[j] = s.term1[j] + s.term2[j] + s.term3[j];
  }
  return s;
}

/// int_0^inf e^{beta u} G_E(u) 4 pi u^2 du for beta < nu: quadrature up to
/// u_max plus the tail of the est1 majorant.
inline double weighted_kernel_mass(const GreensKernel& k, double beta) {
  if (!(beta < k.nu)) throw DomainError("weighted mass needs beta < nu");
  const auto& q = detail::gauss8();
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int j = 0; j < k.mesh.intervals; ++j) {
    for (std::size_t i = 0; i < 8; ++i) {
      const double x = k.mesh.x_node(j) + q.t[i] * k.mesh.dx;
      const double u = k.mesh.u_of(x);
      sum += q.w[i] * k.mesh.dx * k.mesh.dudx(x) * std::exp(beta * u) * k(u) * 4.0 * pi * u * u;
    }
  }
  const double U = k.mesh.u_max();
  const double d = k.nu - beta;
  // C int_U^inf u e^{-d u} du
  double tail = k.bound_constant * std::exp(-d * U) * (U / d + 1.0 / (d * d));
  boost::math::quadrature::exp_sinh<double> integrator;
  tail += integrator.integrate([&](double t) {
    const double u = U + t;
    if (k.m * u > kBesselUnderflow) return 0.0;
    return std::exp(beta * u) * k.term2(u) * 4.0 * pi * u * u;
  });
  return sum + tail;
}

namespace detail {

/// int_0^v P(u) du for the grid function P extended oddly through r = 0
/// and by zero beyond r_max, interpolated by 4-point Lagrange per cell.
class GridCumulative {
 public:
  GridCumulative(const Eigen::VectorXd& p, const RadialGrid& grid) : grid_(grid), p_(p) {
    nodes_.resize(grid.n + 2);
    nodes_[0] = 0.0;
    for (int i = 0; i <= grid.n; ++i) nodes_[i + 1] = nodes_[i] + cell(i, 1.0);
  }

  double operator()(double v) const {
    if (v <= 0.0) return 0.0;
    if (v >= grid_.r_max) return nodes_[grid_.n + 1];
    const double xi = v / grid_.h;
    const int i = std::min(static_cast<int>(std::floor(xi)), grid_.n);
    return nodes_[i] + cell(i, xi - i);
  }

 private:
  /// P at grid index j (position j h).
  double value(int j) const {
    if (j < 0) return -value(-j);
    if (j == 0 || j > grid_.n) return 0.0;
    return p_[j - 1];
  }

  /// int_0^t over cell [i h, (i + 1) h] in units of h.
  double cell(int i, double t) const {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double wm = -(t4 / 4.0 - t3 + t2) / 6.0;
    const double w0 = (t4 / 4.0 - 2.0 * t3 / 3.0 - t2 / 2.0 + 2.0 * t) / 2.0;
    const double w1 = -(t4 / 4.0 - t3 / 3.0 - t2) / 2.0;
    const double w2 = (t4 / 4.0 - t2 / 2.0) / 6.0;
    return grid_.h * (wm * value(i - 1) + w0 * value(i) + w1 * value(i + 1) + w2 * value(i + 2));
  }

  RadialGrid grid_;
  Eigen::VectorXd p_;
  Eigen::VectorXd nodes_;
};

}  // namespace detail

/// (G_E * f)(r_i) at the grid nodes for a radial function f given by its
/// node values.
inline Eigen::VectorXd resolvent_apply(const Eigen::VectorXd& f, const GreensKernel& kernel, const RadialGrid& grid) {
  check_length(grid, f.size());
  const Eigen::VectorXd p = grid.r.cwiseProduct(f);
  const detail::GridCumulative pc(p, grid);
  const detail::OuterRule outer([&kernel](double s) { return kernel(s); }, kernel.mesh);
  Eigen::VectorXd out(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.r[i];
    const double m = outer.integrate(r, r + grid.r_max, [&](double rr, double s) { return pc(rr + s) - pc(std::abs(rr - s)); });
    out[i] = 2.0 * std::numbers::pi * m / r;
  }
  return out;
}

inline Eigen::VectorXd resolvent_apply(const Eigen::VectorXd& f, double E, double alpha, const RadialGrid& grid) {
  return resolvent_apply(f, greens_kernel(E, alpha), grid);
}

}  // namespace prhf
