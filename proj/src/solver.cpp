#include <array>
#include <chrono>
#include <cmath>
#include <thread>

#include "parallel.hpp"
#include "scatterlab/forward.hpp"
#include "scatterlab/quadrature.hpp"
#include "scatterlab/specfun.hpp"

namespace scatterlab::forward {

namespace {

constexpr double kNearRatio = 0.7;    // accept a (sub)panel when dist >= ratio * length
constexpr double kMinParamLen = 1e-13;

cplx h1_regular(double z, cplx h1) {
  if (z >= 2.0) return h1 + kI * (2.0 / (kPi * z));
  return specfun::hankel1_regular(z);
}

// x - p.point(t) for a target at parameter tx on the same panel, without the
// absolute rounding of subtracting two nearby points.
Vec2 self_offset(const Panel& p, double tx, double t) {
  if (!p.arc) return (p.b - p.a) * (0.5 * (tx - t));
  const double h = 0.25 * (p.t1 - p.t0);
  const double thx = p.t0 + h * 2.0 * (tx + 1.0), th = p.t0 + h * 2.0 * (t + 1.0);
  const double s = 2.0 * p.radius * std::sin(h * (tx - t));
  const double m = 0.5 * (thx + th);
  return {-s * std::sin(m), s * std::cos(m)};
}

// Calls visit(t, d, nu, w) with d = x - y for an adaptive rule on panel p that
// is accurate for kernels singular at x. `split` (in (-1,1)) marks x as the
// panel point with that parameter.
template <class Visit>
void panel_quadrature(const Panel& p, Vec2 x, int n, double split, Visit&& visit) {
  const bool self = std::isfinite(split);
  const auto& g = quad::gauss_legendre(n);
  const double tp = p.closest_param(x);
  const Vec2 xp = p.point(tp);
  struct Iv { double a, b; };
  Iv stack[256];
  int top = 0;
  if (self) {
    stack[top++] = {-1.0, split};
    stack[top++] = {split, 1.0};
  } else {
    stack[top++] = {-1.0, 1.0};
  }
  while (top > 0) {
    const Iv iv = stack[--top];
    const double plen = iv.b - iv.a;
    if (plen < kMinParamLen) continue;
    double dist;
    if (tp >= iv.a && tp <= iv.b)
      dist = distance(x, xp);
    else
      dist = std::min(distance(x, p.point(iv.a)), distance(x, p.point(iv.b)));
    const double len = p.speed() * plen;
    if (dist < kNearRatio * len && top < 254) {
      double s;
      const double f = 0.42 * plen;
      if (tp > iv.a + f && tp < iv.b - f)
        s = tp;
      else if (tp - iv.a < iv.b - tp)
        s = iv.a + f;
      else
        s = iv.b - f;
      stack[top++] = {iv.a, s};
      stack[top++] = {s, iv.b};
      continue;
    }
    const double hw = 0.5 * plen;
    for (int q = 0; q < n; ++q) {
      const double t = iv.a + hw * (1.0 + g.nodes[q]);
      const Vec2 d = self ? self_offset(p, split, t) : x - p.point(t);
      visit(t, d, p.normal(t), g.weights[q] * hw * p.speed());
    }
  }
}

// Kernels of the four difference operators of the transmission system.
struct SystemKernel {
  double k, k1, gamma;

  // {gamma K_k1 - K_k, S_k - S_k1, T_k - T_k1, gamma K'_k - K'_k1}
  std::array<cplx, 4> operator()(Vec2 d, Vec2 nx, Vec2 ny) const {
    const double r = d.norm();
    const double a = dot(d, nx), b = dot(d, ny), c = dot(nx, ny);
    const auto hk = specfun::hankel01(k * r);
    const auto hq = specfun::hankel01(k1 * r);
    const cplx i4 = 0.25 * kI;
    std::array<cplx, 4> out;
    out[0] = i4 * (b / r) * (gamma * k1 * hq.h1 - k * hk.h1);
    out[1] = i4 * (hk.h0 - hq.h0);
    const cplx gk = h1_regular(k * r, hk.h1), gq = h1_regular(k1 * r, hq.h1);
    out[2] = i4 * ((k * k * hk.h0 - k1 * k1 * hq.h0) * (a * b / (r * r)) +
                   (k * gk - k1 * gq) * (c / r - 2.0 * a * b / (r * r * r)));
    out[3] = -i4 * (a / r) * (gamma * k * hk.h1 - k1 * hq.h1);
    return out;
  }
};

// Phi, d Phi / d nu_y, grad_x Phi, grad_x d Phi / d nu_y at wavenumber kappa.
struct FieldKernel {
  cplx s, dl;
  CVec2 gs, gdl;
};

FieldKernel field_kernel(double kappa, Vec2 d, Vec2 ny) {
  const double r = d.norm();
  const auto h = specfun::hankel01(kappa * r);
  const cplx ik4 = 0.25 * kI * kappa;
  FieldKernel f;
  f.s = 0.25 * kI * h.h0;
  const double b = dot(d, ny);
  const cplx fr = ik4 * h.h1 / r;
  f.dl = fr * b;
  f.gs = {-fr * d.x, -fr * d.y};
  const cplx fp = ik4 * (kappa * h.h0 / r - 2.0 * h.h1 / (r * r));
  f.gdl = {fp * (d.x / r) * b + fr * ny.x, fp * (d.y / r) * b + fr * ny.y};
  return f;
}

Eigen::MatrixXcd assemble(const BoundaryMesh& mesh, double k, double k1, double gamma, int threads) {
  const int n = mesh.order();
  const std::size_t nn = mesh.node_count();
  const auto& panels = mesh.panels();
  const auto& pts = mesh.points();
  const auto& nrm = mesh.normals();
  const auto& wts = mesh.weights();
  const auto& g = quad::gauss_legendre(n);
  const auto& interp = quad::gauss_interpolator(n);
  const SystemKernel kern{k, k1, gamma};
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * nn, 2 * nn);
  const double diag = 0.5 * (1.0 + gamma);

  detail::parallel_for(nn, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::array<cplx, 4>> acc(n);
    std::vector<double> basis(n);
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec2 x = pts[i], nx = nrm[i];
      const std::size_t own = mesh.panel_of(i);
      for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& p = panels[pi];
        const std::size_t off = pi * n;
        const bool self = pi == own;
        if (!self && p.distance_to(x) >= kNearRatio * p.length) {
          for (int j = 0; j < n; ++j) {
            const auto kv = kern(x - pts[off + j], nx, nrm[off + j]);
            const double w = wts[off + j];
            a(i, off + j) += w * kv[0];
            a(i, nn + off + j) += w * kv[1];
            a(nn + i, off + j) += -gamma * w * kv[2];
            a(nn + i, nn + off + j) += w * kv[3];
          }
          continue;
        }
        for (auto& v : acc) v = {};
        const double split = self ? g.nodes[i - off] : NAN;
        panel_quadrature(p, x, n, split, [&](double t, Vec2 d, Vec2 ny, double w) {
          const auto kv = kern(d, nx, ny);
          interp.basis(t, basis);
          for (int j = 0; j < n; ++j) {
            const double wb = w * basis[j];
            for (int m = 0; m < 4; ++m) acc[j][m] += wb * kv[m];
          }
        });
        for (int j = 0; j < n; ++j) {
          a(i, off + j) += acc[j][0];
          a(i, nn + off + j) += acc[j][1];
          a(nn + i, off + j) += -gamma * acc[j][2];
          a(nn + i, nn + off + j) += acc[j][3];
        }
      }
      a(i, i) += diag;
      a(nn + i, nn + i) += diag;
    }
  });
  return a;
}

FieldSolution vacuum_solution(const Scatterer& s, const IncidentField& inc,
                              std::shared_ptr<const BoundaryMesh> mesh) {
  const std::size_t nn = mesh->node_count();
  FieldSolution sol{s, inc, mesh, Eigen::VectorXcd(nn), Eigen::VectorXcd(nn), {}};
  for (std::size_t i = 0; i < nn; ++i) {
    sol.trace_u[i] = inc.value(mesh->points()[i]);
    sol.trace_dn[i] = dot(inc.gradient(mesh->points()[i]), mesh->normals()[i]);
  }
  sol.diagnostics.unknowns = 2 * nn;
  sol.diagnostics.condition_estimate = 1.0;
  return sol;
}

}  // namespace

std::shared_ptr<const BoundaryMesh> make_mesh(const Scatterer& s, double k, const MeshOptions& mopts) {
  const double kmax = std::max(k, s.interior_wavenumber(k));
  return std::make_shared<const BoundaryMesh>(s.shape(), kmax, mopts);
}

std::vector<FieldSolution> solve_scattering_many(const Scatterer& s,
                                                 std::span<const IncidentField> incs,
                                                 std::shared_ptr<const BoundaryMesh> mesh,
                                                 const SolveOptions& opts) {
  if (!mesh) throw ContractViolation("solve_scattering: missing mesh");
  if (incs.empty()) return {};
  const double k = incs[0].wavenumber();
  for (const auto& inc : incs)
    if (std::abs(inc.wavenumber() - k) > 1e-14 * k)
      throw ContractViolation("solve_scattering: incident fields must share k");
  const auto t_start = std::chrono::steady_clock::now();
  std::vector<FieldSolution> out;
  if (s.is_vacuum()) {
    for (const auto& inc : incs) out.push_back(vacuum_solution(s, inc, mesh));
    return out;
  }
  const double k1 = s.interior_wavenumber(k);
  const double gamma = s.gamma();
  const std::size_t nn = mesh->node_count();

  const Eigen::MatrixXcd a = assemble(*mesh, k, k1, gamma, opts.threads);
  Eigen::MatrixXcd rhs(2 * nn, static_cast<Eigen::Index>(incs.size()));
  for (std::size_t c = 0; c < incs.size(); ++c) {
    for (std::size_t i = 0; i < nn; ++i) {
      const Vec2 x = mesh->points()[i];
      rhs(i, c) = incs[c].value(x);
      rhs(nn + i, c) = gamma * dot(incs[c].gradient(x), mesh->normals()[i]);
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > opts.rcond_floor))
    throw SolverError("solve_scattering: near-singular transmission system (condition estimate " +
                          std::to_string(1.0 / rcond) + ")",
                      1.0 / rcond);
  const Eigen::MatrixXcd x = lu.solve(rhs);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  for (std::size_t c = 0; c < incs.size(); ++c) {
    const auto col = x.col(static_cast<Eigen::Index>(c));
    const double bn = rhs.col(c).norm();
    const double res = bn > 0 ? (a * col - rhs.col(c)).norm() / bn : (a * col).norm();
    if (!(res < 1e-10))
      throw SolverError("solve_scattering: linear solve residual " + std::to_string(res) +
                            " exceeds 1e-10",
                        1.0 / rcond);
    FieldSolution sol{s, incs[c], mesh, col.head(nn), col.tail(nn), {}};
    sol.diagnostics = {2 * nn, 1.0 / rcond, res, wall};
    out.push_back(std::move(sol));
  }
  return out;
}

FieldSolution solve_scattering(const Scatterer& s, const IncidentField& inc,
                               std::shared_ptr<const BoundaryMesh> mesh, const SolveOptions& opts) {
  auto v = solve_scattering_many(s, std::span<const IncidentField>(&inc, 1), std::move(mesh), opts);
  return std::move(v.front());
}

FieldSolution solve_scattering(const Scatterer& s, const IncidentField& inc, const MeshOptions& mopts,
                               const SolveOptions& opts) {
  return solve_scattering(s, inc, make_mesh(s, inc.wavenumber(), mopts), opts);
}

namespace {

// Green representation at each point. With `complement` the representation of
// the other side is used, which vanishes for exact traces (extinction).
std::vector<FieldSample> represent(const FieldSolution& sol, std::span<const Vec2> points,
                                   int threads, bool complement) {
  const auto& mesh = *sol.mesh;
  const int n = mesh.order();
  const auto& panels = mesh.panels();
  const auto& pts = mesh.points();
  const auto& nrm = mesh.normals();
  const auto& wts = mesh.weights();
  const auto& interp = quad::gauss_interpolator(n);
  const double k = sol.wavenumber();
  const double k1 = sol.interior_wavenumber();
  const double gamma = sol.scatterer.gamma();
  const bool vacuum = sol.scatterer.is_vacuum();
  std::vector<FieldSample> out(points.size());

  detail::parallel_for(points.size(), threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> basis(n);
    for (std::size_t pi_ = lo; pi_ < hi; ++pi_) {
      const Vec2 x = points[pi_];
      FieldSample fs;
      fs.inside = shape_contains(mesh.shape(), x);
      double dmin = 1e300, local = 0;
      for (const auto& p : panels) {
        const double d = p.distance_to(x);
        if (d < dmin) { dmin = d; local = p.length; }
      }
      fs.near_boundary = dmin < local;
      if (vacuum) {
        if (!complement) {
          fs.value = sol.incident.value(x);
          fs.gradient = sol.incident.gradient(x);
        }
        out[pi_] = fs;
        continue;
      }
      const bool interior_rep = fs.inside != complement;
      const double kappa = interior_rep ? k1 : k;
      // u = cd * D phi + cs * S psi
      const double cd = interior_rep ? -1.0 : 1.0;
      const double cs = interior_rep ? 1.0 / gamma : -1.0;
      cplx u = 0;
      CVec2 gu;
      auto add = [&](const FieldKernel& f, cplx phi, cplx psi, double w) {
        const cplx a = w * cd * phi, b = w * cs * psi;
        u += a * f.dl + b * f.s;
        gu.x += a * f.gdl.x + b * f.gs.x;
        gu.y += a * f.gdl.y + b * f.gs.y;
      };
      for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& p = panels[pi];
        const std::size_t off = pi * n;
        if (p.distance_to(x) >= kNearRatio * p.length) {
          for (int j = 0; j < n; ++j)
            add(field_kernel(kappa, x - pts[off + j], nrm[off + j]), sol.trace_u[off + j],
                sol.trace_dn[off + j], wts[off + j]);
          continue;
        }
        panel_quadrature(p, x, n, NAN, [&](double t, Vec2 d, Vec2 ny, double w) {
          interp.basis(t, basis);
          cplx phi = 0, psi = 0;
          for (int j = 0; j < n; ++j) {
            phi += basis[j] * sol.trace_u[off + j];
            psi += basis[j] * sol.trace_dn[off + j];
          }
          if (d.norm2() > 0) add(field_kernel(kappa, d, ny), phi, psi, w);
        });
      }
      if (!interior_rep) {
        u += sol.incident.value(x);
        const CVec2 gi = sol.incident.gradient(x);
        gu.x += gi.x;
        gu.y += gi.y;
      }
      fs.value = u;
      fs.gradient = gu;
      out[pi_] = fs;
    }
  });
  return out;
}

}  // namespace

std::vector<FieldSample> evaluate_field(const FieldSolution& sol, std::span<const Vec2> points,
                                       int threads) {
  return represent(sol, points, threads, false);
}

std::vector<FieldSample> null_field(const FieldSolution& sol, std::span<const Vec2> points,
                                    int threads) {
  return represent(sol, points, threads, true);
}

std::vector<cplx> scattered_field(const FieldSolution& sol, std::span<const Vec2> points) {
  const auto f = evaluate_field(sol, points);
  std::vector<cplx> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (f[i].inside) throw ContractViolation("scattered_field: point inside the scatterer");
    out[i] = f[i].value - sol.incident.value(points[i]);
  }
  return out;
}

FarFieldPattern far_field(const FieldSolution& sol, std::size_t n) {
  if (n < 64 || n % 2 != 0) throw DomainError("far_field: N must be even and >= 64");
  FarFieldPattern p;
  p.k = sol.wavenumber();
  p.values.assign(n, 0.0);
  if (sol.scatterer.is_vacuum()) return p;
  const auto& mesh = *sol.mesh;
  const double k = p.k;
  const cplx pre = std::exp(kI * (kPi / 4)) / std::sqrt(8.0 * kPi * k);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 xh = polar(1.0, p.angle(j));
    cplx s = 0;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
      const Vec2 y = mesh.points()[i];
      const cplx e = std::exp(-kI * (k * dot(xh, y)));
      s += mesh.weights()[i] * (-kI * k * dot(xh, mesh.normals()[i]) * sol.trace_u[i] - sol.trace_dn[i]) * e;
    }
    p.values[j] = pre * s;
  }
  return p;
}

}  // namespace scatterlab::forward
