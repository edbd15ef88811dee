#include "scatterlab/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scatterlab/io.hpp"
#include "scatterlab/specfun.hpp"

namespace scatterlab::herglotz {

HerglotzDensity::HerglotzDensity(std::vector<cplx> values) : values_(std::move(values)) {
  if (values_.size() < 32 || values_.size() % 2 != 0)
    throw DomainError("herglotz density: M must be even and >= 32 (got " +
                      std::to_string(values_.size()) + ")");
}

HerglotzDensity HerglotzDensity::zero(std::size_t m) { return HerglotzDensity(std::vector<cplx>(m)); }

HerglotzDensity HerglotzDensity::trigonometric(std::size_t m,
                                               std::span<const std::pair<int, cplx>> modes) {
  std::vector<cplx> v(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = 2.0 * kPi * j / m;
    for (const auto& [n, c] : modes) v[j] += c * std::exp(kI * (double(n) * t));
  }
  return HerglotzDensity(std::move(v));
}

double HerglotzDensity::l2_norm() const {
  double s = 0;
  for (const auto& g : values_) s += std::norm(g);
  return std::sqrt(s * 2.0 * kPi / values_.size());
}

cplx herglotz_wave(const HerglotzDensity& g, double k, Vec2 x) {
  const std::size_t m = g.size();
  cplx s = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = g.angle(j);
    s += g.values()[j] * std::exp(kI * (k * (x.x * std::cos(t) + x.y * std::sin(t))));
  }
  return s * (2.0 * kPi / m);
}

std::vector<cplx> herglotz_wave(const HerglotzDensity& g, double k, std::span<const Vec2> points) {
  std::vector<cplx> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = herglotz_wave(g, k, points[i]);
  return out;
}

// ---- grid -----------------------------------------------------------------

GridSamples GridSamples::on_polygon(const geometry::Polygon& d, double spacing) {
  if (!(spacing > 0)) throw DomainError("grid: spacing must be > 0");
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Vec2& v : d.vertices()) {
    x0 = std::min(x0, v.x);
    y0 = std::min(y0, v.y);
    x1 = std::max(x1, v.x);
    y1 = std::max(y1, v.y);
  }
  GridSamples g;
  g.spacing = spacing;
  g.origin = {x0, y0};
  g.nx = static_cast<int>(std::floor((x1 - x0) / spacing)) + 1;
  g.ny = static_cast<int>(std::floor((y1 - y0) / spacing)) + 1;
  g.mask.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
  g.values.assign(g.mask.size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 p = g.point(i, j);
      // strictly inside, away from the edges by a hair
      if (d.contains(p) && d.boundary_distance(p) > 1e-9) g.mask[g.index(i, j)] = 1;
    }
  if (g.masked_count() < 4) throw DomainError("grid: fewer than 4 nodes inside the polygon");
  return g;
}

std::vector<Vec2> GridSamples::masked_points() const {
  std::vector<Vec2> p;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (mask[index(i, j)]) p.push_back(point(i, j));
  return p;
}

std::size_t GridSamples::masked_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

void GridSamples::sample(const std::function<cplx(Vec2)>& f) {
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (mask[index(i, j)]) values[index(i, j)] = f(point(i, j));
}

void GridSamples::sample(const std::function<std::vector<cplx>(std::span<const Vec2>)>& f) {
  const auto pts = masked_points();
  const auto v = f(pts);
  if (v.size() != pts.size()) throw ContractViolation("grid: evaluator returned wrong size");
  std::size_t c = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (mask[index(i, j)]) values[index(i, j)] = v[c++];
}

namespace {

// Rows of the H1 surrogate: (node weight h) values, then unit-weight differences.
struct Rows {
  std::vector<std::array<std::size_t, 2>> pairs;  // {a, b}; a == b marks a value row
};

Rows h1_rows(const GridSamples& g) {
  Rows r;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t a = g.index(i, j);
      if (!g.mask[a]) continue;
      r.pairs.push_back({a, a});
      if (i + 1 < g.nx && g.mask[g.index(i + 1, j)]) r.pairs.push_back({a, g.index(i + 1, j)});
      if (j + 1 < g.ny && g.mask[g.index(i, j + 1)]) r.pairs.push_back({a, g.index(i, j + 1)});
    }
  return r;
}

}  // namespace

double GridSamples::h1_norm() const {
  double s = 0;
  for (const auto& [a, b] : h1_rows(*this).pairs)
    s += a == b ? spacing * spacing * std::norm(values[a]) : std::norm(values[b] - values[a]);
  return std::sqrt(s);
}

// ---- fit ------------------------------------------------------------------

HerglotzFitter::HerglotzFitter(const GridSamples& target, double k, std::size_t m) : m_(m) {
  if (m < 32 || m % 2) throw DomainError("herglotz fit: M must be even and >= 32");
  if (!(k > 0)) throw DomainError("herglotz fit: k must be > 0");
  const auto rows = h1_rows(target);
  const std::size_t nr = rows.pairs.size();
  // plane waves at every grid node, scaled so that ||c||_2 = ||g||_{L2}
  const double cw = std::sqrt(2.0 * kPi / m);
  Eigen::MatrixXcd waves(target.mask.size(), m);
  for (int j = 0; j < target.ny; ++j)
    for (int i = 0; i < target.nx; ++i) {
      const std::size_t a = target.index(i, j);
      if (!target.mask[a]) continue;
      const Vec2 x = target.point(i, j);
      for (std::size_t q = 0; q < m; ++q) {
        const double t = 2.0 * kPi * q / m;
        waves(a, q) = cw * std::exp(kI * (k * (x.x * std::cos(t) + x.y * std::sin(t))));
      }
    }
  Eigen::MatrixXcd a(nr, m);
  Eigen::VectorXcd b(nr);
  const double h = target.spacing;
  for (std::size_t r = 0; r < nr; ++r) {
    const auto [p, q] = rows.pairs[r];
    if (p == q) {
      a.row(r) = h * waves.row(p);
      b[r] = h * target.values[p];
    } else {
      a.row(r) = waves.row(q) - waves.row(p);
      b[r] = target.values[q] - target.values[p];
    }
  }
  target_norm_ = b.norm();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u_ = svd.matrixU();
  s_ = svd.singularValues();
  v_ = svd.matrixV();
  ub_ = u_.adjoint() * b;
  // misfit = SVD-basis part + the component of b outside range(A)
  residual_perp_ = (b - u_ * ub_).norm();
}

HerglotzFit HerglotzFitter::fit(double lambda, double requested_eps) const {
  if (!(lambda > 0)) throw DomainError("herglotz fit: lambda must be > 0");
  const Eigen::Index n = s_.size();
  Eigen::VectorXcd coef(n);
  double mis = residual_perp_ * residual_perp_;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = s_[i];
    coef[i] = ub_[i] * (s / (s * s + lambda));
    mis += std::norm(ub_[i] * (lambda / (s * s + lambda)));
  }
  const Eigen::VectorXcd c = v_ * coef;
  const double cw = std::sqrt(2.0 * kPi / m_);
  std::vector<cplx> g(m_);
  for (std::size_t j = 0; j < m_; ++j) g[j] = c[j] / cw;
  HerglotzFit f{HerglotzDensity(std::move(g)), std::sqrt(mis), c.norm(), lambda, true};
  if (requested_eps > 0 && f.epsilon > requested_eps) f.achieved = false;
  return f;
}

HerglotzFit herglotz_density_fit(const GridSamples& target, double k, double lambda, std::size_t m,
                                 double requested_eps) {
  if (!(lambda > 0)) throw DomainError("herglotz fit: lambda must be > 0");
  return HerglotzFitter(target, k, m).fit(lambda, requested_eps);
}

// ---- disk eigenvalues -------------------------------------------------------

double disk_transmission_determinant(int n, double k, double radius, double gamma, double q) {
  const double k1 = k * std::sqrt(q / gamma);
  const double x = k * radius, x1 = k1 * radius;
  return gamma * k1 * specfun::bessel_j_prime(n, x1) * specfun::bessel_j(n, x) -
         k * specfun::bessel_j(n, x1) * specfun::bessel_j_prime(n, x);
}

std::vector<EigenPair> disk_transmission_eigenvalues(double radius, double gamma, double q,
                                                     double k_lo, double k_hi, int n_lo, int n_hi,
                                                     int samples) {
  if (gamma == 1.0 && q == 1.0) throw DomainError("disk eigenvalues: need gamma != 1 or q != 1");
  if (!(radius > 0 && gamma > 0 && q > 0)) throw DomainError("disk eigenvalues: parameters must be > 0");
  if (!(k_lo > 0 && k_hi > k_lo)) throw DomainError("disk eigenvalues: need 0 < k_lo < k_hi");
  if (n_lo < 0 || n_hi < n_lo) throw DomainError("disk eigenvalues: bad mode range");
  if (samples < 2) throw DomainError("disk eigenvalues: samples must be >= 2");
  std::vector<EigenPair> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    auto det = [&](double k) { return disk_transmission_determinant(n, k, radius, gamma, q); };
    double kp = k_lo, fp = det(k_lo);
    for (int i = 1; i <= samples; ++i) {
      const double kk = k_lo + (k_hi - k_lo) * i / samples;
      const double fk = det(kk);
      if (fp != 0 && fk != 0 && (fp < 0) != (fk < 0)) {
        double lo = kp, hi = kk, flo = fp;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double fm = det(mid);
          if (fm == 0) { lo = hi = mid; break; }
          if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; } else { hi = mid; }
        }
        EigenPair e;
        e.k = 0.5 * (lo + hi);
        e.mode = n;
        e.radius = radius;
        e.gamma = gamma;
        e.q = q;
        e.determinant = det(e.k);
        e.local_scale = std::max(std::abs(fp), std::abs(fk));
        for (int s = 1; s < 16; ++s) e.local_scale = std::max(e.local_scale, std::abs(det(kp + (kk - kp) * s / 16)));
        out.push_back(e);
      }
      kp = kk;
      fp = fk;
    }
  }
  return out;
}

// ---- Hoelder probe ----------------------------------------------------------

namespace {

HolderTable holder_impl(const std::function<std::vector<cplx>(std::span<const Vec2>, bool&)>& f,
                        const geometry::CornerFrame& frame, double eta, const HolderSchedule& sc) {
  if (!(eta > 0 && eta <= 1)) throw DomainError("holder probe: eta must lie in (0, 1]");
  if (sc.count < 2 || sc.angles < 2 || !(sc.scale0 > 0) || !(sc.ratio > 0 && sc.ratio < 1))
    throw DomainError("holder probe: bad schedule");
  HolderTable t;
  const double tm = frame.theta_minus, a = frame.opening;
  double s = sc.scale0;
  for (int m = 0; m < sc.count; ++m, s *= sc.ratio) {
    // points on the arc r = s and the arc r = s/2 at interior directions
    std::vector<Vec2> pts;
    for (int j = 0; j < sc.angles; ++j) {
      const double th = tm + a * (j + 1) / (sc.angles + 1);
      pts.push_back(frame.from_frame(polar(s, th)));
      pts.push_back(frame.from_frame(polar(0.5 * s, th)));
    }
    bool degraded = false;
    const auto v = f(pts, degraded);
    t.degraded_accuracy = t.degraded_accuracy || degraded;
    double q = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        q = std::max(q, std::abs(v[i] - v[j]) / std::pow(distance(pts[i], pts[j]), eta));
    t.rows.push_back({s, q});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : t.rows) {
    if (!(r.quotient > 0)) continue;
    const double x = std::log(r.scale), y = std::log(r.quotient);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  t.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return t;
}

}  // namespace

HolderTable holder_quotient_probe(const corner::FieldEvaluator& f, const geometry::CornerFrame& frame,
                                  double eta, const HolderSchedule& sched) {
  return holder_impl([&](std::span<const Vec2> p, bool&) { return f(p); }, frame, eta, sched);
}

HolderTable holder_quotient_probe(const forward::FieldSolution& sol,
                                  const geometry::CornerFrame& frame, double eta,
                                  const HolderSchedule& sched) {
  return holder_impl(
      [&](std::span<const Vec2> p, bool& degraded) {
        const auto fs = forward::evaluate_field(sol, p);
        std::vector<cplx> v(fs.size());
        for (std::size_t i = 0; i < fs.size(); ++i) {
          v[i] = fs[i].value;
          degraded = degraded || fs[i].near_boundary;
        }
        return v;
      },
      frame, eta, sched);
}

// ---- files ----------------------------------------------------------------

void write_density_csv(const std::string& path, const HerglotzDensity& g) {
  std::string s = "theta,re,im\n";
  for (std::size_t j = 0; j < g.size(); ++j)
    s += io::csv_row({g.angle(j), g.values()[j].real(), g.values()[j].imag()});
  io::atomic_write(path, s);
}

HerglotzDensity read_density_csv(const std::string& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  std::getline(in, line);
  if (line != "theta,re,im") throw IoError(path + ": expected header theta,re,im");
  std::vector<cplx> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double th, re, im;
    char c1, c2;
    if (!(ss >> th >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw IoError(path + ": malformed row '" + line + "'");
    v.emplace_back(re, im);
  }
  return HerglotzDensity(std::move(v));
}

void write_blowup_csv(const std::string& path, std::span<const BlowupRow> rows) {
  std::string s = "lambda,epsilon,g_norm\n";
  for (const auto& r : rows) s += io::csv_row({r.lambda, r.epsilon, r.g_norm});
  io::atomic_write(path, s);
}

}  // namespace scatterlab::herglotz
