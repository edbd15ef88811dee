#include <cmath>
#include <fstream>
#include <sstream>

#include "scatterlab/forward.hpp"
#include "scatterlab/io.hpp"
#include "scatterlab/specfun.hpp"

namespace scatterlab::forward {

double FarFieldPattern::l2_norm() const {
  double s = 0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * 2.0 * kPi / values.size());
}

cplx FarFieldPattern::interpolate(double theta) const {
  // Direct DFT; the Nyquist mode is split symmetrically so real data stay real.
  const std::size_t n = values.size();
  const long half = static_cast<long>(n / 2);
  cplx s = 0;
  for (long m = -half; m <= half; ++m) {
    cplx c = 0;
    for (std::size_t j = 0; j < n; ++j) c += values[j] * std::exp(-kI * (double(m) * angle(j)));
    c /= double(n);
    const double w = (std::abs(m) == half && n % 2 == 0) ? 0.5 : 1.0;
    s += w * c * std::exp(kI * (double(m) * theta));
  }
  return s;
}

FarFieldPattern FarFieldPattern::resampled(std::size_t n) const {
  if (n == values.size()) return *this;
  const std::size_t src = values.size();
  const long half = static_cast<long>(src / 2);
  std::vector<cplx> coef(2 * half + 1);
  for (long m = -half; m <= half; ++m) {
    cplx c = 0;
    for (std::size_t j = 0; j < src; ++j) c += values[j] * std::exp(-kI * (double(m) * angle(j)));
    coef[m + half] = c / double(src) * ((std::abs(m) == half) ? 0.5 : 1.0);
  }
  FarFieldPattern out{k, std::vector<cplx>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const double th = out.angle(j);
    cplx s = 0;
    for (long m = -half; m <= half; ++m) s += coef[m + half] * std::exp(kI * (double(m) * th));
    out.values[j] = s;
  }
  return out;
}

double farfield_l2_distance(const FarFieldPattern& p, const FarFieldPattern& q) {
  if (p.values.empty() || q.values.empty()) throw ContractViolation("farfield_l2_distance: empty pattern");
  if (std::abs(p.k - q.k) > 1e-12 * std::max(p.k, q.k))
    throw ContractViolation("farfield_l2_distance: patterns have different wavenumbers");
  const std::size_t n = std::max(p.size(), q.size());
  const FarFieldPattern a = p.resampled(n), b = q.resampled(n);
  double s = 0;
  for (std::size_t j = 0; j < n; ++j) s += std::norm(a.values[j] - b.values[j]);
  return std::sqrt(s * 2.0 * kPi / n);
}

void write_farfield_csv(const std::string& path, const FarFieldPattern& p) {
  std::string s = "theta,re,im\n";
  for (std::size_t j = 0; j < p.size(); ++j)
    s += io::csv_row({p.angle(j), p.values[j].real(), p.values[j].imag()});
  io::atomic_write(path, s);
}

FarFieldPattern read_farfield_csv(const std::string& path, double k) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  std::string line;
  std::getline(f, line);
  if (line != "theta,re,im") throw IoError(path + ": expected header theta,re,im");
  FarFieldPattern p{k, {}};
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double th, re, im;
    char c1, c2;
    if (!(ss >> th >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw IoError(path + ": malformed row '" + line + "'");
    p.values.emplace_back(re, im);
  }
  return p;
}

// ---- disk series ----------------------------------------------------------

DiskSeries::DiskSeries(double radius, double gamma, double q, double k, double incidence_angle,
                       int max_order)
    : radius_(radius), gamma_(gamma), k_(k), k1_(k * std::sqrt(q / gamma)), alpha_(incidence_angle) {
  if (!(radius > 0 && gamma > 0 && q > 0 && k > 0)) throw DomainError("disk series: parameters must be > 0");
  nmax_ = max_order >= 0
              ? max_order
              : 12 + static_cast<int>(std::ceil(1.5 * std::max(k_, k1_) * radius));
  a_.resize(nmax_ + 1);
  b_.resize(nmax_ + 1);
  const double x = k_ * radius, x1 = k1_ * radius;
  for (int n = 0; n <= nmax_; ++n) {
    const cplx in = std::pow(kI, n);
    const double j = specfun::bessel_j(n, x), jp = specfun::bessel_j_prime(n, x);
    const double j1 = specfun::bessel_j(n, x1), j1p = specfun::bessel_j_prime(n, x1);
    const cplx h = specfun::hankel1(n, x), hp = specfun::hankel1_prime(n, x);
    // [J_n(k1 r), -H_n(k r); gamma k1 J_n'(k1 r), -k H_n'(k r)] [a; b] = i^n [J_n(k r); k J_n'(k r)]
    const cplx m11 = j1, m12 = -h, m21 = gamma * k1_ * j1p, m22 = -k_ * hp;
    const cplx r1 = in * j, r2 = in * k_ * jp;
    const cplx det = m11 * m22 - m12 * m21;
    a_[n] = (r1 * m22 - m12 * r2) / det;
    b_[n] = (m11 * r2 - m21 * r1) / det;
  }
}

cplx DiskSeries::total_field(Vec2 x) const {
  const double r = x.norm(), th = x.angle();
  if (r >= radius_) return std::exp(kI * (k_ * r * std::cos(th - alpha_))) + scattered_field(x);
  cplx s = 0;
  for (int n = 0; n <= nmax_; ++n) {
    const double c = n == 0 ? 1.0 : 2.0 * std::cos(n * (th - alpha_));
    s += a_[n] * specfun::bessel_j(n, k1_ * r) * c;
  }
  return s;
}

cplx DiskSeries::scattered_field(Vec2 x) const {
  const double r = x.norm(), th = x.angle();
  if (r < radius_) throw DomainError("disk series: scattered field requested inside the disk");
  cplx s = 0;
  for (int n = 0; n <= nmax_; ++n) {
    const double c = n == 0 ? 1.0 : 2.0 * std::cos(n * (th - alpha_));
    s += b_[n] * specfun::hankel1(n, k_ * r) * c;
  }
  return s;
}

cplx DiskSeries::far_field(double theta) const {
  cplx s = 0;
  for (int n = 0; n <= nmax_; ++n) {
    const double c = n == 0 ? 1.0 : 2.0 * std::cos(n * (theta - alpha_));
    s += b_[n] * std::pow(-kI, n) * c;
  }
  return std::sqrt(2.0 / (kPi * k_)) * std::exp(-kI * (kPi / 4)) * s;
}

FarFieldPattern DiskSeries::far_field_pattern(std::size_t n) const {
  FarFieldPattern p{k_, std::vector<cplx>(n)};
  for (std::size_t j = 0; j < n; ++j) p.values[j] = far_field(p.angle(j));
  return p;
}

cplx DiskSeries::boundary_dn(double theta) const {
  const double x = k_ * radius_;
  cplx s = 0;
  for (int n = 0; n <= nmax_; ++n) {
    const double c = n == 0 ? 1.0 : 2.0 * std::cos(n * (theta - alpha_));
    s += (std::pow(kI, n) * k_ * specfun::bessel_j_prime(n, x) + b_[n] * k_ * specfun::hankel1_prime(n, x)) * c;
  }
  return s;
}

}  // namespace scatterlab::forward
