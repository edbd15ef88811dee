#include "scatterlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "scatterlab/common.hpp"

namespace scatterlab::quad {

namespace {

Rule compute_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

template <class T, class Make>
const T& cached(std::map<int, std::unique_ptr<T>>& cache, std::mutex& m, int n, Make make) {
  std::lock_guard lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<T>(make())).first;
  return *it->second;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex m;
  return cached(cache, m, n, [n] { return compute_gauss_legendre(n); });
}

Rule gauss_on(double a, double b, int n) {
  const Rule& g = gauss_legendre(n);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * g.nodes[i];
    r.weights[i] = half * g.weights[i];
  }
  return r;
}

Rule graded_on(double a, double b, int n, int levels, bool grade_left, bool grade_right,
               double ratio) {
  // breakpoints in [0, 1], graded toward the requested end(s)
  std::vector<double> brk{0.0, 1.0};
  auto grade = [&](bool left) {
    std::vector<double> out;
    double lo = left ? 0.0 : 1.0;
    double width = (grade_left && grade_right) ? 0.5 : 1.0;
    for (int l = 1; l <= levels; ++l) {
      width *= ratio;
      out.push_back(left ? lo + width : lo - width);
    }
    return out;
  };
  if (grade_left && grade_right) brk.push_back(0.5);
  if (grade_left)
    for (double t : grade(true)) brk.push_back(t);
  if (grade_right)
    for (double t : grade(false)) brk.push_back(t);
  std::sort(brk.begin(), brk.end());
  Rule r;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const Rule p = gauss_on(a + (b - a) * brk[i], a + (b - a) * brk[i + 1], n);
    r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
    r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
  }
  return r;
}

Interpolator::Interpolator(std::span<const double> nodes) : nodes_(nodes.begin(), nodes.end()) {
  const std::size_t n = nodes_.size();
  bary_.assign(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) bary_[j] /= (nodes_[j] - nodes_[k]);
}

void Interpolator::basis(double t, std::span<double> out) const {
  const std::size_t n = nodes_.size();
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = t - nodes_[j];
    if (d == 0.0) {
      for (std::size_t k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
    out[j] = bary_[j] / d;
    denom += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
}

const Interpolator& gauss_interpolator(int n) {
  static std::map<int, std::unique_ptr<Interpolator>> cache;
  static std::mutex m;
  return cached(cache, m, n, [n] { return Interpolator(gauss_legendre(n).nodes); });
}

}  // namespace scatterlab::quad
