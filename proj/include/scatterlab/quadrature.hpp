#pragma once

#include <span>
#include <vector>

namespace scatterlab::quad {

// Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Cached per order; the returned reference stays valid for the program lifetime.
const Rule& gauss_legendre(int n);

// Rule mapped to [a, b].
Rule gauss_on(double a, double b, int n);

// Composite rule on [a, b] with panels shrinking geometrically toward the
// listed end(s); used for integrands with an endpoint singularity.
// `levels` extra panels are added with ratio `ratio` toward each graded end.
Rule graded_on(double a, double b, int n, int levels, bool grade_left, bool grade_right,
               double ratio = 0.25);

// Barycentric Lagrange interpolation on arbitrary distinct nodes.
class Interpolator {
 public:
  explicit Interpolator(std::span<const double> nodes);
  // Writes the Lagrange basis values l_j(t) into `out` (size = number of nodes).
  void basis(double t, std::span<double> out) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;
};

const Interpolator& gauss_interpolator(int n);

}  // namespace scatterlab::quad
