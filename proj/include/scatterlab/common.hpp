#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace scatterlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Absolute tolerance for every geometric predicate, in model length units.
inline constexpr double kGeomTol = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
  Vec2 unit() const { const double n = norm(); return {x / n, y / n}; }
  // Counterclockwise rotation by 90 degrees.
  constexpr Vec2 perp() const { return {-y, x}; }
  double angle() const { return std::atan2(y, x); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

// Complex 2-vector, used for field gradients and the CGO wave vector.
struct CVec2 {
  cplx x{};
  cplx y{};
};

inline cplx dot(CVec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Error categories. The numeric values double as CLI exit codes where the
// command-line contract fixes one (config 2, solver 3, contract 4).
enum class ErrorCode : int {
  ok = 0,
  io = 1,
  config = 2,
  solver = 3,
  contract = 4,
  domain = 5,
  degenerate_geometry = 6,
  range = 7,
  internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct SolverError : Error {
  SolverError(const std::string& w, double condition = 0.0)
      : Error(ErrorCode::solver, w), condition_estimate(condition) {}
  double condition_estimate;
};
struct ContractViolation : Error {
  explicit ContractViolation(const std::string& w) : Error(ErrorCode::contract, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::domain, w) {}
};
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error(ErrorCode::range, w) {}
};
struct DegenerateGeometry : Error {
  explicit DegenerateGeometry(const std::string& w) : Error(ErrorCode::degenerate_geometry, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

}  // namespace scatterlab
