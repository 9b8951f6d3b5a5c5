#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace bec {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Error categories map onto CLI exit codes (validation -> 3, numerical guard -> 4).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericalGuard : public std::runtime_error {
public:
    explicit NumericalGuard(const std::string& what) : std::runtime_error(what) {}
};

class DegeneratePoint : public NumericalGuard {
public:
    explicit DegeneratePoint(const std::string& what) : NumericalGuard(what) {}
};

// Worker count: BEC_KINETICS_THREADS if set, otherwise hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n). Results must be written to per-index slots by
// the caller so that reductions stay in a fixed order independent of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bec
