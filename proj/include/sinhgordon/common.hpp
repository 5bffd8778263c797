#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sg {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd I{0.0, 1.0};

// Errors are split into two families so the CLI can map them to exit codes.
enum class ErrorKind { domain, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(k), name_(name) {}
    ErrorKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
private:
    ErrorKind kind_;
    std::string name_;
};

#define SG_ERROR(Name, Kind)                                                    \
    struct Name : Error {                                                      \
        explicit Name(const std::string& w) : Error(ErrorKind::Kind, #Name, w) {} \
    }

SG_ERROR(DomainError, domain);
SG_ERROR(MembershipError, domain);
SG_ERROR(ClassError, domain);
SG_ERROR(GridTooSmallError, domain);
SG_ERROR(PoleError, domain);
SG_ERROR(DegenerateLatticeError, domain);
SG_ERROR(AmbiguousRootError, numerical);
SG_ERROR(StepCollapseError, numerical);
SG_ERROR(IllConditionedError, numerical);
SG_ERROR(BranchCollisionError, numerical);
SG_ERROR(SingularSystemError, numerical);
SG_ERROR(PathIntegrationError, numerical);
SG_ERROR(ClosingViolationError, numerical);
SG_ERROR(DegenerateFrameError, numerical);
SG_ERROR(FitResidualError, numerical);

#undef SG_ERROR

inline double sqr(double x) { return x * x; }

// quaternion j in the 2x2 complex model
inline Mat2 quat_j() {
    Mat2 j;
    j << 0.0, 1.0, -1.0, 0.0;
    return j;
}

// 2x2 complex matrix of the quaternion whose first column is v
inline Mat2 quat_from_column(const Vec2& v) {
    Mat2 q;
    q << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
    return q;
}

// squared quaternion norm; equals det for matrices of the form above
inline double quat_norm2(const Mat2& q) {
    return std::norm(q(0, 0)) + std::norm(q(1, 0));
}

// Euclidean inner product on H = R^4
inline double quat_dot(const Mat2& a, const Mat2& b) {
    return std::real(std::conj(a(0, 0)) * b(0, 0) + std::conj(a(1, 0)) * b(1, 0));
}

} // namespace sg
