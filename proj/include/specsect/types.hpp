#ifndef SPECSECT_TYPES_HPP
#define SPECSECT_TYPES_HPP

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace specsect {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Error with a machine-readable reason code; the CLI forwards `code`
/// into the JSON "reason" field.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Centralized tolerance defaults, overridable per call site.
struct Tolerances {
    double hermiticity = 1e-10;     // ||A - A*||
    double idempotency = 1e-8;      // ||P^2 - P||
    double gap = 1e-9;              // endpoint collision guard
    double unitarity = 1e-10;       // ||U*U - 1||
    double inverse_margin = 1e-12;  // spectral radius margin for f^{-1}
    double inclusion = 1e-8;        // range inclusion checks
    double invertibility = 1e-9;    // relative, min |eig| > tol*(1+||A||)
    double gss_eps = 1e-6;          // tail singular value bound
};

enum class TailKind { PositiveGrowth, NegativeGrowth, MixedSigned };

/// Asymptotic spectral behaviour beyond the truncation window: the
/// (N+i)-th mode has magnitude rate(i) -> infinity, signs per `kind`
/// (MixedSigned alternates, even index positive).
struct TailDescriptor {
    TailKind kind = TailKind::PositiveGrowth;
    double exponent = 1.0;  // |lambda_{N+i}| ~ (N+i)^exponent

    double magnitude(int dim, int index_beyond) const {
        return std::pow(static_cast<double>(dim + index_beyond), exponent);
    }

    bool operator==(const TailDescriptor& o) const {
        return kind == o.kind && exponent == o.exponent;
    }
};

/// Finite Hermitian model of a regular self-adjoint operator with
/// compact resolvents; the tail gives the truncation its semantics.
struct TruncatedOperator {
    int dim = 0;
    Matrix entries;
    TailDescriptor tail;

    TruncatedOperator() = default;
    TruncatedOperator(Matrix m, TailDescriptor t)
        : dim(static_cast<int>(m.rows())), entries(std::move(m)), tail(t) {}
};

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // unitary, columns match eigenvalues
};

enum class TailType { Zero, Identity };

struct ProjectionMatrix {
    Matrix entries;
    TailType tail_type = TailType::Zero;
    double tolerance = 1e-8;
};

struct IntervalSpec {
    double lower = -kInf;
    double upper = kInf;
    bool closed_lower = true;
    bool closed_upper = true;

    bool contains(double x) const {
        if (x < lower || x > upper) return false;
        if (x == lower && !closed_lower) return false;
        if (x == upper && !closed_upper) return false;
        return true;
    }
};

}  // namespace specsect

#endif
