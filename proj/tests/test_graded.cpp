#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "specsect/graded.hpp"
#include "test_helpers.hpp"

using namespace specsect;
using testutil::diag_real;
using testutil::random_hermitian;

namespace {

Matrix random_complex(int rows, int cols, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

SymbolSample pauli_symbol(const Matrix& g) {
    SymbolPoint pt;
    pt.tag = "p0";
    pt.coeffs = {Matrix(g * pauli_x()), Matrix(g * pauli_y())};
    return SymbolSample{{pt}};
}

}  // namespace

TEST_CASE("hat of a scalar and of a rectangular zero block") {
    Matrix a(1, 1);
    a(0, 0) = Complex(2.0, 1.0);
    const auto odd = hat(a);
    CHECK(odd.base.dim == 2);
    CHECK(odd.base.entries(1, 0) == a(0, 0));
    CHECK(odd.base.entries(0, 1) == std::conj(a(0, 0)));
    odd.validate();

    const auto z = hat(Matrix::Zero(2, 3));
    CHECK(z.base.dim == 5);
    CHECK(op_norm(z.base.entries) == doctest::Approx(0.0));
    CHECK(op_norm(Matrix(z.grading.sigma -
                         diag_real({1.0, 1.0, 1.0, -1.0, -1.0}))) < 1e-14);
}

TEST_CASE("odd operators have symmetric spectra") {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const auto odd = hat(random_complex(4, 3, rng));
        const auto d = eig(odd.base);
        const int n = odd.base.dim;
        for (int i = 0; i < n; ++i)
            CHECK(d.eigenvalues(i) == doctest::Approx(-d.eigenvalues(n - 1 - i))
                                          .epsilon(1e-8));
    }
}

TEST_CASE("nu reads the unitary off the graded blocks") {
    const Grading g = Grading::from_matrix(diag_real({1.0, -1.0}));
    Matrix p(2, 2);
    p << Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0);
    const Matrix v = nu({p, TailType::Zero, 1e-8}, g);
    CHECK(std::abs(v(0, 0) - Complex(1.0, 0.0)) < 1e-12);

    Matrix p2(2, 2);
    p2 << Complex(0.5, 0), Complex(0, -0.5), Complex(0, 0.5), Complex(0.5, 0);
    const Matrix v2 = nu({p2, TailType::Zero, 1e-8}, g);
    CHECK(std::abs(v2(0, 0) - Complex(0.0, 1.0)) < 1e-12);
}

TEST_CASE("nu rejects a projection commuting with the grading") {
    const Grading g = Grading::from_matrix(diag_real({1.0, -1.0}));
    CHECK_THROWS_AS((void)nu({diag_real({1.0, 0.0}), TailType::Zero, 1e-8}, g), Error);
}

TEST_CASE("nu round trips in both directions") {
    std::mt19937 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 3;
        Matrix sigma = Matrix::Zero(2 * k, 2 * k);
        sigma.topLeftCorner(k, k) = Matrix::Identity(k, k);
        sigma.bottomRightCorner(k, k) = -Matrix::Identity(k, k);
        const Grading g = Grading::from_matrix(sigma);

        Eigen::HouseholderQR<Matrix> qr(random_complex(k, k, rng));
        const Matrix v = qr.householderQ();
        const auto p = nu_inverse(v, g);
        CHECK(op_norm(Matrix(p.entries * p.entries - p.entries)) < 1e-10);
        const Matrix v2 = nu(p, g);
        CHECK(op_norm(Matrix(v2 - v)) < 1e-10);

        const auto p2 = nu_inverse(v2, g);
        CHECK(op_norm(Matrix(p2.entries - p.entries)) < 1e-10);
    }
}

TEST_CASE("odd trivializer on the zero operator yields the grading") {
    const auto odd = hat(Matrix::Zero(1, 1));
    const auto res = odd_trivializer(odd, 1.0);  // default bump has psi(0) = r = 1
    CHECK(op_norm(Matrix(res.correction - odd.grading.sigma)) < 1e-12);
    CHECK(op_norm(Matrix(res.section.entries - diag_real({1.0, 0.0}))) < 1e-12);
}

TEST_CASE("odd trivializer vanishes when the profile misses the spectrum") {
    Matrix a(1, 1);
    a(0, 0) = 1.0;
    const auto odd = hat(a);  // eigenvalues +-1
    const auto res = odd_trivializer(odd, 0.5);
    CHECK(op_norm(res.correction) < 1e-12);
    CHECK(op_norm(Matrix(res.section.entries - chi_plus(odd.base).entries)) < 1e-10);
}

TEST_CASE("odd trivializer identity on random odd operators") {
    std::mt19937 rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const auto odd = hat(random_complex(4, 4, rng));
        const auto res = odd_trivializer(odd, 1.5);
        CHECK(res.identity_defect < 1e-8);
        CHECK(res.min_abs_eig > 0.0);
        CHECK(is_spectral_section(odd.base, res.section, 1.5).ok);
    }
}

TEST_CASE("kernel signature counts the graded kernel halves") {
    std::mt19937 rng(79);
    Matrix invertible = random_complex(3, 3, rng) + 5.0 * Matrix::Identity(3, 3);
    CHECK(kernel_signature(hat(invertible)) == 0);
    CHECK(kernel_signature(hat(Matrix::Zero(1, 1))) == 0);
    CHECK(kernel_signature(hat(Matrix::Zero(1, 2))) == 1);   // C^2 (+) C^1
    CHECK(kernel_signature(hat(Matrix::Zero(2, 1))) == -1);  // C^1 (+) C^2
}

TEST_CASE("kernel and window signatures agree on random odd operators") {
    std::mt19937 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 3 + static_cast<int>(rng() % 3);
        const auto odd = hat(random_complex(k, k, rng));
        const auto d = eig(odd.base);
        for (double q : {0.3, 0.6, 0.9}) {
            double r = q * d.eigenvalues.cwiseAbs().maxCoeff() + 1e-3;
            bool collision = true;
            while (collision) {
                collision = false;
                for (int i = 0; i < d.eigenvalues.size(); ++i)
                    if (std::abs(std::abs(d.eigenvalues(i)) - r) < 1e-6) collision = true;
                if (collision) r += 1e-3;
            }
            CHECK(kernel_signature_checked(odd, r) == kernel_signature(odd));
        }
    }
}

TEST_CASE("cl1 section check on the scalar hat") {
    Matrix a(1, 1);
    a(0, 0) = 1.0;
    const auto odd = hat(a);
    const auto p = chi_plus(odd.base);
    CHECK(is_cl1_section(odd, p, 0.5));

    double defect = 0.0;
    CHECK_FALSE(is_cl1_section(odd, {diag_real({1.0, 0.0}), TailType::Zero, 1e-8}, 0.5,
                               &defect));
    CHECK(defect > 0.5);
}

TEST_CASE("odd gamma produces odd corrections") {
    std::mt19937 rng(89);
    for (int trial = 0; trial < 20; ++trial) {
        const auto odd = hat(random_complex(4, 4, rng));
        const auto p = chi_plus(odd.base);
        const auto d = eig(odd.base);
        // Cutoff strictly between two positive eigenvalue magnitudes.
        const double r = (d.eigenvalues(4) + d.eigenvalues(5)) / 2.0;
        const auto g = odd_gamma(odd, p, r);
        CHECK(g.oddness_defect < 1e-8);
        CHECK(g.base.norm < 2.0 * r);
        CHECK(g.base.projection_defect < 1e-8);
    }
}

TEST_CASE("rectangular correction confined to the low-frequency windows") {
    std::mt19937 rng(97);
    // Square invertible input, cutoff below the smallest singular value.
    Matrix a = random_complex(3, 3, rng) + 4.0 * Matrix::Identity(3, 3);
    Eigen::JacobiSVD<Matrix> svd(a);
    const double smin = svd.singularValues().minCoeff();
    const auto res = nonsa_correction(a, smin / 2.0);
    CHECK(op_norm(res.correction) < 1e-10);
    CHECK(res.min_singular > 0.0);

    // Scalar zero: the construction fills the window.
    const auto res0 = nonsa_correction(Matrix::Zero(1, 1), 1.0);
    const double c = std::abs(res0.correction(0, 0));
    CHECK(c > 0.0);
    CHECK(c < 2.0);
    CHECK(res0.min_singular > 0.0);
    CHECK(res0.range_defect < 1e-8);
    CHECK(res0.kernel_defect < 1e-8);

    // Index obstruction.
    CHECK_THROWS_WITH_AS((void)nonsa_correction(Matrix::Zero(2, 1), 1.0),
                         doctest::Contains("no Cl(1) section"), Error);

    // Rectangular kernel-paired case: 3x2 of rank 2 has index obstruction;
    // 3x3 of rank 2 does not.
    Matrix low = random_complex(3, 3, rng);
    low.col(2).setZero();
    const auto res2 = nonsa_correction(low, 0.5);
    Eigen::JacobiSVD<Matrix> svd2(Matrix(low + res2.correction));
    CHECK(svd2.singularValues().minCoeff() > 0.0);
    CHECK(res2.range_defect < 1e-8);
    CHECK(res2.kernel_defect < 1e-8);
}

TEST_CASE("supersymmetrize extracts the polar symmetry and the odd part") {
    const auto [g, abar] = supersymmetrize(diag_real({2.0, -3.0}), pauli_x());
    CHECK(op_norm(Matrix(g.sigma - diag_real({1.0, -1.0}))) < 1e-12);
    CHECK(op_norm(Matrix(abar - pauli_x())) < 1e-12);  // already odd

    const auto [g2, zero] = supersymmetrize(diag_real({2.0, -3.0}),
                                            Matrix::Identity(2, 2));
    CHECK(op_norm(zero) < 1e-12);

    CHECK_THROWS_AS((void)supersymmetrize(diag_real({1.0, 0.0}), pauli_x()), Error);
}

TEST_CASE("sigma trick produces a uniformly invertible operator") {
    const Grading g = Grading::from_matrix(diag_real({1.0, -1.0}));
    const Matrix odd_a = pauli_x();
    const Matrix a_prime = sigma_trick(odd_a, g);
    CHECK(op_norm(Matrix(a_prime - (odd_a + g.sigma))) < 1e-12);

    CHECK(op_norm(Matrix(sigma_trick(g.sigma, g) - g.sigma)) < 1e-12);

    std::mt19937 rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix a = random_hermitian(6, rng, 2.0);
        Matrix sigma = Matrix::Zero(6, 6);
        sigma.topLeftCorner(3, 3) = Matrix::Identity(3, 3);
        sigma.bottomRightCorner(3, 3) = -Matrix::Identity(3, 3);
        const Grading g6 = Grading::from_matrix(sigma);
        const Matrix ap = sigma_trick(a, g6);
        const auto d = eig_hermitian(Matrix(ap * ap));
        CHECK(d.eigenvalues.minCoeff() >= 1.0 - 1e-8);
    }
}

TEST_CASE("essentially odd projection") {
    const Grading g = Grading::from_matrix(diag_real({1.0, -1.0}));

    // An odd symmetry passes through unchanged.
    const Matrix s = pauli_x();
    double size = 0.0;
    const auto p = ess_odd_projection(s, g, &size);
    CHECK(op_norm(Matrix(p.entries - (s + Matrix::Identity(2, 2)) / 2.0)) < 1e-7);

    // a = 0 lands on the grading.
    const auto p0 = ess_odd_projection(Matrix::Zero(2, 2), g);
    CHECK(op_norm(Matrix(p0.entries - (g.sigma + Matrix::Identity(2, 2)) / 2.0)) <
          1e-12);

    // Random contraction: u is a symmetry and the graded defect equals
    // sigma sqrt(1 - b^2) exactly.
    std::mt19937 rng(103);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a = random_hermitian(2, rng);
        a /= (op_norm(a) + 0.1);
        const auto pr = ess_odd_projection(a, g);
        const Matrix u = 2.0 * pr.entries - Matrix::Identity(2, 2);
        CHECK(op_norm(Matrix(u * u - Matrix::Identity(2, 2))) < 1e-8);
        const Matrix b = (a - g.sigma * a * g.sigma) / 2.0;
        // sigma u sigma + u = 2 sigma sqrt(1-b^2) = 2 (u - b)
        const Matrix m = g.sigma * u * g.sigma + u - 2.0 * (u - b);
        CHECK(op_norm(m) < 1e-8);
    }

    CHECK_THROWS_AS((void)ess_odd_projection(Matrix(2.0 * pauli_x()), g), Error);
}

TEST_CASE("w-factorization of scaled Pauli symbols") {
    const auto plain = factor_w_symbol(pauli_symbol(Matrix::Identity(2, 2)));
    CHECK(op_norm(Matrix(plain.factors[0] - Matrix::Identity(2, 2))) < 1e-10);
    CHECK(plain.worst_dirac_defect < 1e-8);

    const auto doubled = factor_w_symbol(pauli_symbol(Matrix(2.0 * Matrix::Identity(2, 2))));
    CHECK(op_norm(Matrix(doubled.factors[0] - 2.0 * Matrix::Identity(2, 2))) < 1e-8);

    std::mt19937 rng(107);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix g = random_hermitian(2, rng);
        g = g * g + 0.5 * Matrix::Identity(2, 2);  // positive-definite
        const auto rec = factor_w_symbol(pauli_symbol(g));
        CHECK(op_norm(Matrix(rec.factors[0] - g)) < 1e-8);
        CHECK(rec.worst_dirac_defect < 1e-8);
    }
}

TEST_CASE("w-factorization rejects symbols violating the anticommutation law") {
    SymbolPoint pt;
    pt.tag = "bad";
    Matrix c0 = pauli_x();
    c0(0, 0) += 1e-3;  // breaks d(xi)d(eta)* + d(eta)d(xi)* = 0
    pt.coeffs = {c0, pauli_y()};
    CHECK_THROWS_AS((void)factor_w_symbol(SymbolSample{{pt}}), Error);
}
