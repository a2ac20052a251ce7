// symplectic.hpp - Gaussian-state linear algebra in the interleaved
// (q1, p1, ..., qd, pd) ordering with hbar = 1, so a physical covariance
// matrix has every symplectic eigenvalue >= 1/2.
#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "clbattery/errors.hpp"

namespace clbattery {

using Matrix = Eigen::MatrixXd;

// Direct sum of d copies of [[0, 1], [-1, 0]].
Matrix symplectic_form(int modes);

class CovarianceMatrix {
public:
    // Requires a square, even-sized matrix that is symmetric to within
    // 1e-12 relative; the stored copy is exactly symmetric.
    explicit CovarianceMatrix(const Matrix& entries);
    static CovarianceMatrix single_mode(double sigma11, double sigma12, double sigma22);

    int modes() const noexcept { return static_cast<int>(entries_.rows() / 2); }
    const Matrix& matrix() const noexcept { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

    // All symplectic eigenvalues >= 1/2 - tolerance.
    bool is_physical(double tolerance = 1e-10) const;

private:
    Matrix entries_;
};

// H = x^T M x / 2 with M symmetric positive semidefinite.
class QuadraticHamiltonian {
public:
    explicit QuadraticHamiltonian(const Matrix& matrix);
    // p^2/2 + w0^2 q^2/2 on each mode.
    static QuadraticHamiltonian oscillators(const std::vector<double>& frequencies);

    int modes() const noexcept { return static_cast<int>(matrix_.rows() / 2); }
    const Matrix& matrix() const noexcept { return matrix_; }
    double energy(const CovarianceMatrix& sigma) const;

private:
    Matrix matrix_;
};

enum class SpectrumOrder { Ascending, Descending };

// sigma = lambda * (s (+) s ...) * lambda^T with lambda symplectic.
struct WilliamsonDecomposition {
    Matrix lambda;
    std::vector<double> spectrum;

    // Direct sum of spectrum[k] * I_2.
    Matrix diagonal() const;
};

// Ascending; +-i s_k are the eigenvalues of sigma J.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma);
// Same for a positive-semidefinite matrix (zero eigenvalues allowed).
std::vector<double> symplectic_eigenvalues(const Matrix& psd);

// Through the real Schur form of sigma^{1/2} J sigma^{1/2}.
WilliamsonDecomposition williamson(const Matrix& positive_definite,
                                   SpectrumOrder order = SpectrumOrder::Ascending);
WilliamsonDecomposition williamson(const CovarianceMatrix& sigma,
                                   SpectrumOrder order = SpectrumOrder::Ascending);

// tr(sigma M)/2 - sum_k s_k(ascending) m_k(descending), never negative.
double gaussian_ergotropy(const CovarianceMatrix& sigma, const QuadraticHamiltonian& ham);

// Symplectic map taking sigma to its minimum-energy (Gaussian-passive)
// partner. Needs a positive-definite Hamiltonian matrix.
Matrix optimal_symplectic(const CovarianceMatrix& sigma, const QuadraticHamiltonian& ham);

// Single oscillator with H = p^2/2 + w0^2 q^2/2.
double single_mode_ergotropy(double sigma11, double sigma12, double sigma22, double omega0);
CovarianceMatrix passive_covariance(double sigma11, double sigma12, double sigma22, double omega0);
// 2/w0 arccoth(2 sqrt(det sigma)); +infinity for a pure state.
double passive_temperature(double sigma11, double sigma12, double sigma22, double omega0);

// Von Neumann entropy in nats.
double gaussian_entropy(const CovarianceMatrix& sigma);

struct CanonicalEnergyCheck {
    double e_canon;
    double e_min;
    double s1;
    double s2;
    // w0 sqrt((a + b)^2 - (c1 - c2)^2), an upper bound on e_min.
    double bound;
    bool equal;
};

// Two equal-frequency modes in the canonical form
// [[a I, diag(c1, c2)], [diag(c1, c2), b I]].
CanonicalEnergyCheck canonical_two_mode_energy_check(double a, double b, double c1, double c2,
                                                     double omega0);
// The covariance matrix that check describes, in interleaved ordering.
CovarianceMatrix canonical_two_mode_covariance(double a, double b, double c1, double c2);

// Haar-unitary passive optics, single-mode squeezing with |log factor| up
// to max_log_squeeze, then another passive unitary.
Matrix random_symplectic(std::mt19937_64& rng, int modes, double max_log_squeeze = 1.0);
// Random symplectic congruence of a thermal product state with symplectic
// eigenvalues drawn from [1/2, max_eigenvalue].
CovarianceMatrix random_covariance(std::mt19937_64& rng, int modes, double max_eigenvalue = 3.0,
                                   double max_log_squeeze = 1.0);

}  // namespace clbattery
