#include "clbattery/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace clbattery {

namespace {

constexpr double kMinEigenvalue = 1e-12;

void require_even_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        std::ostringstream msg;
        msg << what << " must be a nonempty 2d x 2d matrix, got " << m.rows() << "x" << m.cols();
        throw InvalidArgument(msg.str());
    }
}

Matrix symmetrised(const Matrix& m, const char* what) {
    require_even_square(m, what);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!m.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument(std::string(what) + " is not symmetric");
    }
    return 0.5 * (m + m.transpose());
}

struct SpectralRoots {
    Matrix sqrt;
    Matrix inv_sqrt;
};

SpectralRoots spectral_roots(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Eigen::VectorXd& values = eig.eigenvalues();
    if (values.minCoeff() <= kMinEigenvalue) {
        std::ostringstream msg;
        msg << "matrix is not positive definite (smallest eigenvalue " << values.minCoeff() << ")";
        throw NotPositiveDefinite(msg.str());
    }
    const Matrix& v = eig.eigenvectors();
    return {v * values.cwiseSqrt().asDiagonal() * v.transpose(),
            v * values.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()};
}

// Positive half of the spectrum of the Hermitian i A for skew-symmetric A,
// together with an orthogonal O such that A = O (+)_k s_k J1 O^T.
struct SkewSchur {
    std::vector<double> values;
    Matrix orthogonal;
};

SkewSchur skew_schur(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    const int d = n / 2;
    const Eigen::MatrixXcd hermitian = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitian);
    SkewSchur out{std::vector<double>(d), Matrix(n, n)};
    for (int k = 0; k < d; ++k) {
        // Eigenvalues come sorted ascending: -s_d..-s_1, s_1..s_d.
        const int col = d + k;
        out.values[k] = eig.eigenvalues()(col);
        const Eigen::VectorXcd v = eig.eigenvectors().col(col);
        // A x = s y and A y = -s x for v = x + i y; |x| = |y| = 1/sqrt2.
        out.orthogonal.col(2 * k) = std::sqrt(2.0) * v.imag();
        out.orthogonal.col(2 * k + 1) = std::sqrt(2.0) * v.real();
    }
    return out;
}

}  // namespace

Matrix symplectic_form(int modes) {
    if (modes < 1) throw InvalidArgument("mode count must be positive");
    Matrix j = Matrix::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        j(2 * k, 2 * k + 1) = 1.0;
        j(2 * k + 1, 2 * k) = -1.0;
    }
    return j;
}

CovarianceMatrix::CovarianceMatrix(const Matrix& entries)
    : entries_(symmetrised(entries, "covariance matrix")) {}

CovarianceMatrix CovarianceMatrix::single_mode(double sigma11, double sigma12, double sigma22) {
    Matrix m(2, 2);
    m << sigma11, sigma12, sigma12, sigma22;
    return CovarianceMatrix(m);
}

bool CovarianceMatrix::is_physical(double tolerance) const {
    try {
        const auto s = symplectic_eigenvalues(*this);
        return s.front() >= 0.5 - tolerance;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

QuadraticHamiltonian::QuadraticHamiltonian(const Matrix& matrix)
    : matrix_(symmetrised(matrix, "Hamiltonian matrix")) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(matrix_, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
        throw InvalidArgument("Hamiltonian matrix must be positive semidefinite");
    }
}

QuadraticHamiltonian QuadraticHamiltonian::oscillators(const std::vector<double>& frequencies) {
    if (frequencies.empty()) throw InvalidArgument("need at least one oscillator frequency");
    const int d = static_cast<int>(frequencies.size());
    Matrix m = Matrix::Zero(2 * d, 2 * d);
    for (int k = 0; k < d; ++k) {
        m(2 * k, 2 * k) = frequencies[k] * frequencies[k];
        m(2 * k + 1, 2 * k + 1) = 1.0;
    }
    return QuadraticHamiltonian(m);
}

double QuadraticHamiltonian::energy(const CovarianceMatrix& sigma) const {
    if (sigma.modes() != modes()) throw InvalidArgument("mode count mismatch");
    return 0.5 * (sigma.matrix().cwiseProduct(matrix_)).sum();
}

Matrix WilliamsonDecomposition::diagonal() const {
    const int d = static_cast<int>(spectrum.size());
    Matrix s = Matrix::Zero(2 * d, 2 * d);
    for (int k = 0; k < d; ++k) {
        s(2 * k, 2 * k) = spectrum[k];
        s(2 * k + 1, 2 * k + 1) = spectrum[k];
    }
    return s;
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma) {
    const Matrix& m = sigma.matrix();
    if (m.rows() == 2) {
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        if (!(m(0, 0) > kMinEigenvalue) || !(det > 0.0)) {
            throw NotPositiveDefinite("covariance matrix is not positive definite");
        }
        return {std::sqrt(det)};
    }
    const auto roots = spectral_roots(m);
    const Matrix j = symplectic_form(sigma.modes());
    return skew_schur(roots.sqrt * j * roots.sqrt).values;
}

std::vector<double> symplectic_eigenvalues(const Matrix& psd) {
    const Matrix m = symmetrised(psd, "matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
    const Matrix root = eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    const Matrix j = symplectic_form(static_cast<int>(m.rows() / 2));
    auto values = skew_schur(root * j * root).values;
    for (double& v : values) v = std::max(v, 0.0);
    std::sort(values.begin(), values.end());
    return values;
}

WilliamsonDecomposition williamson(const Matrix& positive_definite, SpectrumOrder order) {
    const Matrix sigma = symmetrised(positive_definite, "matrix");
    const int n = static_cast<int>(sigma.rows());
    const int d = n / 2;
    const auto roots = spectral_roots(sigma);
    const Matrix j = symplectic_form(d);

    WilliamsonDecomposition out;
    if (d == 1) {
        // (sigma / s)^{1/2} has unit determinant, hence is symplectic.
        const double s = std::sqrt(sigma.determinant());
        out.lambda = roots.sqrt / std::sqrt(s);
        out.spectrum = {s};
        return out;
    }

    SkewSchur schur = skew_schur(roots.sqrt * j * roots.sqrt);
    std::vector<int> blocks(d);
    for (int k = 0; k < d; ++k) blocks[k] = order == SpectrumOrder::Ascending ? k : d - 1 - k;

    Matrix o(n, n);
    Matrix s_half = Matrix::Zero(n, n);
    out.spectrum.resize(d);
    for (int k = 0; k < d; ++k) {
        const int src = blocks[k];
        o.col(2 * k) = schur.orthogonal.col(2 * src);
        o.col(2 * k + 1) = schur.orthogonal.col(2 * src + 1);
        out.spectrum[k] = schur.values[src];
        s_half(2 * k, 2 * k) = std::sqrt(schur.values[src]);
        s_half(2 * k + 1, 2 * k + 1) = std::sqrt(schur.values[src]);
    }
    // lambda_bar^T sigma lambda_bar = s; lambda = (lambda_bar^T)^{-1}.
    const Matrix lambda_bar = roots.inv_sqrt * o * s_half;
    out.lambda = -j * lambda_bar * j;
    return out;
}

WilliamsonDecomposition williamson(const CovarianceMatrix& sigma, SpectrumOrder order) {
    return williamson(sigma.matrix(), order);
}

double gaussian_ergotropy(const CovarianceMatrix& sigma, const QuadraticHamiltonian& ham) {
    if (sigma.modes() != ham.modes()) throw InvalidArgument("mode count mismatch");
    const auto s = symplectic_eigenvalues(sigma);
    auto m = symplectic_eigenvalues(ham.matrix());
    std::reverse(m.begin(), m.end());
    const double energy = ham.energy(sigma);
    double passive = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) passive += s[k] * m[k];
    const double ergotropy = energy - passive;
    if (ergotropy < 0.0) {
        if (ergotropy < -1e-12 * std::max(1.0, energy)) {
            std::ostringstream msg;
            msg << "negative Gaussian ergotropy " << ergotropy << " beyond round-off";
            throw NumericalError(msg.str());
        }
        return 0.0;
    }
    return ergotropy;
}

Matrix optimal_symplectic(const CovarianceMatrix& sigma, const QuadraticHamiltonian& ham) {
    if (sigma.modes() != ham.modes()) throw InvalidArgument("mode count mismatch");
    const Matrix j = symplectic_form(sigma.modes());
    const auto state = williamson(sigma, SpectrumOrder::Ascending);
    const auto energy = williamson(ham.matrix(), SpectrumOrder::Descending);
    return -j * energy.lambda * state.lambda.transpose() * j;
}

namespace {

double checked_sqrt_det(double sigma11, double sigma12, double sigma22) {
    const double det = sigma11 * sigma22 - sigma12 * sigma12;
    if (!(sigma11 > 0.0) || !(sigma22 > 0.0) || !(det >= 0.25 * (1.0 - 1e-12))) {
        std::ostringstream msg;
        msg << "covariance violates the uncertainty bound (det = " << det << " < 1/4)";
        throw UnphysicalCovariance(msg.str());
    }
    return std::sqrt(det);
}

void require_omega0(double omega0) {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw InvalidArgument("omega0 must be > 0");
}

}  // namespace

double single_mode_ergotropy(double sigma11, double sigma12, double sigma22, double omega0) {
    require_omega0(omega0);
    const double root_det = checked_sqrt_det(sigma11, sigma12, sigma22);
    // Equals (s11 w0^2 + s22)/2 - w0 sqrt(det), written without cancellation.
    const double diagonal_part = std::sqrt(sigma22) - omega0 * std::sqrt(sigma11);
    const double correlation_part =
        omega0 * sigma12 * sigma12 / (std::sqrt(sigma11 * sigma22) + root_det);
    return 0.5 * diagonal_part * diagonal_part + correlation_part;
}

CovarianceMatrix passive_covariance(double sigma11, double sigma12, double sigma22, double omega0) {
    require_omega0(omega0);
    const double root_det = checked_sqrt_det(sigma11, sigma12, sigma22);
    return CovarianceMatrix::single_mode(root_det / omega0, 0.0, root_det * omega0);
}

double passive_temperature(double sigma11, double sigma12, double sigma22, double omega0) {
    require_omega0(omega0);
    const double x = 2.0 * checked_sqrt_det(sigma11, sigma12, sigma22);
    if (x <= 1.0 + 1e-14) return std::numeric_limits<double>::infinity();
    // (2/w0) arccoth(x) = log1p(2 / (x - 1)) / w0
    return std::log1p(2.0 / (x - 1.0)) / omega0;
}

double gaussian_entropy(const CovarianceMatrix& sigma) {
    double entropy = 0.0;
    for (double s : symplectic_eigenvalues(sigma)) {
        if (s < 0.5 - 1e-10) {
            std::ostringstream msg;
            msg << "symplectic eigenvalue " << s << " below 1/2";
            throw UnphysicalCovariance(msg.str());
        }
        if (s <= 0.5) continue;
        const double up = s + 0.5;
        const double down = s - 0.5;
        entropy += up * std::log(up) - down * std::log(down);
    }
    return entropy;
}

CovarianceMatrix canonical_two_mode_covariance(double a, double b, double c1, double c2) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = a;
    m(2, 2) = m(3, 3) = b;
    m(0, 2) = m(2, 0) = c1;
    m(1, 3) = m(3, 1) = c2;
    return CovarianceMatrix(m);
}

CanonicalEnergyCheck canonical_two_mode_energy_check(double a, double b, double c1, double c2,
                                                     double omega0) {
    require_omega0(omega0);
    if (!(a > 0.0) || !(b > 0.0) || c1 * c1 > a * b || c2 * c2 > a * b) {
        throw UnphysicalCovariance("canonical form needs a, b > 0 and c1^2, c2^2 <= ab");
    }
    const double a2b2 = a * a + b * b;
    const double kappa_sq = (a * a - b * b) * (a * a - b * b) + 4.0 * a2b2 * c1 * c2 +
                            4.0 * a * b * (c1 * c1 + c2 * c2);
    const double kappa = std::sqrt(std::max(kappa_sq, 0.0));
    CanonicalEnergyCheck out{};
    out.s1 = std::sqrt(std::max(0.5 * (a2b2 + 2.0 * c1 * c2 - kappa), 0.0));
    out.s2 = std::sqrt(std::max(0.5 * (a2b2 + 2.0 * c1 * c2 + kappa), 0.0));
    out.e_canon = omega0 * (a + b);
    out.e_min = omega0 * (out.s1 + out.s2);
    out.bound = omega0 * std::sqrt(std::max((a + b) * (a + b) - (c1 - c2) * (c1 - c2), 0.0));
    const double tol = 1e-10 * std::max(1.0, out.e_canon);
    if (out.e_min > out.e_canon + tol) {
        throw NumericalError("canonical-form energy check: e_min exceeds e_canon");
    }
    out.equal = std::abs(out.e_canon - out.e_min) <= tol;
    return out;
}

namespace {

Eigen::MatrixXcd haar_unitary(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd z(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) z(i, k) = {normal(rng), normal(rng)};
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
}

// Real representation of a passive unitary in interleaved ordering.
Matrix passive_symplectic(const Eigen::MatrixXcd& u) {
    const int d = static_cast<int>(u.rows());
    Matrix s(2 * d, 2 * d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const double x = u(i, k).real();
            const double y = u(i, k).imag();
            s(2 * i, 2 * k) = x;
            s(2 * i, 2 * k + 1) = -y;
            s(2 * i + 1, 2 * k) = y;
            s(2 * i + 1, 2 * k + 1) = x;
        }
    }
    return s;
}

}  // namespace

Matrix random_symplectic(std::mt19937_64& rng, int modes, double max_log_squeeze) {
    if (modes < 1) throw InvalidArgument("mode count must be positive");
    std::uniform_real_distribution<double> squeeze(-max_log_squeeze, max_log_squeeze);
    Matrix diag = Matrix::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        const double r = squeeze(rng);
        diag(2 * k, 2 * k) = std::exp(r);
        diag(2 * k + 1, 2 * k + 1) = std::exp(-r);
    }
    const Matrix left = passive_symplectic(haar_unitary(rng, modes));
    const Matrix right = passive_symplectic(haar_unitary(rng, modes));
    return left * diag * right;
}

CovarianceMatrix random_covariance(std::mt19937_64& rng, int modes, double max_eigenvalue,
                                   double max_log_squeeze) {
    std::uniform_real_distribution<double> eigen(0.5, max_eigenvalue);
    Matrix thermal = Matrix::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        const double s = eigen(rng);
        thermal(2 * k, 2 * k) = s;
        thermal(2 * k + 1, 2 * k + 1) = s;
    }
    const Matrix s = random_symplectic(rng, modes, max_log_squeeze);
    const Matrix sigma = s * thermal * s.transpose();
    return CovarianceMatrix(0.5 * (sigma + sigma.transpose()));
}

}  // namespace clbattery
