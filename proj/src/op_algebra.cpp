#include "ggs/op_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace ggs {

namespace {

using namespace std::complex_literals;

constexpr double kZeroOpTol = 1e-12;

Eigen::Matrix4cd zz_diag(std::complex<double> plus, std::complex<double> minus) {
    // Basis order |ab> = (bit_a << 1) | bit_b; ZZ eigenvalue +1 on {00, 11}.
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = plus;
    m(1, 1) = minus;
    m(2, 2) = minus;
    m(3, 3) = plus;
    return m;
}

} // namespace

Eigen::Matrix2cd m_rotation(double alpha) {
    Eigen::Matrix2cd m;
    m << -std::cos(alpha), std::sin(alpha),
          std::sin(alpha),  std::cos(alpha);
    return m;
}

Eigen::Matrix2cd s_gate() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = 1.0i;
    return m;
}

Eigen::Matrix2cd hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd m;
    m << r, r, r, -r;
    return m;
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix4cd weighted_edge(double theta) {
    const std::complex<double> e = std::cos(theta) + 1.0i * std::sin(theta);
    return zz_diag(e, std::conj(e));
}

Eigen::Matrix4cd partial_fusion(double theta) {
    return zz_diag(std::cos(theta) + std::sin(theta), std::cos(theta) - std::sin(theta));
}

Eigen::Matrix4cd control_z() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
    m(3, 3) = -1.0;
    return m;
}

bool op_is_unitary(OpKind kind) {
    return kind != OpKind::PartialFusion;
}

Eigen::MatrixXcd operator_matrix(OpKind kind, std::optional<double> angle) {
    const bool parametric = kind == OpKind::WeightedEdge || kind == OpKind::PartialFusion ||
                            kind == OpKind::MRotation;
    if (parametric && !angle) {
        throw std::invalid_argument("operator_matrix: missing angle for parametric kind");
    }
    if (!parametric && angle) {
        throw std::invalid_argument("operator_matrix: angle supplied for fixed kind");
    }
    switch (kind) {
        case OpKind::WeightedEdge:  return weighted_edge(*angle);
        case OpKind::PartialFusion: return partial_fusion(*angle);
        case OpKind::MRotation:     return m_rotation(*angle);
        case OpKind::SGate:         return s_gate();
        case OpKind::Hadamard:      return hadamard();
        case OpKind::PauliX:        return pauli_x();
        case OpKind::PauliZ:        return pauli_z();
        case OpKind::ControlZ:      return control_z();
    }
    throw std::invalid_argument("operator_matrix: unknown kind");
}

Byproduct Byproduct::composed(const Byproduct& other) const {
    // Only Z tags occur, so the factors commute without extra phases.
    Byproduct out;
    out.phase_pow = ((phase_pow + other.phase_pow) % 4 + 4) % 4;
    out.z_a = z_a != other.z_a;
    out.z_b = z_b != other.z_b;
    return out;
}

Eigen::Matrix4cd Byproduct::matrix() const {
    static const std::complex<double> phases[4] = {1.0, 1.0i, -1.0, -1.0i};
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
    if (z_a) {  // first qubit = high bit
        m(2, 2) *= -1.0;
        m(3, 3) *= -1.0;
    }
    if (z_b) {
        m(1, 1) *= -1.0;
        m(3, 3) *= -1.0;
    }
    return phases[((phase_pow % 4) + 4) % 4] * m;
}

CanonicalAngle canonicalize_weighted(double theta) {
    // U(theta) = (i Z_A Z_B)^k U(theta - k pi/2); pick k so the remainder
    // lands in [-pi/4, pi/4], preferring +pi/4 on exact boundary ties.
    double k_real = std::floor(theta / kHalfPi + 0.5);
    double rem = theta - k_real * kHalfPi;
    if (rem < -kQuarterPi + kAngleTol && rem >= -kQuarterPi - kAngleTol) {
        k_real -= 1.0;
        rem = theta - k_real * kHalfPi;
    }
    const long long k = static_cast<long long>(k_real);
    CanonicalAngle out;
    out.theta = rem;
    const int km = static_cast<int>(((k % 4) + 4) % 4);
    out.byproduct.phase_pow = km;
    out.byproduct.z_a = out.byproduct.z_b = (km % 2) != 0;
    return out;
}

CanonicalAngle canonicalize_fusion(double theta) {
    // P(theta + pi) = -P(theta); P(theta) = ZZ P(pi/2 - theta).
    CanonicalAngle out;
    double m_real = std::floor(theta / kPi + 0.5);
    double rem = theta - m_real * kPi;  // in [-pi/2, pi/2]
    const long long m = static_cast<long long>(m_real);
    if ((m % 2 + 2) % 2 != 0) out.byproduct.phase_pow = 2;
    if (rem > kQuarterPi + kAngleTol) {
        rem = kHalfPi - rem;
        out.byproduct.z_a = out.byproduct.z_b = true;
    } else if (rem < -kQuarterPi - kAngleTol) {
        // P(rem) = -P(rem + pi) = -ZZ P(-pi/2 - rem)
        rem = -kHalfPi - rem;
        out.byproduct.z_a = out.byproduct.z_b = true;
        out.byproduct.phase_pow = (out.byproduct.phase_pow + 2) % 4;
    }
    out.theta = rem;
    return out;
}

CanonicalAngle canonicalize(OpKind kind, double theta) {
    switch (kind) {
        case OpKind::WeightedEdge:  return canonicalize_weighted(theta);
        case OpKind::PartialFusion: return canonicalize_fusion(theta);
        default:
            throw std::invalid_argument("canonicalize: kind has no canonical range");
    }
}

CanonicalAngle compose_weighted(double t1, double t2) {
    return canonicalize_weighted(t1 + t2);
}

FusionComposition compose_fusion(double t1, double t2) {
    // P(t2) P(t1) = cos(t1 - t2) I + sin(t1 + t2) ZZ.
    const double c = std::cos(t1 - t2);
    const double s = std::sin(t1 + t2);
    const double rho = std::hypot(c, s);
    if (rho < kZeroOpTol) {
        throw AnnihilatedState("compose_fusion: orthogonal parity projectors annihilate");
    }
    const CanonicalAngle canon = canonicalize_fusion(std::atan2(s, c));
    return FusionComposition{canon.theta, canon.byproduct, rho};
}

double p_success(double alpha) {
    const double s = std::sin(2.0 * alpha);
    return 0.5 * s * s;
}

double r_exacerbate(double alpha) {
    const double c = std::cos(alpha);
    double arg = c * c / std::sqrt(1.0 - p_success(alpha));
    if (arg > 1.0 + 1e-12 || arg < -1.0 - 1e-12) {
        throw std::domain_error("r_exacerbate: arccos argument out of range");
    }
    arg = std::clamp(arg, -1.0, 1.0);
    return std::acos(arg);
}

double p_merge(double alpha, double theta, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("p_merge: sign must be +-1");
    return p_success(alpha) * (1.0 + sign * std::sin(2.0 * theta));
}

int matched_merge_sign(double theta) {
    return theta >= 0.0 ? 1 : -1;
}

int matched_bridge_sign(double alpha, double theta) {
    // p_b = p_s / (1 - sign sin(2 theta) cos(2 alpha)): beneficial when the
    // subtracted product is nonnegative.
    const double prod = std::sin(2.0 * theta) * std::cos(2.0 * alpha);
    return prod >= 0.0 ? 1 : -1;
}

BridgeParams bridge_params(double alpha, double theta, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("bridge_params: sign must be +-1");
    }
    require_tilt(alpha, "bridge_params");
    BridgeParams out;
    const double phi = sign * kQuarterPi - theta;  // success adds U(phi)
    out.beta = std::atan2(std::sin(alpha) * std::cos(phi), std::cos(alpha) * std::sin(phi));
    const double n2 = 1.0 / (1.0 - sign * std::sin(2.0 * theta) * std::cos(2.0 * alpha));
    out.n_factor = std::sqrt(n2);
    out.p_b = p_success(alpha) * n2;
    out.lambda_f = theta + std::atan2(-std::sin(alpha) * std::sin(out.beta),
                                      std::cos(alpha) * std::cos(out.beta));
    return out;
}

} // namespace ggs
