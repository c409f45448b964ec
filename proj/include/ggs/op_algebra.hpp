#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

#include "ggs/angles.hpp"

namespace ggs {

// Raised when a projection leaves the zero vector (e.g. composing the even
// and odd parity projectors).
struct AnnihilatedState : std::runtime_error {
    explicit AnnihilatedState(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a forced measurement branch has (numerically) zero probability.
struct ImpossibleBranch : std::runtime_error {
    explicit ImpossibleBranch(const std::string& what) : std::runtime_error(what) {}
};

enum class OpKind {
    WeightedEdge,   // U(theta) = cos(theta) I + i sin(theta) ZZ   (unitary)
    PartialFusion,  // P(theta) = cos(theta) I + sin(theta) ZZ     (non-unitary)
    MRotation,      // M(alpha) = sin(alpha) X - cos(alpha) Z
    SGate,          // diag(1, i)
    Hadamard,
    PauliX,
    PauliZ,
    ControlZ,
};

Eigen::Matrix2cd m_rotation(double alpha);
Eigen::Matrix2cd s_gate();
Eigen::Matrix2cd hadamard();
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix4cd weighted_edge(double theta);
Eigen::Matrix4cd partial_fusion(double theta);
Eigen::Matrix4cd control_z();

// Dispatcher over all operator families. The angle is required exactly for
// the parametric kinds and rejected otherwise.
Eigen::MatrixXcd operator_matrix(OpKind kind, std::optional<double> angle = std::nullopt);
bool op_is_unitary(OpKind kind);

// Symbolic byproduct accumulated by angle canonicalization: a power of i
// together with Z tags on the two endpoints of the pair, e.g. the i Z_A Z_B
// factor of U(theta + pi/2) = i Z_A Z_B U(theta).
struct Byproduct {
    int phase_pow = 0;  // global phase i^phase_pow, kept mod 4
    bool z_a = false;
    bool z_b = false;

    bool trivial() const { return phase_pow == 0 && !z_a && !z_b; }
    bool paulis_trivial() const { return !z_a && !z_b; }
    Byproduct composed(const Byproduct& other) const;
    Eigen::Matrix4cd matrix() const;
};

struct CanonicalAngle {
    double theta = 0.0;
    Byproduct byproduct;
};

// Reduce an arbitrary angle into [-pi/4, pi/4].
//   weighted: U(t) = i^k (ZZ)^(k mod 2) U(t - k pi/2)
//   fusion:   P(t + pi) = -P(t),  P(t) = ZZ P(pi/2 - t)
// Exact boundary ties prefer +pi/4 where the identity family allows it
// (weighted edges only; the fusion orbit never reaches the opposite sign).
CanonicalAngle canonicalize_weighted(double theta);
CanonicalAngle canonicalize_fusion(double theta);
CanonicalAngle canonicalize(OpKind kind, double theta);

// U(t1) U(t2) = byproduct * U(theta), exact addition rule.
CanonicalAngle compose_weighted(double t1, double t2);

struct FusionComposition {
    double theta = 0.0;
    Byproduct byproduct;
    double weight = 1.0;  // P(t2) P(t1) = weight * byproduct * P(theta)
};

// P(t2) P(t1) = cos(t1 - t2) I + sin(t1 + t2) ZZ, rescaled to P-form.
// Throws AnnihilatedState when the product is the zero operator.
FusionComposition compose_fusion(double t1, double t2);

// First-attempt success probability p_s(alpha) = sin^2(2 alpha) / 2.
double p_success(double alpha);

// Failure-branch tilt R(alpha) = arccos(cos^2(alpha) / sqrt(1 - p_s(alpha))).
double r_exacerbate(double alpha);

// Merge retry with a recycled partial fusion: p_s(alpha) (1 + sign sin(2 theta)).
double p_merge(double alpha, double theta, int sign);

// Sign choices that make the recycled entanglement beneficial.
int matched_merge_sign(double theta);
int matched_bridge_sign(double alpha, double theta);

struct BridgeParams {
    double beta = 0.0;      // rotation parameter of M(beta) * S
    double n_factor = 1.0;  // N = (1 - sign sin(2 theta) cos(2 alpha))^(-1/2)
    double p_b = 0.0;       // success probability p_s(alpha) N^2
    double lambda_f = 0.0;  // total failure edge angle (pre-canonicalization)
};

// Closed forms for bridging across a pre-existing weighted edge theta with a
// tilted intercore alpha. Derived from the statevector oracle; see
// docs/derivation_notes.md for the derivation and the rejected variants.
BridgeParams bridge_params(double alpha, double theta, int sign);

} // namespace ggs
