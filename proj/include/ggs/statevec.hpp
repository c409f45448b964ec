#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "ggs/ledger.hpp"

namespace ggs {

// Dense amplitude vector over n qubits, the brute-force ground truth for
// every symbolic rule. Little-endian basis labelling: qubit 0 is the least
// significant bit of the amplitude index.
struct StateVector {
    int num_qubits = 0;
    Eigen::VectorXcd amps;

    std::size_t dim() const { return static_cast<std::size_t>(amps.size()); }
};

inline constexpr int kDefaultMaxQubits = 16;
inline constexpr double kAnnihilationTol = 1e-12;

StateVector basis_state(int num_qubits, std::uint64_t index = 0,
                        int max_qubits = kDefaultMaxQubits);

// Product of tilted single-qubit states cos(a)|0> + sin(a)|1>; alphas[q] is
// the tilt of qubit q.
StateVector tilted_product(const std::vector<double>& alphas,
                           int max_qubits = kDefaultMaxQubits);

double state_norm(const StateVector& sv);
void renormalize(StateVector& sv);

// Applies the operator in place and returns the post-application norm of the
// unnormalized result (1 for unitaries, the branch amplitude for fusions).
// With renormalize set, a weight below kAnnihilationTol raises
// AnnihilatedState; otherwise the unnormalized state is kept.
double apply_op(StateVector& sv, int q, const Eigen::Matrix2cd& op, bool renorm = true);
// Two-qubit matrices are indexed by (bit of qa << 1) | bit of qb.
double apply_op(StateVector& sv, int qa, int qb, const Eigen::Matrix4cd& op,
                bool renorm = true);

struct MeasureResult {
    int outcome = 0;
    double probability = 0.0;
    StateVector post;  // measured qubit traced out (num_qubits - 1)
};

// Rotates qubit q by pre_rotation, measures it in the computational basis
// and removes it. A forced branch returns that outcome with its exact
// probability (ImpossibleBranch below 1e-15); otherwise the outcome is
// sampled from rng.
MeasureResult measure_qubit(const StateVector& sv, int q,
                            const Eigen::Matrix2cd& pre_rotation,
                            std::optional<int> forced = std::nullopt,
                            std::mt19937_64* rng = nullptr);

// |<a|b>|^2; global phase is quotiented out by construction.
double fidelity(const StateVector& a, const StateVector& b);

double expectation_zz(const StateVector& sv, int qa, int qb);
double expectation_z(const StateVector& sv, int q);

// Materializes a ledger: tilted initialization, edge and fusion operators,
// one final renormalization, then the per-vertex frames. raw_norm (optional)
// receives the norm of the unnormalized record application.
StateVector build_from_ledger(const GeneralizedGraphState& ledger,
                              double* raw_norm = nullptr,
                              int max_qubits = kDefaultMaxQubits);

// Regression fixture format: header "n=<qubits>", then one "re im" pair per
// line in index order. Lines starting with '#' are ignored when reading.
void write_fixture(std::ostream& out, const StateVector& sv);
StateVector read_fixture(std::istream& in);
StateVector read_fixture_file(const std::string& path);

} // namespace ggs
