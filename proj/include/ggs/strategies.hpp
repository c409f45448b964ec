#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>

#include "ggs/ledger.hpp"

namespace ggs {

enum class Branch { Success, Failure };

// Physical procedure realized by a strategy operation, recorded so oracle
// tests can replay it against the dense simulator. The pre-rotation already
// absorbs the measured qubit's local frame.
struct AppliedMeasurement {
    int vertex = -1;  // -1 when the branch involved no single-qubit measurement
    Eigen::Matrix2cd pre_rotation = Eigen::Matrix2cd::Identity();
    int outcome = 0;
};

struct StrategyOutcome {
    Branch branch = Branch::Success;
    double probability = 0.0;
    GeneralizedGraphState ledger_after;
    std::string notes;
    AppliedMeasurement measurement;
};

// Monitored parity-projection event. The tilt is fixed by the photon
// detection time; the detector tag only flips a local sign, absorbed into
// the survivor's frame.
struct PMEvent {
    double alpha_pm = kQuarterPi;
    int detector_tag = 0;
};

struct CherrylessError : std::invalid_argument {
    explicit CherrylessError(const std::string& what) : std::invalid_argument(what) {}
};

// Heralded parity projection between two fresh or cherry qubits. Success
// installs the monitored tilted pairing (survivor a tilted alpha_pm, b its
// cherry); failure removes both qubits, leaving at most one-qubit damage.
StrategyOutcome pm_attempt(const GeneralizedGraphState& ledger, int a, int b,
                           const PMEvent& event,
                           std::optional<Branch> forced = std::nullopt,
                           std::mt19937_64* rng = nullptr);

// Fuses two disjoint (possibly tilted) GHZ states by a parity projection on
// their cores. Success yields one larger GHZ with core core1 and tilt
// alpha3 with tan(alpha3) = tan(alpha_pm) tan(alpha1) / tan(alpha2);
// failure costs exactly the two cores.
StrategyOutcome ghz_fuse(const GeneralizedGraphState& ledger, int core1, int core2,
                         const PMEvent& event,
                         std::optional<Branch> forced = std::nullopt,
                         std::mt19937_64* rng = nullptr);

// Measures a cherry in the tuned basis M(pi/4 - alpha) to remove its
// neighbour's tilt. Success probability p_s(alpha); failure exacerbates the
// tilt to R(alpha) and leaves a Z byproduct.
StrategyOutcome realign(const GeneralizedGraphState& ledger, int tilted_vertex,
                        int cherry,
                        std::optional<Branch> forced = std::nullopt,
                        std::mt19937_64* rng = nullptr);

// Consumes a tilted degree-2 intercore between targets 3 and 4, rotating by
// M(sign * alpha). Success installs the full fusion P(sign pi/4); failure
// installs P(-sign R(alpha)).
StrategyOutcome merge_attempt(const GeneralizedGraphState& ledger, int intercore,
                              int sign,
                              std::optional<Branch> forced = std::nullopt,
                              std::mt19937_64* rng = nullptr);

// Merge retry across a recycled partial fusion P(prior_theta): success with
// p_merge upgrades to the full fusion, failure composes in an additional
// P(-sign(theta) R(alpha)) via the fusion composition rule.
StrategyOutcome merge_with_fusion(const GeneralizedGraphState& ledger, int intercore,
                                  double prior_theta, int sign,
                                  std::optional<Branch> forced = std::nullopt,
                                  std::mt19937_64* rng = nullptr);

// X-basis measurement of an untilted intercore: a full fusion is installed
// with certainty, the even/odd parity outcome has probabilities
// (1 +- sin(2 prior_theta)) / 2. Forced Success selects even, Failure odd;
// the returned branch is Success either way.
StrategyOutcome merge_deterministic(const GeneralizedGraphState& ledger, int intercore,
                                    double prior_theta,
                                    std::optional<Branch> forced = std::nullopt,
                                    std::mt19937_64* rng = nullptr);

// Bridge family: identical control flow, but the intercore is rotated by
// M(...) * S and the records are weighted edges U(theta).
StrategyOutcome bridge_attempt(const GeneralizedGraphState& ledger, int intercore,
                               int sign,
                               std::optional<Branch> forced = std::nullopt,
                               std::mt19937_64* rng = nullptr);

StrategyOutcome bridge_with_edge(const GeneralizedGraphState& ledger, int intercore,
                                 double prior_theta, int sign,
                                 std::optional<Branch> forced = std::nullopt,
                                 std::mt19937_64* rng = nullptr);

// Adds exactly U(sign pi/4 - prior_theta) with certainty; the outcome only
// decides an i Z Z byproduct (Z frames on both targets). The sign defaults
// to the side nearest the prior edge.
StrategyOutcome bridge_deterministic(const GeneralizedGraphState& ledger, int intercore,
                                     double prior_theta,
                                     std::optional<Branch> forced = std::nullopt,
                                     std::mt19937_64* rng = nullptr);

// The two-qubit Kraus operator of a monitored odd-parity projection,
// cos(a)|01><01| + sin(a)|10><10| with the first index slot = first qubit.
Eigen::Matrix4cd pm_kraus(double alpha_pm, int detector_tag = 0);

} // namespace ggs
