#pragma once

#include "ggs/statevec.hpp"
#include "ggs/strategies.hpp"

namespace ggs {

// Result of replaying a symbolic strategy branch against the dense oracle.
struct OracleComparison {
    double state_fidelity = 0.0;  // rebuilt ledger vs directly simulated state
    double prob_error = 1.0;      // |claimed - simulated branch probability|

    bool pass(double fid_tol = 1e-10, double prob_tol = 1e-10) const {
        return state_fidelity >= 1.0 - fid_tol && prob_error <= prob_tol;
    }
};

// Replays the recorded single-qubit measurement (realign and the merge and
// bridge families) on the dense state and compares branch probability and
// post-measurement state against the symbolic prediction.
OracleComparison replay_measurement(const GeneralizedGraphState& pre,
                                    const StrategyOutcome& outcome);

// Replays a parity-projection outcome (pm_attempt / ghz_fuse): success
// applies the monitored Kraus operator, failure projects both participants
// onto |0>. The simulated branch probability is the odd-sector weight.
OracleComparison replay_pm(const GeneralizedGraphState& pre, int a, int b,
                           const PMEvent& event, const StrategyOutcome& outcome);

} // namespace ggs
