#include "ggs/oracle_check.hpp"

namespace ggs {

OracleComparison replay_measurement(const GeneralizedGraphState& pre,
                                    const StrategyOutcome& outcome) {
    if (outcome.measurement.vertex < 0) {
        throw std::invalid_argument("replay_measurement: outcome has no measurement record");
    }
    const StateVector psi = build_from_ledger(pre);
    const int q = pre.qubit_index(outcome.measurement.vertex);
    const MeasureResult res =
        measure_qubit(psi, q, outcome.measurement.pre_rotation, outcome.measurement.outcome);
    // the measured vertex is gone from both sides, so qubit ranks agree
    const StateVector rebuilt = build_from_ledger(outcome.ledger_after);
    OracleComparison cmp;
    cmp.state_fidelity = fidelity(rebuilt, res.post);
    cmp.prob_error = std::abs(res.probability - outcome.probability);
    return cmp;
}

OracleComparison replay_pm(const GeneralizedGraphState& pre, int a, int b,
                           const PMEvent& event, const StrategyOutcome& outcome) {
    StateVector psi = build_from_ledger(pre);
    const int qa = pre.qubit_index(a);
    const int qb = pre.qubit_index(b);
    const double p_odd = 0.5 * (1.0 - expectation_zz(psi, qa, qb));

    OracleComparison cmp;
    if (outcome.branch == Branch::Success) {
        apply_op(psi, qa, qb, pm_kraus(event.alpha_pm, event.detector_tag), /*renorm=*/true);
        cmp.state_fidelity = fidelity(build_from_ledger(outcome.ledger_after), psi);
        cmp.prob_error = std::abs(p_odd - outcome.probability);
    } else {
        // heralded failure: both participants reset, modelled as forced |0>
        const MeasureResult first = measure_qubit(psi, std::max(qa, qb),
                                                  Eigen::Matrix2cd::Identity(), 0);
        const MeasureResult second = measure_qubit(first.post, std::min(qa, qb),
                                                   Eigen::Matrix2cd::Identity(), 0);
        cmp.state_fidelity = fidelity(build_from_ledger(outcome.ledger_after), second.post);
        cmp.prob_error = std::abs((1.0 - p_odd) - outcome.probability);
    }
    return cmp;
}

} // namespace ggs
