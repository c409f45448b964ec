#include "ggs/strategies.hpp"

#include <cmath>
#include <set>

#include "ggs/rand.hpp"

namespace ggs {

namespace {

Branch pick_branch(std::optional<Branch> forced, double p_success_value,
                   std::mt19937_64* rng, const char* what) {
    double p = p_success_value;
    if (forced) {
        const double p_branch = *forced == Branch::Success ? p : 1.0 - p;
        if (p_branch < 1e-15) {
            throw ImpossibleBranch(std::string(what) + ": forced branch has zero probability");
        }
        return *forced;
    }
    if (rng == nullptr) {
        throw std::invalid_argument(std::string(what) + ": sampling requires an rng");
    }
    return uniform01(*rng) < p ? Branch::Success : Branch::Failure;
}

void require_sign(int sign, const char* what) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument(std::string(what) + ": sign must be +-1");
    }
}

void require_no_fusions(const GeneralizedGraphState& ledger, int id, const char* what) {
    if (!ledger.fusion_partners(id).empty()) {
        throw std::invalid_argument(std::string(what) +
                                    ": fusion record incident to vertex " + std::to_string(id));
    }
}

struct IntercoreInfo {
    double alpha = 0.0;
    int t3 = -1;
    int t4 = -1;
};

// A usable intercore has exactly two proper-edge neighbours, no incident
// fusion record, and proper target tilts (so the closed-form branch
// probabilities are exact).
IntercoreInfo inspect_intercore(const GeneralizedGraphState& ledger, int intercore,
                                const char* what) {
    if (!ledger.has_vertex(intercore)) {
        throw std::invalid_argument(std::string(what) + ": unknown intercore vertex");
    }
    const std::vector<int> nbrs = ledger.neighbors(intercore);
    if (nbrs.size() != 2) {
        throw std::invalid_argument(std::string(what) + ": intercore must have degree 2");
    }
    for (int t : nbrs) {
        if (ledger.edge_between(intercore, t)->kind != EdgeKind::Proper) {
            throw std::invalid_argument(std::string(what) +
                                        ": intercore edges must be proper");
        }
        if (!is_proper_tilt(ledger.tilt(t))) {
            throw std::invalid_argument(std::string(what) + ": target vertex is tilted");
        }
    }
    require_no_fusions(ledger, intercore, what);
    return IntercoreInfo{ledger.tilt(intercore), nbrs[0], nbrs[1]};
}

Eigen::Matrix2cd absorb_frame(const Eigen::Matrix2cd& rotation, const LocalFrame& frame) {
    return rotation * frame.matrix().adjoint();
}

// Fresh or cherry qubit usable as a PM participant: proper tilt, at most one
// (proper) edge, no fusion record, diagonal frame so the parity Kraus
// commutes with it.
void check_pm_participant(const GeneralizedGraphState& ledger, int id, const char* what) {
    if (!ledger.has_vertex(id)) {
        throw std::invalid_argument(std::string(what) + ": unknown qubit");
    }
    if (!is_proper_tilt(ledger.tilt(id))) {
        throw std::invalid_argument(std::string(what) + ": PM participant must be proper");
    }
    const std::vector<int> nbrs = ledger.neighbors(id);
    if (nbrs.size() > 1) {
        throw std::invalid_argument(std::string(what) +
                                    ": PM participant must be fresh or a cherry");
    }
    for (int w : nbrs) {
        if (ledger.edge_between(id, w)->kind != EdgeKind::Proper) {
            throw std::invalid_argument(std::string(what) + ": weighted edge on participant");
        }
    }
    require_no_fusions(ledger, id, what);
    if (!ledger.frame(id).is_diagonal()) {
        throw std::invalid_argument(std::string(what) + ": non-diagonal frame on participant");
    }
}

// Moves b's neighbourhood onto a (symmetric difference), attaches b as a
// cherry of a and writes the parity-projection byproducts. Shared rewrite of
// pm_attempt and ghz_fuse.
void fuse_onto_survivor(GeneralizedGraphState& ledger, int a, int b, double new_tilt,
                        int detector_tag) {
    const std::vector<int> na = ledger.neighbors(a);
    const std::vector<int> nb = ledger.neighbors(b);
    std::set<int> sym_diff;
    for (int v : na) {
        if (v != b) sym_diff.insert(v);
    }
    for (int v : nb) {
        if (v == a) continue;
        if (!sym_diff.insert(v).second) sym_diff.erase(v);
    }
    for (int v : na) ledger.erase_edge(a, v);
    for (int v : nb) ledger.erase_edge(b, v);
    for (int v : sym_diff) ledger.add_edge(a, v, EdgeKind::Proper);
    ledger.add_edge(a, b, EdgeKind::Proper);
    ledger.set_tilt(a, new_tilt);
    ledger.set_tilt(b, kQuarterPi);  // the partner is re-expressed as a proper cherry

    ledger.tag_under_frame(b, kFrameXH);
    for (int v : nb) {
        if (v != a) ledger.tag_under_frame(v, kFrameZ);
    }
    if (detector_tag != 0) ledger.tag_under_frame(a, kFrameZ);
}

} // namespace

Eigen::Matrix4cd pm_kraus(double alpha_pm, int detector_tag) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    const double sign = detector_tag != 0 ? -1.0 : 1.0;
    m(1, 1) = std::cos(alpha_pm);         // |01><01|, first qubit = high bit
    m(2, 2) = sign * std::sin(alpha_pm);  // |10><10|
    return m;
}

StrategyOutcome pm_attempt(const GeneralizedGraphState& ledger, int a, int b,
                           const PMEvent& event, std::optional<Branch> forced,
                           std::mt19937_64* rng) {
    check_pm_participant(ledger, a, "pm_attempt");
    check_pm_participant(ledger, b, "pm_attempt");
    if (a == b) throw std::invalid_argument("pm_attempt: participants must differ");
    require_tilt(event.alpha_pm, "pm_attempt");

    // Heralding statistics: the single-click odd-parity sector carries
    // probability 1/2 for maximally mixed participants, which the
    // preconditions guarantee; the click time only sets alpha_pm.
    const double p = 0.5;
    const Branch branch = pick_branch(forced, p, rng, "pm_attempt");

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    if (branch == Branch::Success) {
        out.probability = p;
        fuse_onto_survivor(out.ledger_after, a, b, event.alpha_pm, event.detector_tag);
        out.notes = "pm success: tilted pairing alpha_pm installed, survivor " +
                    std::to_string(a);
    } else {
        out.probability = 1.0 - p;
        out.ledger_after.drop_vertex_raw(a);
        out.ledger_after.drop_vertex_raw(b);
        out.notes = "pm failure: both participants lost";
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome ghz_fuse(const GeneralizedGraphState& ledger, int core1, int core2,
                         const PMEvent& event, std::optional<Branch> forced,
                         std::mt19937_64* rng) {
    const char* what = "ghz_fuse";
    if (core1 == core2) throw std::invalid_argument("ghz_fuse: cores must differ");
    for (int core : {core1, core2}) {
        if (!ledger.has_vertex(core)) {
            throw std::invalid_argument("ghz_fuse: unknown core vertex");
        }
        require_no_fusions(ledger, core, what);
        if (!ledger.frame(core).is_diagonal()) {
            throw std::invalid_argument("ghz_fuse: non-diagonal frame on core");
        }
        for (int cherry : ledger.neighbors(core)) {
            if (ledger.edge_between(core, cherry)->kind != EdgeKind::Proper) {
                throw std::invalid_argument("ghz_fuse: weighted edge in GHZ star");
            }
            if (ledger.degree(cherry) != 1 || !is_proper_tilt(ledger.tilt(cherry))) {
                throw std::invalid_argument("ghz_fuse: core neighbour is not a proper cherry");
            }
            require_no_fusions(ledger, cherry, what);
        }
    }
    if (ledger.same_component(core1, core2)) {
        throw std::invalid_argument("ghz_fuse: GHZ states must be disjoint");
    }
    require_tilt(event.alpha_pm, "ghz_fuse");

    const double a1 = ledger.tilt(core1);
    const double a2 = ledger.tilt(core2);
    const double p = 0.5 * (1.0 - std::cos(2.0 * a1) * std::cos(2.0 * a2));
    const Branch branch = pick_branch(forced, p, rng, what);

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    if (branch == Branch::Success) {
        out.probability = p;
        const double lam = event.alpha_pm;
        const double alpha3 = std::atan2(std::sin(lam) * std::sin(a1) * std::cos(a2),
                                         std::cos(lam) * std::cos(a1) * std::sin(a2));
        fuse_onto_survivor(out.ledger_after, core1, core2, alpha3, event.detector_tag);
        out.notes = "ghz_fuse success: tilt " + std::to_string(alpha3);
    } else {
        out.probability = 1.0 - p;
        out.ledger_after.drop_vertex_raw(core1);
        out.ledger_after.drop_vertex_raw(core2);
        out.notes = "ghz_fuse failure: both cores lost";
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome realign(const GeneralizedGraphState& ledger, int tilted_vertex, int cherry,
                        std::optional<Branch> forced, std::mt19937_64* rng) {
    if (!ledger.has_vertex(tilted_vertex)) {
        throw std::invalid_argument("realign: unknown vertex");
    }
    if (!ledger.has_vertex(cherry) || ledger.degree(cherry) != 1 ||
        !ledger.edge_between(tilted_vertex, cherry) ||
        ledger.edge_between(tilted_vertex, cherry)->kind != EdgeKind::Proper ||
        !is_proper_tilt(ledger.tilt(cherry))) {
        throw CherrylessError("realign: chosen qubit is not a cherry of the vertex");
    }
    require_no_fusions(ledger, tilted_vertex, "realign");
    require_no_fusions(ledger, cherry, "realign");

    const double alpha = ledger.tilt(tilted_vertex);
    const double p = p_success(alpha);
    const Branch branch = pick_branch(forced, p, rng, "realign");

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    // Tuned basis: rotate the cherry by M(pi/4 - alpha), measure Z; outcome 0
    // removes the tilt, outcome 1 exacerbates it to R(alpha) with a Z
    // byproduct on the vertex.
    out.measurement.vertex = cherry;
    out.measurement.pre_rotation =
        absorb_frame(m_rotation(kQuarterPi - alpha), ledger.frame(cherry));
    out.measurement.outcome = branch == Branch::Success ? 0 : 1;
    out.probability = branch == Branch::Success ? p : 1.0 - p;

    out.ledger_after.drop_vertex_raw(cherry);
    if (branch == Branch::Success) {
        out.ledger_after.set_tilt(tilted_vertex, kQuarterPi);
        out.notes = "realign success: tilt removed";
    } else {
        out.ledger_after.set_tilt(tilted_vertex, r_exacerbate(alpha));
        out.ledger_after.tag_under_frame(tilted_vertex, kFrameZ);
        out.notes = "realign failure: tilt exacerbated";
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome merge_attempt(const GeneralizedGraphState& ledger, int intercore, int sign,
                              std::optional<Branch> forced, std::mt19937_64* rng) {
    require_sign(sign, "merge_attempt");
    const IntercoreInfo info = inspect_intercore(ledger, intercore, "merge_attempt");
    if (ledger.fusion_between(info.t3, info.t4)) {
        throw std::invalid_argument("merge_attempt: prior fusion present; use merge_with_fusion");
    }
    const double p = p_success(info.alpha);
    const Branch branch = pick_branch(forced, p, rng, "merge_attempt");

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    out.measurement.vertex = intercore;
    out.measurement.pre_rotation =
        absorb_frame(m_rotation(sign * info.alpha), ledger.frame(intercore));
    out.measurement.outcome = branch == Branch::Success ? 1 : 0;
    out.probability = branch == Branch::Success ? p : 1.0 - p;

    out.ledger_after.drop_vertex_raw(intercore);
    if (branch == Branch::Success) {
        out.ledger_after.add_fusion(info.t3, info.t4, sign * kQuarterPi);
        out.notes = "merge success: full fusion installed";
    } else {
        out.ledger_after.add_fusion(info.t3, info.t4, -sign * r_exacerbate(info.alpha));
        out.notes = "merge failure: partial fusion recycled";
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome merge_with_fusion(const GeneralizedGraphState& ledger, int intercore,
                                  double prior_theta, int sign,
                                  std::optional<Branch> forced, std::mt19937_64* rng) {
    require_sign(sign, "merge_with_fusion");
    const IntercoreInfo info = inspect_intercore(ledger, intercore, "merge_with_fusion");
    const auto prior = ledger.fusion_between(info.t3, info.t4);
    const bool has_prior = std::abs(prior_theta) > kAngleTol;  // P(0) = I is never stored
    if (has_prior ? (!prior || std::abs(*prior - prior_theta) > kAngleTol)
                  : prior.has_value()) {
        throw std::invalid_argument(
            "merge_with_fusion: prior fusion record does not match prior_theta");
    }
    const double p = p_merge(info.alpha, prior_theta, sign);
    const Branch branch = pick_branch(forced, p, rng, "merge_with_fusion");

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    out.measurement.vertex = intercore;
    out.measurement.pre_rotation =
        absorb_frame(m_rotation(sign * info.alpha), ledger.frame(intercore));
    out.measurement.outcome = branch == Branch::Success ? 1 : 0;
    out.probability = branch == Branch::Success ? p : 1.0 - p;

    out.ledger_after.drop_vertex_raw(intercore);
    out.ledger_after.erase_fusion(info.t3, info.t4);
    if (branch == Branch::Success) {
        out.ledger_after.add_fusion(info.t3, info.t4, sign * kQuarterPi);
        out.notes = "merge retry success: fusion upgraded to full";
    } else {
        const FusionComposition comp =
            compose_fusion(prior_theta, -sign * r_exacerbate(info.alpha));
        if (comp.byproduct.z_a) {
            out.ledger_after.tag_under_frame(std::min(info.t3, info.t4), kFrameZ);
        }
        if (comp.byproduct.z_b) {
            out.ledger_after.tag_under_frame(std::max(info.t3, info.t4), kFrameZ);
        }
        out.ledger_after.add_fusion(info.t3, info.t4, comp.theta);
        out.notes = "merge retry failure: fusions composed";
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome merge_deterministic(const GeneralizedGraphState& ledger, int intercore,
                                    double prior_theta, std::optional<Branch> forced,
                                    std::mt19937_64* rng) {
    const IntercoreInfo info = inspect_intercore(ledger, intercore, "merge_deterministic");
    if (!is_proper_tilt(info.alpha)) {
        throw std::invalid_argument("merge_deterministic: intercore must be untilted");
    }
    const auto prior = ledger.fusion_between(info.t3, info.t4);
    const bool has_prior = std::abs(prior_theta) > kAngleTol;
    if (has_prior ? (!prior || std::abs(*prior - prior_theta) > kAngleTol)
                  : prior.has_value()) {
        throw std::invalid_argument(
            "merge_deterministic: prior fusion record does not match prior_theta");
    }

    // X-basis measurement; forced Success selects the even outcome.
    const double p_even = 0.5 * (1.0 + std::sin(2.0 * prior_theta));
    const Branch sel = pick_branch(forced, p_even, rng, "merge_deterministic");
    const bool even = sel == Branch::Success;

    StrategyOutcome out;
    out.branch = Branch::Success;  // a full fusion lands either way
    out.probability = even ? p_even : 1.0 - p_even;
    out.ledger_after = ledger;
    out.measurement.vertex = intercore;
    out.measurement.pre_rotation = absorb_frame(hadamard(), ledger.frame(intercore));
    out.measurement.outcome = even ? 0 : 1;

    out.ledger_after.drop_vertex_raw(intercore);
    out.ledger_after.erase_fusion(info.t3, info.t4);
    out.ledger_after.add_fusion(info.t3, info.t4, even ? kQuarterPi : -kQuarterPi);
    out.notes = even ? "deterministic merge: even parity" : "deterministic merge: odd parity";
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome bridge_attempt(const GeneralizedGraphState& ledger, int intercore, int sign,
                               std::optional<Branch> forced, std::mt19937_64* rng) {
    require_sign(sign, "bridge_attempt");
    const IntercoreInfo info = inspect_intercore(ledger, intercore, "bridge_attempt");
    if (ledger.edge_between(info.t3, info.t4)) {
        throw std::invalid_argument("bridge_attempt: prior edge present; use bridge_with_edge");
    }
    const double p = p_success(info.alpha);
    const Branch branch = pick_branch(forced, p, rng, "bridge_attempt");

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    out.measurement.vertex = intercore;
    out.measurement.pre_rotation =
        absorb_frame(m_rotation(sign * info.alpha) * s_gate(), ledger.frame(intercore));
    out.measurement.outcome = branch == Branch::Success ? 1 : 0;
    out.probability = branch == Branch::Success ? p : 1.0 - p;

    out.ledger_after.drop_vertex_raw(intercore);
    if (branch == Branch::Success) {
        out.ledger_after.add_edge(info.t3, info.t4, EdgeKind::Weighted, sign * kQuarterPi);
        out.notes = "bridge success: full weighted edge installed";
    } else {
        out.ledger_after.add_edge(info.t3, info.t4, EdgeKind::Weighted,
                                  -sign * r_exacerbate(info.alpha));
        out.notes = "bridge failure: weighted edge recycled";
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome bridge_with_edge(const GeneralizedGraphState& ledger, int intercore,
                                 double prior_theta, int sign,
                                 std::optional<Branch> forced, std::mt19937_64* rng) {
    require_sign(sign, "bridge_with_edge");
    const IntercoreInfo info = inspect_intercore(ledger, intercore, "bridge_with_edge");
    const auto prior = ledger.edge_between(info.t3, info.t4);
    const bool has_prior = std::abs(prior_theta) > kAngleTol;  // U(0) = I is never stored
    if (has_prior ? (!prior || prior->kind != EdgeKind::Weighted ||
                     std::abs(prior->theta - prior_theta) > kAngleTol)
                  : prior.has_value()) {
        throw std::invalid_argument(
            "bridge_with_edge: prior weighted edge does not match prior_theta");
    }
    const BridgeParams params = bridge_params(info.alpha, prior_theta, sign);
    const Branch branch = pick_branch(forced, params.p_b, rng, "bridge_with_edge");

    StrategyOutcome out;
    out.branch = branch;
    out.ledger_after = ledger;
    out.measurement.vertex = intercore;
    out.measurement.pre_rotation =
        absorb_frame(m_rotation(params.beta) * s_gate(), ledger.frame(intercore));
    out.measurement.outcome = branch == Branch::Success ? 1 : 0;
    out.probability = branch == Branch::Success ? params.p_b : 1.0 - params.p_b;

    out.ledger_after.drop_vertex_raw(intercore);
    out.ledger_after.erase_edge(info.t3, info.t4);
    if (branch == Branch::Success) {
        out.ledger_after.add_edge(info.t3, info.t4, EdgeKind::Weighted, sign * kQuarterPi);
        out.notes = "bridge retry success: edge completed";
    } else {
        out.ledger_after.add_edge(info.t3, info.t4, EdgeKind::Weighted, params.lambda_f);
        out.notes = "bridge retry failure: weighted edge " + std::to_string(params.lambda_f);
    }
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

StrategyOutcome bridge_deterministic(const GeneralizedGraphState& ledger, int intercore,
                                     double prior_theta, std::optional<Branch> forced,
                                     std::mt19937_64* rng) {
    const IntercoreInfo info = inspect_intercore(ledger, intercore, "bridge_deterministic");
    if (!is_proper_tilt(info.alpha)) {
        throw std::invalid_argument("bridge_deterministic: intercore must be untilted");
    }
    const auto prior = ledger.edge_between(info.t3, info.t4);
    const bool has_prior = std::abs(prior_theta) > kAngleTol;
    if (has_prior ? (!prior || prior->kind != EdgeKind::Weighted ||
                     std::abs(prior->theta - prior_theta) > kAngleTol)
                  : prior.has_value()) {
        throw std::invalid_argument(
            "bridge_deterministic: prior edge record does not match prior_theta");
    }

    // Target the full edge on the nearer side; both outcomes add exactly
    // U(sign pi/4 - prior_theta), outcome 0 with an extra i Z Z byproduct.
    const int sign = prior_theta >= 0.0 ? 1 : -1;
    const double lambda = sign * kQuarterPi - prior_theta;
    const Branch sel = pick_branch(forced, 0.5, rng, "bridge_deterministic");
    const bool plain = sel == Branch::Success;

    StrategyOutcome out;
    out.branch = Branch::Success;
    out.probability = 0.5;
    out.ledger_after = ledger;
    out.measurement.vertex = intercore;
    out.measurement.pre_rotation =
        absorb_frame(m_rotation(kHalfPi - lambda) * s_gate(), ledger.frame(intercore));
    out.measurement.outcome = plain ? 1 : 0;

    out.ledger_after.drop_vertex_raw(intercore);
    out.ledger_after.erase_edge(info.t3, info.t4);
    out.ledger_after.add_edge(info.t3, info.t4, EdgeKind::Weighted, sign * kQuarterPi);
    if (!plain) {
        out.ledger_after.tag_under_frame(info.t3, kFrameZ);
        out.ledger_after.tag_under_frame(info.t4, kFrameZ);
    }
    out.notes = plain ? "deterministic bridge: edge completed"
                      : "deterministic bridge: edge completed, ZZ byproduct";
    out.ledger_after.bump_log_weight(std::sqrt(out.probability));
    return out;
}

} // namespace ggs
