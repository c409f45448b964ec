#include "ggs/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "ggs/emission.hpp"
#include "ggs/oracle_check.hpp"
#include "ggs/rand.hpp"

namespace ggs {

namespace {

struct Reporter {
    std::vector<CheckResult> results;
    bool current_pass = true;
    double worst = 0.0;

    void observe(double error) {
        worst = std::max(worst, error);
    }
    void expect(bool ok, double error = 0.0) {
        observe(error);
        current_pass = current_pass && ok;
    }
    void finish(const std::string& name) {
        char detail[64];
        std::snprintf(detail, sizeof(detail), "worst error %.3e", worst);
        results.push_back({name, current_pass, detail});
        current_pass = true;
        worst = 0.0;
    }
};

double mat_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

double rand_angle(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// 3-qubit tilted GHZ (core 0, cherries 1 and 2) for realignment replay.
GeneralizedGraphState tilted_ghz3(double alpha) {
    GeneralizedGraphState l;
    l.add_vertex(0, alpha);
    l.add_vertex(1, kQuarterPi);
    l.add_vertex(2, kQuarterPi);
    l.add_edge(0, 1, EdgeKind::Proper);
    l.add_edge(0, 2, EdgeKind::Proper);
    return l;
}

// Intercore scenario: targets 0 and 1 with spectator cherries, intercore 2,
// optional prior record between the targets.
GeneralizedGraphState intercore_scenario(double alpha, double prior_theta, bool fusion_prior) {
    GeneralizedGraphState l;
    l.add_vertex(0, kQuarterPi);
    l.add_vertex(1, kQuarterPi);
    l.add_vertex(2, alpha);
    l.add_vertex(3, kQuarterPi);
    l.add_vertex(4, kQuarterPi);
    l.add_edge(2, 0, EdgeKind::Proper);
    l.add_edge(2, 1, EdgeKind::Proper);
    l.add_edge(0, 3, EdgeKind::Proper);
    l.add_edge(1, 4, EdgeKind::Proper);
    if (std::abs(prior_theta) > kAngleTol) {
        if (fusion_prior) {
            l.add_fusion(0, 1, prior_theta);
        } else {
            l.add_edge(0, 1, EdgeKind::Weighted, prior_theta);
        }
    }
    return l;
}

} // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    Reporter rep;
    std::mt19937_64 rng(seed);

    // --- operator constructors ---------------------------------------------
    for (int i = 0; i < 100; ++i) {
        const double th = rand_angle(rng, -2.0 * kPi, 2.0 * kPi);
        const Eigen::Matrix4cd u = weighted_edge(th);
        rep.expect(mat_error(u.adjoint() * u, Eigen::Matrix4cd::Identity()) <= 1e-12,
                   mat_error(u.adjoint() * u, Eigen::Matrix4cd::Identity()));
        const Eigen::Matrix2cd m = m_rotation(th);
        rep.expect(mat_error(m.adjoint() * m, Eigen::Matrix2cd::Identity()) <= 1e-12,
                   mat_error(m * m, Eigen::Matrix2cd::Identity()));
    }
    rep.finish("unitarity: U(theta), M(alpha) on random angles");

    for (int i = 0; i <= 100; ++i) {
        const double a = -kPi + 2.0 * kPi * i / 100.0;
        const Eigen::Matrix2cd m = m_rotation(a);
        rep.expect(mat_error(m * m, Eigen::Matrix2cd::Identity()) <= 1e-14,
                   mat_error(m * m, Eigen::Matrix2cd::Identity()));
    }
    rep.finish("M involution on 100-point grid");

    {
        const double err = mat_error(-m_rotation(-kQuarterPi), hadamard());
        rep.expect(err <= 1e-12, err);
        rep.finish("M(-pi/4) equals Hadamard up to global phase");
    }

    // --- canonicalization and composition -----------------------------------
    for (int i = 0; i < 200; ++i) {
        const double th = rand_angle(rng, -2.0 * kPi, 2.0 * kPi);
        const CanonicalAngle cw = canonicalize_weighted(th);
        rep.expect(std::abs(cw.theta) <= kQuarterPi + kAngleTol);
        rep.expect(mat_error(weighted_edge(th),
                             cw.byproduct.matrix() * weighted_edge(cw.theta)) <= 1e-12,
                   mat_error(weighted_edge(th),
                             cw.byproduct.matrix() * weighted_edge(cw.theta)));
        const CanonicalAngle cf = canonicalize_fusion(th);
        rep.expect(std::abs(cf.theta) <= kQuarterPi + kAngleTol);
        rep.expect(mat_error(partial_fusion(th),
                             cf.byproduct.matrix() * partial_fusion(cf.theta)) <= 1e-12,
                   mat_error(partial_fusion(th),
                             cf.byproduct.matrix() * partial_fusion(cf.theta)));
    }
    rep.finish("canonicalization soundness (operator identity)");

    for (int i = 0; i < 50; ++i) {
        const double a = rand_angle(rng, -kQuarterPi, kQuarterPi);
        const double b = rand_angle(rng, -kQuarterPi, kQuarterPi);
        const double c = rand_angle(rng, -kQuarterPi, kQuarterPi);
        const CanonicalAngle ab = compose_weighted(a, b);
        const CanonicalAngle ba = compose_weighted(b, a);
        rep.expect(std::abs(ab.theta - ba.theta) <= 1e-12,
                   std::abs(ab.theta - ba.theta));
        const CanonicalAngle abc1 = compose_weighted(ab.theta, c);
        const CanonicalAngle bc = compose_weighted(b, c);
        const CanonicalAngle abc2 = compose_weighted(a, bc.theta);
        rep.expect(std::abs(abc1.theta - abc2.theta) <= 1e-12,
                   std::abs(abc1.theta - abc2.theta));
        const Eigen::Matrix4cd lhs = weighted_edge(a) * weighted_edge(b) * weighted_edge(c);
        const Eigen::Matrix4cd rhs = ab.byproduct.composed(abc1.byproduct).matrix() *
                                     weighted_edge(abc1.theta);
        rep.expect(mat_error(lhs, rhs) <= 1e-12, mat_error(lhs, rhs));
    }
    rep.finish("compose_weighted commutative/associative at operator level");

    for (int i = 0; i < 100; ++i) {
        const double t1 = rand_angle(rng, -kQuarterPi, kQuarterPi);
        const double t2 = rand_angle(rng, -kQuarterPi, kQuarterPi);
        const FusionComposition comp = compose_fusion(t1, t2);
        const Eigen::Matrix4cd lhs = partial_fusion(t2) * partial_fusion(t1);
        const Eigen::Matrix4cd rhs =
            comp.weight * comp.byproduct.matrix() * partial_fusion(comp.theta);
        rep.expect(mat_error(lhs, rhs) <= 1e-12, mat_error(lhs, rhs));
        rep.expect(std::abs(comp.theta) <= kQuarterPi + kAngleTol);
    }
    rep.finish("compose_fusion closed form vs 4x4 product");

    // --- LU equivalence of U(theta) and CZ(4 theta) --------------------------
    for (int i = 0; i < 50; ++i) {
        const double th = rand_angle(rng, -kQuarterPi, kQuarterPi);
        StateVector a = tilted_product({kQuarterPi, kQuarterPi});
        apply_op(a, 1, 0, weighted_edge(th));
        Eigen::Matrix4cd cz4 = Eigen::Matrix4cd::Identity();
        cz4(3, 3) = std::exp(std::complex<double>(0.0, 4.0 * th));
        StateVector b = tilted_product({kQuarterPi, kQuarterPi});
        apply_op(b, 1, 0, cz4);
        Eigen::Matrix2cd ca, cb;
        ca << a.amps[0], a.amps[2], a.amps[1], a.amps[3];
        cb << b.amps[0], b.amps[2], b.amps[1], b.amps[3];
        const Eigen::Vector2d sa = ca.jacobiSvd().singularValues();
        const Eigen::Vector2d sb = cb.jacobiSvd().singularValues();
        const double err = (sa - sb).cwiseAbs().maxCoeff();
        rep.expect(err <= 1e-12, err);
    }
    rep.finish("weighted edge LU-equivalent to CZ(4 theta): Schmidt spectra");

    // --- formula grids against the oracle ------------------------------------
    for (int ia = 1; ia <= 9; ++ia) {
        const double alpha = ia * kHalfPi / 10.0;
        GeneralizedGraphState ghz = tilted_ghz3(alpha);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome out = realign(ghz, 0, 1, b);
            const OracleComparison cmp = replay_measurement(ghz, out);
            rep.expect(cmp.pass(), std::max(1.0 - cmp.state_fidelity, cmp.prob_error));
        }
        const double ps = p_success(alpha);
        rep.expect(ps >= 0.0 && ps <= 0.5);
        const double r = r_exacerbate(alpha);
        if (alpha <= kQuarterPi) {
            rep.expect(std::sin(2.0 * r) <= std::sin(2.0 * alpha) + 1e-12);
        }
    }
    rep.finish("p_s and R against 3-qubit realignment oracle");

    for (int ia = 1; ia <= 9; ++ia) {
        for (int it = 0; it <= 8; ++it) {
            const double alpha = ia * kHalfPi / 10.0;
            const double theta = -kQuarterPi + it * kHalfPi / 8.0;
            for (int sign : {1, -1}) {
                const double pm_val = p_merge(alpha, theta, sign);
                rep.expect(pm_val >= -1e-12 && pm_val <= 1.0 + 1e-12);
                const BridgeParams bp = bridge_params(alpha, theta, sign);
                rep.expect(bp.p_b >= -1e-12 && bp.p_b <= 1.0 + 1e-12);
            }
            const int ms = matched_merge_sign(theta);
            rep.expect(p_merge(alpha, theta, ms) >= p_success(alpha) - 1e-12,
                       p_success(alpha) - p_merge(alpha, theta, ms));
            const int bs = matched_bridge_sign(alpha, theta);
            rep.expect(bridge_params(alpha, theta, bs).p_b >= p_success(alpha) - 1e-12,
                       p_success(alpha) - bridge_params(alpha, theta, bs).p_b);
        }
    }
    rep.finish("benefit monotonicity and probability bounds on 81-point grid");

    for (int i = 0; i < 40; ++i) {
        const double alpha = rand_angle(rng, 0.05, kHalfPi - 0.05);
        const double theta = rand_angle(rng, -kQuarterPi + 0.01, kQuarterPi - 0.01);
        const int sign = rng() % 2 == 0 ? 1 : -1;
        {
            GeneralizedGraphState pre = intercore_scenario(alpha, theta, true);
            for (Branch b : {Branch::Success, Branch::Failure}) {
                const StrategyOutcome out = merge_with_fusion(pre, 2, theta, sign, b);
                const OracleComparison cmp = replay_measurement(pre, out);
                rep.expect(cmp.pass(), std::max(1.0 - cmp.state_fidelity, cmp.prob_error));
            }
        }
        {
            GeneralizedGraphState pre = intercore_scenario(alpha, theta, false);
            for (Branch b : {Branch::Success, Branch::Failure}) {
                const StrategyOutcome out = bridge_with_edge(pre, 2, theta, sign, b);
                const OracleComparison cmp = replay_measurement(pre, out);
                rep.expect(cmp.pass(), std::max(1.0 - cmp.state_fidelity, cmp.prob_error));
            }
        }
    }
    rep.finish("merge/bridge retry formulas vs 5-qubit oracle");

    for (int i = 0; i < 25; ++i) {
        const double alpha = rand_angle(rng, 0.05, kHalfPi - 0.05);
        const int sign = rng() % 2 == 0 ? 1 : -1;
        GeneralizedGraphState pre = intercore_scenario(alpha, 0.0, true);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome attempt = merge_attempt(pre, 2, sign, b);
            const StrategyOutcome with0 = merge_with_fusion(pre, 2, 0.0, sign, b);
            rep.expect(std::abs(attempt.probability - with0.probability) <= 1e-12,
                       std::abs(attempt.probability - with0.probability));
            const double fid = fidelity(build_from_ledger(attempt.ledger_after),
                                        build_from_ledger(with0.ledger_after));
            rep.expect(fid >= 1.0 - 1e-12, 1.0 - fid);

            const StrategyOutcome ba = bridge_attempt(pre, 2, sign, b);
            const StrategyOutcome bw = bridge_with_edge(pre, 2, 0.0, sign, b);
            rep.expect(std::abs(ba.probability - bw.probability) <= 1e-12);
            const double fid2 = fidelity(build_from_ledger(ba.ledger_after),
                                         build_from_ledger(bw.ledger_after));
            rep.expect(fid2 >= 1.0 - 1e-12, 1.0 - fid2);
        }
    }
    rep.finish("theta=0 retry variants reduce to first attempts");

    // --- PM and GHZ fusion ----------------------------------------------------
    for (int i = 0; i < 25; ++i) {
        const double lam = rand_angle(rng, 0.1, kHalfPi - 0.1);
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);
        pre.add_vertex(1, kQuarterPi);
        pre.add_vertex(2, kQuarterPi);
        pre.add_vertex(3, kQuarterPi);
        pre.add_edge(0, 1, EdgeKind::Proper);
        pre.add_edge(2, 3, EdgeKind::Proper);
        const PMEvent ev{lam, static_cast<int>(rng() % 2)};
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome out = pm_attempt(pre, 1, 3, ev, b);
            const OracleComparison cmp = replay_pm(pre, 1, 3, ev, out);
            rep.expect(cmp.pass(), std::max(1.0 - cmp.state_fidelity, cmp.prob_error));
        }
    }
    rep.finish("cherry-pair PM vs oracle (intercore creation)");

    for (int i = 0; i < 25; ++i) {
        const double a1 = rand_angle(rng, 0.15, kHalfPi - 0.15);
        const double a2 = rand_angle(rng, 0.15, kHalfPi - 0.15);
        const double lam = rand_angle(rng, 0.1, kHalfPi - 0.1);
        GeneralizedGraphState pre;
        pre.add_vertex(0, a1);
        pre.add_vertex(1, kQuarterPi);
        pre.add_vertex(2, kQuarterPi);
        pre.add_vertex(3, a2);
        pre.add_vertex(4, kQuarterPi);
        pre.add_edge(0, 1, EdgeKind::Proper);
        pre.add_edge(0, 2, EdgeKind::Proper);
        pre.add_edge(3, 4, EdgeKind::Proper);
        const PMEvent ev{lam, static_cast<int>(rng() % 2)};
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome out = ghz_fuse(pre, 0, 3, ev, b);
            const OracleComparison cmp = replay_pm(pre, 0, 3, ev, out);
            rep.expect(cmp.pass(), std::max(1.0 - cmp.state_fidelity, cmp.prob_error));
        }
    }
    rep.finish("tilted GHZ fusion vs oracle");

    // --- contraction ----------------------------------------------------------
    for (int i = 0; i < 20; ++i) {
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);
        pre.add_vertex(1, kQuarterPi);
        pre.add_vertex(2, kQuarterPi);
        pre.add_vertex(3, kQuarterPi);
        pre.add_edge(0, 1, EdgeKind::Proper);
        pre.add_edge(2, 3, EdgeKind::Proper);
        const double theta = rng() % 2 == 0 ? kQuarterPi : -kQuarterPi;
        pre.add_fusion(1, 2, theta);
        const GeneralizedGraphState post = contract_full_fusion(pre, 1, 2);
        const double fid = fidelity(build_from_ledger(pre), build_from_ledger(post));
        rep.expect(fid >= 1.0 - 1e-10, 1.0 - fid);
        rep.expect(post.fusions().empty());
    }
    rep.finish("full-fusion contraction preserves the state");

    // --- emission model --------------------------------------------------------
    {
        EmissionModel model;
        model.rate_ratio = 1.1;
        double prev = alpha_of_time(model, 0.0);
        int crossings = 0;
        for (int i = 1; i <= 400; ++i) {
            const double t = i * 0.05;
            const double a = alpha_of_time(model, t);
            rep.expect(a > prev);
            if ((prev - kQuarterPi) * (a - kQuarterPi) < 0.0) ++crossings;
            prev = a;
        }
        rep.expect(crossings == 1);
        const double tstar = crossing_time(model);
        rep.expect(std::abs(alpha_of_time(model, tstar) - kQuarterPi) <= 1e-12,
                   std::abs(alpha_of_time(model, tstar) - kQuarterPi));

        for (int i = 1; i < 20; ++i) {
            const double a = i * kHalfPi / 20.0;
            rep.expect(std::abs(fidelity_of_alpha(a) - fidelity_of_alpha(kHalfPi - a)) <= 1e-12);
        }

        double prev_mass = 0.0;
        for (double eps : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.4}) {
            const NaiveWindow w = naive_window_mass(model, eps);
            rep.expect(w.overall_success >= prev_mass - 1e-12);
            prev_mass = w.overall_success;
        }

        for (double ratio : {1.05, 1.1, 1.2, 1.5}) {
            EmissionModel m2;
            m2.rate_ratio = ratio;
            const double adaptive = adaptive_expected_success(m2);
            const double naive = naive_window_mass(m2, 1e-5).overall_success;
            rep.expect(adaptive >= naive, naive - adaptive);
        }
    }
    rep.finish("emission invariants: monotone alpha, F symmetry, window growth");

    return rep.results;
}

} // namespace ggs
