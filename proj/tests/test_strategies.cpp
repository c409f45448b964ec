#include <doctest.h>

#include <cmath>
#include <random>

#include "ggs/oracle_check.hpp"
#include "ggs/rand.hpp"

using namespace ggs;

namespace {

constexpr double kRPi8 = 0.16991845472706116;  // R(pi/8)

GeneralizedGraphState tilted_ghz(double core_tilt, int cherries) {
    GeneralizedGraphState l;
    l.add_vertex(0, core_tilt);
    for (int i = 1; i <= cherries; ++i) {
        l.add_vertex(i, kQuarterPi);
        l.add_edge(0, i, EdgeKind::Proper);
    }
    return l;
}

// intercore 2 with tilt alpha between targets 0 and 1 (each kept honest with
// a spectator cherry), optional prior record between the targets
GeneralizedGraphState intercore(double alpha, double prior = 0.0, bool fusion_prior = true) {
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
    if (std::abs(prior) > kAngleTol) {
        if (fusion_prior) {
            l.add_fusion(0, 1, prior);
        } else {
            l.add_edge(0, 1, EdgeKind::Weighted, prior);
        }
    }
    return l;
}

void check_oracle(const GeneralizedGraphState& pre, const StrategyOutcome& out,
                  double tol = 1e-10) {
    const OracleComparison cmp = replay_measurement(pre, out);
    CHECK(cmp.state_fidelity >= 1.0 - tol);
    CHECK(cmp.prob_error <= tol);
}

} // namespace

TEST_CASE("realign") {
    SUBCASE("alpha = pi/8: success 0.25 removes the tilt, failure exacerbates") {
        const GeneralizedGraphState pre = tilted_ghz(kPi / 8.0, 2);
        const StrategyOutcome s = realign(pre, 0, 1, Branch::Success);
        CHECK(s.probability == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(s.ledger_after.tilt(0) == doctest::Approx(kQuarterPi));
        CHECK_FALSE(s.ledger_after.has_vertex(1));
        check_oracle(pre, s);

        const StrategyOutcome f = realign(pre, 0, 1, Branch::Failure);
        CHECK(f.probability == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(f.ledger_after.tilt(0) == doctest::Approx(kRPi8).epsilon(1e-9));
        CHECK(f.ledger_after.frame(0) == kFrameZ);
        check_oracle(pre, f);
    }
    SUBCASE("degenerate alpha = pi/4: both branches leave a proper vertex") {
        const GeneralizedGraphState pre = tilted_ghz(kQuarterPi, 2);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome out = realign(pre, 0, 1, b);
            CHECK(out.probability == doctest::Approx(0.5));
            CHECK(out.ledger_after.tilt(0) == doctest::Approx(kQuarterPi));
            check_oracle(pre, out);
        }
    }
    SUBCASE("success probability vanishes with the tilt") {
        const GeneralizedGraphState pre = tilted_ghz(1e-6, 1);
        CHECK(realign(pre, 0, 1, Branch::Failure).probability ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("cherryless vertex raises CherrylessError") {
        GeneralizedGraphState l = intercore(0.5);
        CHECK_THROWS_AS(realign(l, 2, 0, Branch::Success), CherrylessError);
    }
    SUBCASE("works through a frame on the cherry") {
        GeneralizedGraphState pre = tilted_ghz(0.6, 2);
        pre.apply_local(1, kFrameXH);
        pre.apply_local(0, kFrameZ);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            check_oracle(pre, realign(pre, 0, 1, b));
        }
    }
}

TEST_CASE("pm_attempt") {
    SUBCASE("fresh pair at alpha_pm: success state is cos|01> + sin|10>") {
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);
        pre.add_vertex(1, kQuarterPi);
        const PMEvent ev{kPi / 8.0, 0};
        const StrategyOutcome out = pm_attempt(pre, 0, 1, ev, Branch::Success);
        CHECK(out.probability == doctest::Approx(0.5));
        CHECK(out.ledger_after.tilt(0) == doctest::Approx(kPi / 8.0));
        const StateVector built = build_from_ledger(out.ledger_after);
        StateVector target = basis_state(2, 0);
        target.amps[0] = target.amps[3] = 0.0;
        target.amps[2] = std::cos(kPi / 8.0);  // |01>: first qubit 0, second 1
        target.amps[1] = std::sin(kPi / 8.0);
        CHECK(fidelity(built, target) == doctest::Approx(1.0).epsilon(1e-12));
        const OracleComparison cmp = replay_pm(pre, 0, 1, ev, out);
        CHECK(cmp.pass());
    }
    SUBCASE("ideal click gives a proper pair, LU-equivalent to a graph edge") {
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);
        pre.add_vertex(1, kQuarterPi);
        const StrategyOutcome out = pm_attempt(pre, 0, 1, PMEvent{kQuarterPi, 0},
                                               Branch::Success);
        CHECK(out.ledger_after.tilt(0) == doctest::Approx(kQuarterPi));
        REQUIRE(out.ledger_after.edge_between(0, 1));
        CHECK(out.ledger_after.edge_between(0, 1)->kind == EdgeKind::Proper);
    }
    SUBCASE("forced failure removes both qubits and nothing else") {
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);  // core with cherry 1
        pre.add_vertex(1, kQuarterPi);
        pre.add_vertex(2, kQuarterPi);  // fresh
        pre.add_edge(0, 1, EdgeKind::Proper);
        const PMEvent ev{0.5, 0};
        const StrategyOutcome out = pm_attempt(pre, 1, 2, ev, Branch::Failure);
        CHECK(out.probability == doctest::Approx(0.5));
        CHECK(out.ledger_after.num_vertices() == 1);
        CHECK(out.ledger_after.has_vertex(0));
        const OracleComparison cmp = replay_pm(pre, 1, 2, ev, out);
        CHECK(cmp.pass());
    }
    SUBCASE("cherry fusion creates the intercore-with-cherry structure") {
        GeneralizedGraphState pre;
        for (int v = 0; v < 4; ++v) pre.add_vertex(v, kQuarterPi);
        pre.add_edge(0, 1, EdgeKind::Proper);
        pre.add_edge(2, 3, EdgeKind::Proper);
        const PMEvent ev{0.7, 0};
        const StrategyOutcome out = pm_attempt(pre, 1, 3, ev, Branch::Success);
        CHECK(out.ledger_after.tilt(1) == doctest::Approx(0.7));
        CHECK(out.ledger_after.edge_between(1, 0));
        CHECK(out.ledger_after.edge_between(1, 2));
        CHECK(out.ledger_after.edge_between(1, 3));
        CHECK(classify_vertex(out.ledger_after, 3) == VertexRole::Cherry);
        CHECK(replay_pm(pre, 1, 3, ev, out).pass());
    }
    SUBCASE("detector tag flips a local sign only") {
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);
        pre.add_vertex(1, kQuarterPi);
        const PMEvent ev{0.9, 1};
        const StrategyOutcome out = pm_attempt(pre, 0, 1, ev, Branch::Success);
        CHECK(replay_pm(pre, 0, 1, ev, out).pass());
        CHECK(out.ledger_after.frame(0) == kFrameZ);
    }
    SUBCASE("participants must be fresh or cherries") {
        GeneralizedGraphState pre = tilted_ghz(kQuarterPi, 3);
        pre.add_vertex(9, kQuarterPi);
        CHECK_THROWS_AS(pm_attempt(pre, 0, 9, PMEvent{0.5, 0}, Branch::Success),
                        std::invalid_argument);
    }
}

TEST_CASE("ghz_fuse") {
    SUBCASE("all-ideal fusion keeps a proper GHZ") {
        GeneralizedGraphState pre;
        pre.add_vertex(0, kQuarterPi);
        pre.add_vertex(1, kQuarterPi);
        pre.add_vertex(2, kQuarterPi);
        pre.add_vertex(3, kQuarterPi);
        pre.add_edge(0, 1, EdgeKind::Proper);
        pre.add_edge(2, 3, EdgeKind::Proper);
        const StrategyOutcome out = ghz_fuse(pre, 0, 2, PMEvent{kQuarterPi, 0},
                                             Branch::Success);
        CHECK(out.ledger_after.tilt(0) == doctest::Approx(kQuarterPi));
        CHECK(out.probability == doctest::Approx(0.5));
        CHECK(out.ledger_after.degree(0) == 3);
    }
    SUBCASE("frozen tilt fixtures") {
        // proper cores, alpha_pm = pi/8 -> alpha3 = pi/8
        GeneralizedGraphState a;
        a.add_vertex(0, kQuarterPi);
        a.add_vertex(1, kQuarterPi);
        a.add_vertex(2, kQuarterPi);
        a.add_vertex(3, kQuarterPi);
        a.add_edge(0, 1, EdgeKind::Proper);
        a.add_edge(2, 3, EdgeKind::Proper);
        CHECK(ghz_fuse(a, 0, 2, PMEvent{kPi / 8.0, 0}, Branch::Success)
                  .ledger_after.tilt(0) == doctest::Approx(kPi / 8.0).epsilon(1e-12));
        // alpha1 = pi/8 survivor, ideal click -> alpha3 = pi/8 again
        GeneralizedGraphState b;
        b.add_vertex(0, kPi / 8.0);
        b.add_vertex(1, kQuarterPi);
        b.add_vertex(2, kQuarterPi);
        b.add_vertex(3, kQuarterPi);
        b.add_edge(0, 1, EdgeKind::Proper);
        b.add_edge(2, 3, EdgeKind::Proper);
        CHECK(ghz_fuse(b, 0, 2, PMEvent{kQuarterPi, 0}, Branch::Success)
                  .ledger_after.tilt(0) == doctest::Approx(kPi / 8.0).epsilon(1e-12));
    }
    SUBCASE("success probability is the odd-sector weight, built from <Z>") {
        GeneralizedGraphState pre;
        pre.add_vertex(0, 0.6);
        pre.add_vertex(1, kQuarterPi);
        pre.add_vertex(2, kQuarterPi);
        pre.add_vertex(3, 1.1);
        pre.add_vertex(4, kQuarterPi);
        pre.add_edge(0, 1, EdgeKind::Proper);
        pre.add_edge(0, 2, EdgeKind::Proper);
        pre.add_edge(3, 4, EdgeKind::Proper);
        const StateVector sv = build_from_ledger(pre);
        CHECK(expectation_z(sv, 0) == doctest::Approx(std::cos(1.2)).epsilon(1e-12));
        CHECK(expectation_z(sv, 3) == doctest::Approx(std::cos(2.2)).epsilon(1e-12));
        const StrategyOutcome out = ghz_fuse(pre, 0, 3, PMEvent{0.5, 0}, Branch::Success);
        CHECK(out.probability ==
              doctest::Approx(0.5 * (1.0 - std::cos(1.2) * std::cos(2.2))).epsilon(1e-12));
    }
    SUBCASE("tilted cores against the oracle, both branches") {
        std::mt19937_64 rng(321);
        for (int i = 0; i < 30; ++i) {
            GeneralizedGraphState pre;
            const double a1 = 0.2 + 1.1 * uniform01(rng);
            const double a2 = 0.2 + 1.1 * uniform01(rng);
            pre.add_vertex(0, a1);
            pre.add_vertex(1, kQuarterPi);
            pre.add_vertex(2, kQuarterPi);
            pre.add_vertex(3, a2);
            pre.add_vertex(4, kQuarterPi);
            pre.add_edge(0, 1, EdgeKind::Proper);
            pre.add_edge(0, 2, EdgeKind::Proper);
            pre.add_edge(3, 4, EdgeKind::Proper);
            const PMEvent ev{0.1 + 1.3 * uniform01(rng), static_cast<int>(rng() % 2)};
            for (Branch br : {Branch::Success, Branch::Failure}) {
                const StrategyOutcome out = ghz_fuse(pre, 0, 3, ev, br);
                CHECK(replay_pm(pre, 0, 3, ev, out).pass());
            }
        }
    }
    SUBCASE("fusing within one component is rejected") {
        GeneralizedGraphState pre = tilted_ghz(kQuarterPi, 2);
        CHECK_THROWS_AS(ghz_fuse(pre, 0, 1, PMEvent{0.5, 0}, Branch::Success),
                        std::invalid_argument);
    }
}

TEST_CASE("merge_attempt") {
    SUBCASE("alpha = pi/8, sign +: frozen branch values") {
        const GeneralizedGraphState pre = intercore(kPi / 8.0);
        const StrategyOutcome s = merge_attempt(pre, 2, 1, Branch::Success);
        CHECK(s.probability == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(s.ledger_after.fusion_between(0, 1).value() == doctest::Approx(kQuarterPi));
        check_oracle(pre, s);
        const StrategyOutcome f = merge_attempt(pre, 2, 1, Branch::Failure);
        CHECK(f.probability == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(f.ledger_after.fusion_between(0, 1).value() ==
              doctest::Approx(-kRPi8).epsilon(1e-9));
        check_oracle(pre, f);
    }
    SUBCASE("alpha = pi/4 is deterministic up to the parity byproduct") {
        const GeneralizedGraphState pre = intercore(kQuarterPi);
        const StrategyOutcome s = merge_attempt(pre, 2, 1, Branch::Success);
        const StrategyOutcome f = merge_attempt(pre, 2, 1, Branch::Failure);
        CHECK(s.probability == doctest::Approx(0.5));
        CHECK(s.ledger_after.fusion_between(0, 1).value() == doctest::Approx(kQuarterPi));
        // the failure branch is itself a full (odd) fusion
        CHECK(f.ledger_after.fusion_between(0, 1).value() == doctest::Approx(-kQuarterPi));
        check_oracle(pre, s);
        check_oracle(pre, f);
    }
    SUBCASE("vanishing tilt never merges") {
        const GeneralizedGraphState pre = intercore(1e-5);
        const StrategyOutcome f = merge_attempt(pre, 2, -1, Branch::Failure);
        CHECK(f.probability == doctest::Approx(1.0).epsilon(1e-9));
        // the leftover fusion angle collapses to zero (record may vanish)
        CHECK(std::abs(f.ledger_after.fusion_between(0, 1).value_or(0.0)) <= 1e-4);
    }
    SUBCASE("prior fusion requires the retry variant") {
        const GeneralizedGraphState pre = intercore(0.5, 0.2);
        CHECK_THROWS_AS(merge_attempt(pre, 2, 1, Branch::Success), std::invalid_argument);
    }
}

TEST_CASE("merge_with_fusion") {
    SUBCASE("alpha2 = theta1 = pi/8, matched: p = 0.4267766...") {
        const GeneralizedGraphState pre = intercore(kPi / 8.0, kPi / 8.0);
        const StrategyOutcome s = merge_with_fusion(pre, 2, kPi / 8.0, 1, Branch::Success);
        CHECK(s.probability == doctest::Approx(0.42677669529663687).epsilon(1e-12));
        CHECK(s.ledger_after.fusion_between(0, 1).value() == doctest::Approx(kQuarterPi));
        check_oracle(pre, s);
        const StrategyOutcome f = merge_with_fusion(pre, 2, kPi / 8.0, 1, Branch::Failure);
        const FusionComposition expect = compose_fusion(kPi / 8.0, -kRPi8);
        CHECK(f.ledger_after.fusion_between(0, 1).value() ==
              doctest::Approx(expect.theta).epsilon(1e-9));
        check_oracle(pre, f);
    }
    SUBCASE("full prior fusion completes deterministically") {
        const GeneralizedGraphState pre = intercore(kQuarterPi, kQuarterPi);
        const StrategyOutcome s = merge_with_fusion(pre, 2, kQuarterPi, 1, Branch::Success);
        CHECK(s.probability == doctest::Approx(1.0));
        CHECK_THROWS_AS(merge_with_fusion(pre, 2, kQuarterPi, 1, Branch::Failure),
                        ImpossibleBranch);
    }
    SUBCASE("theta1 = 0 reduces exactly to merge_attempt") {
        const GeneralizedGraphState pre = intercore(0.6);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome attempt = merge_attempt(pre, 2, -1, b);
            const StrategyOutcome retry = merge_with_fusion(pre, 2, 0.0, -1, b);
            CHECK(attempt.probability == doctest::Approx(retry.probability).epsilon(1e-14));
            CHECK(fidelity(build_from_ledger(attempt.ledger_after),
                           build_from_ledger(retry.ledger_after)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("recycling beats the first attempt on the whole grid") {
        for (int ia = 1; ia <= 9; ++ia) {
            for (int it = 1; it <= 8; ++it) {
                const double alpha = ia * kHalfPi / 10.0;
                const double theta = -kQuarterPi + it * kHalfPi / 9.0;
                const GeneralizedGraphState pre = intercore(alpha, theta);
                const int sign = matched_merge_sign(theta);
                const StrategyOutcome s = merge_with_fusion(pre, 2, theta, sign,
                                                            Branch::Success);
                CHECK(s.probability >= p_success(alpha) - 1e-12);
            }
        }
    }
}

TEST_CASE("merge_deterministic") {
    SUBCASE("no prior: even and odd each 1/2") {
        const GeneralizedGraphState pre = intercore(kQuarterPi);
        const StrategyOutcome even = merge_deterministic(pre, 2, 0.0, Branch::Success);
        const StrategyOutcome odd = merge_deterministic(pre, 2, 0.0, Branch::Failure);
        CHECK(even.probability == doctest::Approx(0.5));
        CHECK(odd.probability == doctest::Approx(0.5));
        CHECK(even.branch == Branch::Success);
        CHECK(odd.branch == Branch::Success);  // a full fusion lands either way
        CHECK(even.ledger_after.fusion_between(0, 1).value() == doctest::Approx(kQuarterPi));
        CHECK(odd.ledger_after.fusion_between(0, 1).value() == doctest::Approx(-kQuarterPi));
        check_oracle(pre, even);
        check_oracle(pre, odd);
    }
    SUBCASE("prior theta = pi/8 skews the parity split") {
        const GeneralizedGraphState pre = intercore(kQuarterPi, kPi / 8.0);
        const StrategyOutcome even = merge_deterministic(pre, 2, kPi / 8.0, Branch::Success);
        const StrategyOutcome odd = merge_deterministic(pre, 2, kPi / 8.0, Branch::Failure);
        CHECK(even.probability ==
              doctest::Approx(0.5 * (1.0 + std::sin(kQuarterPi))).epsilon(1e-12));
        CHECK(odd.probability ==
              doctest::Approx(0.5 * (1.0 - std::sin(kQuarterPi))).epsilon(1e-12));
        check_oracle(pre, even);
        check_oracle(pre, odd);
    }
    SUBCASE("full prior forbids the orthogonal outcome") {
        const GeneralizedGraphState pre = intercore(kQuarterPi, kQuarterPi);
        CHECK(merge_deterministic(pre, 2, kQuarterPi, Branch::Success).probability ==
              doctest::Approx(1.0));
        CHECK_THROWS_AS(merge_deterministic(pre, 2, kQuarterPi, Branch::Failure),
                        ImpossibleBranch);
    }
    SUBCASE("tilted intercore is rejected") {
        const GeneralizedGraphState pre = intercore(0.5);
        CHECK_THROWS_AS(merge_deterministic(pre, 2, 0.0, Branch::Success),
                        std::invalid_argument);
    }
}

TEST_CASE("bridge_attempt") {
    SUBCASE("alpha = pi/8, sign +: frozen branch values") {
        const GeneralizedGraphState pre = intercore(kPi / 8.0);
        const StrategyOutcome s = bridge_attempt(pre, 2, 1, Branch::Success);
        CHECK(s.probability == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(s.ledger_after.edge_between(0, 1)->theta == doctest::Approx(kQuarterPi));
        check_oracle(pre, s);
        const StrategyOutcome f = bridge_attempt(pre, 2, 1, Branch::Failure);
        CHECK(f.ledger_after.edge_between(0, 1)->theta ==
              doctest::Approx(-kRPi8).epsilon(1e-9));
        check_oracle(pre, f);
    }
    SUBCASE("alpha = pi/4: failure edge is full up to a ZZ byproduct") {
        const GeneralizedGraphState pre = intercore(kQuarterPi);
        const StrategyOutcome f = bridge_attempt(pre, 2, 1, Branch::Failure);
        CHECK(f.probability == doctest::Approx(0.5));
        CHECK(std::abs(f.ledger_after.edge_between(0, 1)->theta) ==
              doctest::Approx(kQuarterPi));
        check_oracle(pre, f);
    }
    SUBCASE("failure edge angle vanishes with the tilt") {
        const GeneralizedGraphState pre = intercore(1e-5);
        const StrategyOutcome f = bridge_attempt(pre, 2, 1, Branch::Failure);
        CHECK(std::abs(f.ledger_after.edge_between(0, 1).value_or(EdgeRecord{}).theta) <= 1e-4);
    }
}

TEST_CASE("bridge_with_edge") {
    SUBCASE("theta1 = 0 is identical to bridge_attempt") {
        const GeneralizedGraphState pre = intercore(0.7);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome attempt = bridge_attempt(pre, 2, 1, b);
            const StrategyOutcome retry = bridge_with_edge(pre, 2, 0.0, 1, b);
            CHECK(attempt.probability == doctest::Approx(retry.probability).epsilon(1e-14));
            CHECK(fidelity(build_from_ledger(attempt.ledger_after),
                           build_from_ledger(retry.ledger_after)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("frozen 4-tuple at alpha2 = theta1 = pi/8: p_b = 1/2, failure erases the edge") {
        const GeneralizedGraphState pre = intercore(kPi / 8.0, kPi / 8.0, false);
        const StrategyOutcome s = bridge_with_edge(pre, 2, kPi / 8.0, 1, Branch::Success);
        CHECK(s.probability == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.ledger_after.edge_between(0, 1)->theta == doctest::Approx(kQuarterPi));
        check_oracle(pre, s);
        const StrategyOutcome f = bridge_with_edge(pre, 2, kPi / 8.0, 1, Branch::Failure);
        CHECK_FALSE(f.ledger_after.edge_between(0, 1).has_value());  // lambda_f = 0
        check_oracle(pre, f);
    }
    SUBCASE("untilted intercore agrees with the deterministic variant") {
        const GeneralizedGraphState pre = intercore(kQuarterPi, 0.3, false);
        const StrategyOutcome retry = bridge_with_edge(pre, 2, 0.3, 1, Branch::Success);
        const StrategyOutcome det = bridge_deterministic(pre, 2, 0.3, Branch::Success);
        CHECK(retry.probability == doctest::Approx(0.5));
        CHECK(fidelity(build_from_ledger(retry.ledger_after),
                       build_from_ledger(det.ledger_after)) ==
              doctest::Approx(1.0).epsilon(1e-12));
        check_oracle(pre, retry);
    }
    SUBCASE("oracle sweep over random (alpha, theta, sign)") {
        std::mt19937_64 rng(77);
        for (int i = 0; i < 40; ++i) {
            const double alpha = 0.1 + 1.3 * uniform01(rng);
            const double theta = -kQuarterPi + 0.02 + (kHalfPi - 0.04) * uniform01(rng);
            const int sign = rng() % 2 == 0 ? 1 : -1;
            const GeneralizedGraphState pre = intercore(alpha, theta, false);
            for (Branch b : {Branch::Success, Branch::Failure}) {
                check_oracle(pre, bridge_with_edge(pre, 2, theta, sign, b));
            }
        }
    }
}

TEST_CASE("bridge_deterministic") {
    SUBCASE("no prior: adds a full edge, outcome picks the byproduct") {
        const GeneralizedGraphState pre = intercore(kQuarterPi);
        const StrategyOutcome plain = bridge_deterministic(pre, 2, 0.0, Branch::Success);
        const StrategyOutcome tagged = bridge_deterministic(pre, 2, 0.0, Branch::Failure);
        CHECK(plain.probability == doctest::Approx(0.5));
        CHECK(tagged.probability == doctest::Approx(0.5));
        CHECK(plain.ledger_after.edge_between(0, 1)->theta == doctest::Approx(kQuarterPi));
        CHECK(tagged.ledger_after.edge_between(0, 1)->theta == doctest::Approx(kQuarterPi));
        CHECK(tagged.ledger_after.frame(0) == kFrameZ);
        check_oracle(pre, plain);
        check_oracle(pre, tagged);
    }
    SUBCASE("full prior edge: nothing left to add") {
        const GeneralizedGraphState pre = intercore(kQuarterPi, kQuarterPi, false);
        const StrategyOutcome out = bridge_deterministic(pre, 2, kQuarterPi, Branch::Success);
        CHECK(out.ledger_after.edge_between(0, 1)->theta == doctest::Approx(kQuarterPi));
        check_oracle(pre, out);
    }
    SUBCASE("negative prior completes on the negative side") {
        const GeneralizedGraphState pre = intercore(kQuarterPi, -kPi / 8.0, false);
        for (Branch b : {Branch::Success, Branch::Failure}) {
            const StrategyOutcome out = bridge_deterministic(pre, 2, -kPi / 8.0, b);
            CHECK(std::abs(out.ledger_after.edge_between(0, 1)->theta) ==
                  doctest::Approx(kQuarterPi));
            check_oracle(pre, out);
        }
    }
}

TEST_CASE("branch probabilities sum to one across the whole strategy family") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 81; ++i) {
        const double alpha = 0.05 + (kHalfPi - 0.1) * uniform01(rng);
        const double theta = -kQuarterPi + 0.01 + (kHalfPi - 0.02) * uniform01(rng);
        const int sign = rng() % 2 == 0 ? 1 : -1;
        {
            const GeneralizedGraphState pre = tilted_ghz(alpha, 2);
            const double sum = realign(pre, 0, 1, Branch::Success).probability +
                               realign(pre, 0, 1, Branch::Failure).probability;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        {
            const GeneralizedGraphState pre = intercore(alpha, theta, true);
            const double sum =
                merge_with_fusion(pre, 2, theta, sign, Branch::Success).probability +
                merge_with_fusion(pre, 2, theta, sign, Branch::Failure).probability;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        {
            const GeneralizedGraphState pre = intercore(alpha, theta, false);
            const double sum =
                bridge_with_edge(pre, 2, theta, sign, Branch::Success).probability +
                bridge_with_edge(pre, 2, theta, sign, Branch::Failure).probability;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("repeated failed merges never overshoot a full fusion") {
    std::mt19937_64 rng(4321);
    for (int rep = 0; rep < 25; ++rep) {
        GeneralizedGraphState l;
        l.add_vertex(0, kQuarterPi);
        l.add_vertex(1, kQuarterPi);
        l.add_vertex(10, kQuarterPi);
        l.add_vertex(11, kQuarterPi);
        l.add_edge(0, 10, EdgeKind::Proper);
        l.add_edge(1, 11, EdgeKind::Proper);
        for (int k = 0; k < 6; ++k) {
            const int ic = 20 + k;
            l.add_vertex(ic, 0.1 + 1.3 * uniform01(rng));
            l.add_edge(ic, 0, EdgeKind::Proper);
            l.add_edge(ic, 1, EdgeKind::Proper);
            const double prior = l.fusion_between(0, 1).value_or(0.0);
            const int sign = matched_merge_sign(prior);
            const StrategyOutcome out =
                std::abs(prior) > kAngleTol
                    ? merge_with_fusion(l, ic, prior, sign, Branch::Failure)
                    : merge_attempt(l, ic, sign, Branch::Failure);
            l = out.ledger_after;
            const double rec = l.fusion_between(0, 1).value_or(0.0);
            CHECK(std::abs(rec) <= kQuarterPi + kAngleTol);
        }
    }
}

TEST_CASE("the full repair chain stays oracle-exact") {
    // pm on cherries -> realign (works through the XH frame) -> merge through
    // the realignment Z byproduct
    std::mt19937_64 rng(555);
    for (int rep = 0; rep < 20; ++rep) {
        GeneralizedGraphState l;
        for (int v = 0; v < 4; ++v) l.add_vertex(v, kQuarterPi);
        l.add_edge(0, 1, EdgeKind::Proper);
        l.add_edge(2, 3, EdgeKind::Proper);
        const PMEvent ev{0.15 + 1.2 * uniform01(rng), static_cast<int>(rng() % 2)};
        const StrategyOutcome pm = pm_attempt(l, 1, 3, ev, Branch::Success);
        CHECK(replay_pm(l, 1, 3, ev, pm).pass());
        GeneralizedGraphState mid = pm.ledger_after;

        const StrategyOutcome re = realign(mid, 1, 3, Branch::Failure);
        check_oracle(mid, re);
        GeneralizedGraphState tilted = re.ledger_after;
        // Z byproduct from the failure, possibly cancelled by the detector tag
        CHECK(tilted.frame(1).is_diagonal());

        const StrategyOutcome mg = merge_attempt(tilted, 1, 1, Branch::Success);
        check_oracle(tilted, mg);
        CHECK(mg.ledger_after.fusion_between(0, 2).value() == doctest::Approx(kQuarterPi));
    }
}
