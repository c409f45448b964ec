#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ggs/emission.hpp"
#include "ggs/ledger.hpp"
#include "ggs/rand.hpp"

namespace ggs {

enum class Mode { Naive, Adaptive };
enum class SignRule { Matched, FixedPlus, FixedMinus };
enum class TargetKind { Bond, Ghz, Chain };

struct Target {
    TargetKind kind = TargetKind::Bond;
    int size = 2;  // ghz(n) / chain(n)
};

struct StrategyPolicy {
    Mode mode = Mode::Adaptive;
    double epsilon = 1e-5;  // naive-mode fidelity cutoff
    SignRule sign_rule = SignRule::Matched;
    int max_retries = 2;
    bool realign_first = true;
};

struct ExperimentConfig {
    EmissionModel model;
    StrategyPolicy policy;
    Target target;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 42;
};

void validate(const ExperimentConfig& config);

struct TrialStats {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;  // headline metric (strict first attempt for bond)
    double rate = 0.0;
    double ci95 = 0.0;  // half-width, normal approximation
    std::vector<std::uint64_t> histogram;  // attempts used on successful trials
    // secondary metric: success anywhere within the retry budget
    std::uint64_t budget_successes = 0;
    double budget_rate = 0.0;
    std::map<std::string, std::uint64_t> action_counts;
    double mean_recycled_angle = 0.0;  // mean |theta| recycled into retries
    std::uint64_t recycled_attempts = 0;
};

struct TrialRecord {
    std::uint64_t trial = 0;
    double t_click = -1.0;  // first heralded click; -1 if none
    double alpha = -1.0;
    std::string action_sequence;
    bool success = false;
};

using TrialSink = std::function<void(const TrialRecord&)>;

// Deterministic given (seed, trial index); trials own independent RNG
// streams, so results are independent of execution order.
TrialStats run_experiment(const ExperimentConfig& config, const TrialSink& sink = {});

// One seeded growth trial (ghz/chain targets) with a callback after every
// strategy step; drives the `grow` subcommand's DOT snapshots. Returns true
// when the target topology completed within the retry budget.
using StepSink = std::function<void(const GeneralizedGraphState&, const std::string&)>;
bool run_growth_trial(const ExperimentConfig& config, const StepSink& on_step);

enum class Action {
    Realign,
    MergeAttempt,
    MergeWithFusion,
    MergeDeterministic,
    BridgeAttempt,
    BridgeWithEdge,
    BridgeDeterministic,
    PmAttempt,
    GiveUp,
};

const char* action_name(Action a);

struct ActionContext {
    int intercore = -1;  // candidate intercore vertex, -1 if none yet
    int target_a = -1;
    int target_b = -1;
    bool want_fusion = true;  // merge family if true, bridge family otherwise
};

// The decision tree of the repair protocols: realign while a cherry remains,
// otherwise merge or bridge, picking the with-prior / deterministic variant
// from the target pair's existing record and the intercore tilt.
Action choose_action(const GeneralizedGraphState& ledger, const StrategyPolicy& policy,
                     const ActionContext& context);

int sign_for(SignRule rule, bool fusion_link, double alpha, double prior_theta);

std::string stats_to_json(const TrialStats& stats);
std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& record);

} // namespace ggs
