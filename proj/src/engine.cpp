#include "ggs/engine.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "ggs/rand.hpp"
#include "ggs/strategies.hpp"

namespace ggs {

namespace {

struct TrialOutcome {
    bool headline = false;        // strict first-attempt success
    bool budget = false;          // success within the retry budget
    int attempts_used = 0;        // PM events consumed
    double first_t = -1.0;        // first heralded click
    double first_alpha = -1.0;
    std::vector<std::string> actions;
    std::map<std::string, std::uint64_t> action_counts;
    double recycled_angle_sum = 0.0;
    std::uint64_t recycled_count = 0;
};

void note_action(TrialOutcome& out, const std::string& name) {
    out.actions.push_back(name);
    ++out.action_counts[name];
}

// Z-measures a cherry away (used when realignment is disabled); outcome 1
// leaves a Z byproduct on the neighbour, absorbed by later measurements.
void discard_cherry(GeneralizedGraphState& ledger, int cherry, int neighbor,
                    std::mt19937_64& rng) {
    const bool flip = uniform01(rng) < 0.5;
    ledger.drop_vertex_raw(cherry);
    if (flip) ledger.tag_under_frame(neighbor, kFrameZ);
}

void emit_step(const StepSink* sink, const GeneralizedGraphState& ledger,
               const std::string& note) {
    if (sink != nullptr && *sink) (*sink)(ledger, note);
}

// One PM-attempt round of the link protocol: parity projection between the
// spare cherries, then the realign -> merge/bridge chain on the resulting
// intercore. Returns true when the link record reached a full fusion/edge.
bool run_link_attempt(GeneralizedGraphState& ledger, int node_a, int node_b,
                      int spare_a, int spare_b, bool fusion_link,
                      const StrategyPolicy& policy, const EmissionModel& model,
                      std::mt19937_64& rng, TrialOutcome& out,
                      bool* first_measurement_success, const StepSink* sink = nullptr) {
    const DetectionEvent ev = click_time_sample(model, rng);
    const PMEvent pm_event{ev.alpha, ev.detector_tag};
    StrategyOutcome pm = pm_attempt(ledger, spare_a, spare_b, pm_event, std::nullopt, &rng);
    note_action(out, "pm_attempt");
    ledger = pm.ledger_after;
    emit_step(sink, ledger, pm.notes);
    if (pm.branch == Branch::Failure) return false;
    if (out.first_t < 0.0) {
        out.first_t = ev.t;
        out.first_alpha = ev.alpha;
    }

    const int intercore = spare_a;
    ActionContext ctx;
    ctx.intercore = intercore;
    ctx.target_a = node_a;
    ctx.target_b = node_b;
    ctx.want_fusion = fusion_link;

    if (!policy.realign_first) {
        discard_cherry(ledger, spare_b, intercore, rng);
        note_action(out, "discard_cherry");
        emit_step(sink, ledger, "cherry discarded");
    }

    const auto find_cherry = [&]() {
        for (int w : ledger.neighbors(intercore)) {
            if (w != node_a && w != node_b && ledger.degree(w) == 1) return w;
        }
        return -1;
    };

    bool first_measurement_done = false;
    while (ledger.has_vertex(intercore)) {
        // an ideal click (or a completed realignment) leaves no tilt to fix;
        // any remaining spare cherry is measured off before the merge/bridge
        if (is_proper_tilt(ledger.tilt(intercore))) {
            for (int c = find_cherry(); c >= 0; c = find_cherry()) {
                discard_cherry(ledger, c, intercore, rng);
                note_action(out, "discard_cherry");
                emit_step(sink, ledger, "cherry discarded");
            }
        }
        const Action action = choose_action(ledger, policy, ctx);
        const double alpha = ledger.tilt(intercore);
        const double prior_fusion = ledger.fusion_between(node_a, node_b).value_or(0.0);
        const auto prior_edge = ledger.edge_between(node_a, node_b);
        const double prior_theta =
            fusion_link ? prior_fusion
                        : (prior_edge && prior_edge->kind == EdgeKind::Weighted
                               ? prior_edge->theta
                               : 0.0);
        StrategyOutcome step;
        switch (action) {
            case Action::Realign:
                step = realign(ledger, intercore, find_cherry(), std::nullopt, &rng);
                break;
            case Action::MergeAttempt:
                step = merge_attempt(ledger, intercore,
                                     sign_for(policy.sign_rule, true, alpha, 0.0),
                                     std::nullopt, &rng);
                break;
            case Action::MergeWithFusion:
                out.recycled_angle_sum += std::abs(prior_theta);
                ++out.recycled_count;
                step = merge_with_fusion(ledger, intercore, prior_theta,
                                         sign_for(policy.sign_rule, true, alpha, prior_theta),
                                         std::nullopt, &rng);
                break;
            case Action::MergeDeterministic:
                step = merge_deterministic(ledger, intercore, prior_fusion, std::nullopt, &rng);
                break;
            case Action::BridgeAttempt:
                step = bridge_attempt(ledger, intercore,
                                      sign_for(policy.sign_rule, false, alpha, 0.0),
                                      std::nullopt, &rng);
                break;
            case Action::BridgeWithEdge:
                out.recycled_angle_sum += std::abs(prior_theta);
                ++out.recycled_count;
                step = bridge_with_edge(ledger, intercore, prior_theta,
                                        sign_for(policy.sign_rule, false, alpha, prior_theta),
                                        std::nullopt, &rng);
                break;
            case Action::BridgeDeterministic:
                step = bridge_deterministic(ledger, intercore, prior_theta, std::nullopt, &rng);
                break;
            default:
                return false;
        }
        note_action(out, action_name(action));
        ledger = step.ledger_after;
        emit_step(sink, ledger, step.notes);
        if (!first_measurement_done) {
            first_measurement_done = true;
            if (first_measurement_success != nullptr) {
                // Strict metric: the deterministic variants install a full
                // record either way, but only the targeted parity outcome
                // counts as a first-attempt success.
                bool strict = step.branch == Branch::Success;
                if (action == Action::MergeDeterministic) {
                    strict = step.measurement.outcome == 0;  // even parity
                } else if (action == Action::BridgeDeterministic) {
                    strict = step.measurement.outcome == 1;  // no byproduct
                }
                *first_measurement_success = strict;
            }
        }
    }

    if (fusion_link) {
        const auto rec = ledger.fusion_between(node_a, node_b);
        return rec && std::abs(std::abs(*rec) - kQuarterPi) <= kAngleTol;
    }
    const auto rec = ledger.edge_between(node_a, node_b);
    return rec && rec->kind == EdgeKind::Weighted &&
           std::abs(std::abs(rec->theta) - kQuarterPi) <= kAngleTol;
}

TrialOutcome run_naive_trial(const ExperimentConfig& config, std::mt19937_64& rng) {
    TrialOutcome out;
    out.attempts_used = 1;
    if (uniform01(rng) >= config.model.sector_prob) {
        note_action(out, "no_click");
        return out;
    }
    const DetectionEvent ev = click_time_sample(config.model, rng);
    out.first_t = ev.t;
    out.first_alpha = ev.alpha;
    const bool accept = fidelity_of_alpha(ev.alpha) >= 1.0 - config.policy.epsilon;
    note_action(out, accept ? "accept" : "post_select_reject");
    out.headline = accept;
    out.budget = accept;
    return out;
}

TrialOutcome run_bond_trial(const ExperimentConfig& config, std::mt19937_64& rng) {
    TrialOutcome out;
    GeneralizedGraphState ledger;
    const int node_a = 0;
    const int node_b = 1;
    ledger.add_vertex(node_a, kQuarterPi);
    ledger.add_vertex(node_b, kQuarterPi);
    // spectator cherries keep the targets looking like subgraph cores
    ledger.add_vertex(2, kQuarterPi);
    ledger.add_vertex(3, kQuarterPi);
    ledger.add_edge(node_a, 2, EdgeKind::Proper);
    ledger.add_edge(node_b, 3, EdgeKind::Proper);

    const int attempts = config.policy.max_retries + 1;
    for (int k = 0; k < attempts; ++k) {
        const int spare_a = 10 + 2 * k;
        const int spare_b = 11 + 2 * k;
        ledger.add_vertex(spare_a, kQuarterPi);
        ledger.add_vertex(spare_b, kQuarterPi);
        ledger.add_edge(node_a, spare_a, EdgeKind::Proper);
        ledger.add_edge(node_b, spare_b, EdgeKind::Proper);

        ++out.attempts_used;
        bool first_measurement = false;
        const bool done = run_link_attempt(ledger, node_a, node_b, spare_a, spare_b,
                                           /*fusion_link=*/true, config.policy, config.model,
                                           rng, out, k == 0 ? &first_measurement : nullptr);
        if (k == 0) out.headline = first_measurement && done;
        if (done) {
            out.budget = true;
            break;
        }
    }
    return out;
}

TrialOutcome run_chain_trial(const ExperimentConfig& config, std::mt19937_64& rng,
                             const StepSink* sink = nullptr) {
    TrialOutcome out;
    const int n = config.target.size;
    GeneralizedGraphState ledger;
    for (int v = 0; v < n; ++v) {
        ledger.add_vertex(v, kQuarterPi);
        ledger.add_vertex(v + n, kQuarterPi);  // spectator cherry per node
        ledger.add_edge(v, v + n, EdgeKind::Proper);
    }

    int next_id = 100;
    bool all_done = true;
    for (int link = 0; link < n - 1 && all_done; ++link) {
        bool done = false;
        for (int k = 0; k <= config.policy.max_retries && !done; ++k) {
            const int spare_a = next_id++;
            const int spare_b = next_id++;
            ledger.add_vertex(spare_a, kQuarterPi);
            ledger.add_vertex(spare_b, kQuarterPi);
            ledger.add_edge(link, spare_a, EdgeKind::Proper);
            ledger.add_edge(link + 1, spare_b, EdgeKind::Proper);
            ++out.attempts_used;
            done = run_link_attempt(ledger, link, link + 1, spare_a, spare_b,
                                    /*fusion_link=*/false, config.policy, config.model, rng,
                                    out, nullptr, sink);
        }
        all_done = done;
    }
    out.budget = all_done;
    out.headline = all_done;
    return out;
}

TrialOutcome run_ghz_trial(const ExperimentConfig& config, std::mt19937_64& rng,
                           const StepSink* sink = nullptr) {
    TrialOutcome out;
    const int n = config.target.size;
    GeneralizedGraphState ledger;
    int next_id = 0;
    int core = -1;
    int budget = config.policy.max_retries + 1;

    const auto make_pair_piece = [&]() -> int {
        const int a = next_id++;
        const int b = next_id++;
        ledger.add_vertex(a, kQuarterPi);
        ledger.add_vertex(b, kQuarterPi);
        const DetectionEvent ev = click_time_sample(config.model, rng);
        StrategyOutcome pm = pm_attempt(ledger, a, b, PMEvent{ev.alpha, ev.detector_tag},
                                        std::nullopt, &rng);
        note_action(out, "pm_attempt");
        ledger = pm.ledger_after;
        emit_step(sink, ledger, pm.notes);
        ++out.attempts_used;
        --budget;
        return pm.branch == Branch::Success ? a : -1;
    };

    // Realignment consumes a cherry per shot, so only spend them while the
    // star stays above the target size; returns true on a proper core of
    // size >= n.
    const auto realign_to_size = [&](int c) -> bool {
        while (ledger.has_vertex(c) && !is_proper_tilt(ledger.tilt(c)) &&
               1 + ledger.degree(c) > n) {
            int cherry = -1;
            for (int v : ledger.neighbors(c)) {
                if (ledger.degree(v) == 1) {
                    cherry = v;
                    break;
                }
            }
            if (cherry < 0) break;
            StrategyOutcome step = realign(ledger, c, cherry, std::nullopt, &rng);
            note_action(out, "realign");
            ledger = step.ledger_after;
            emit_step(sink, ledger, step.notes);
        }
        return is_proper_tilt(ledger.tilt(c)) && 1 + ledger.degree(c) >= n;
    };

    while (budget > 0) {
        if (core < 0) {
            core = make_pair_piece();
            continue;
        }
        if (1 + ledger.degree(core) >= n && realign_to_size(core)) {
            out.budget = true;
            break;
        }
        if (budget <= 0) break;
        const int piece = make_pair_piece();
        if (piece < 0) continue;
        if (budget <= 0) break;
        const DetectionEvent ev = click_time_sample(config.model, rng);
        StrategyOutcome fuse = ghz_fuse(ledger, core, piece, PMEvent{ev.alpha, ev.detector_tag},
                                        std::nullopt, &rng);
        note_action(out, "ghz_fuse");
        ledger = fuse.ledger_after;
        emit_step(sink, ledger, fuse.notes);
        ++out.attempts_used;
        --budget;
        if (fuse.branch == Branch::Failure) core = -1;
    }
    // final check: target may already be reached
    if (!out.budget && core >= 0 && 1 + ledger.degree(core) >= n && realign_to_size(core)) {
        out.budget = true;
    }
    out.headline = out.budget;
    return out;
}

} // namespace

void validate(const ExperimentConfig& config) {
    validate(config.model);
    if (config.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (!(config.policy.epsilon > 0.0 && config.policy.epsilon < 0.5)) {
        throw std::invalid_argument("config: epsilon must lie in (0, 1/2)");
    }
    if (config.policy.max_retries < 0) {
        throw std::invalid_argument("config: max_retries must be >= 0");
    }
    if (config.target.kind != TargetKind::Bond && config.target.size < 2) {
        throw std::invalid_argument("config: target size must be >= 2");
    }
}

const char* action_name(Action a) {
    switch (a) {
        case Action::Realign: return "realign";
        case Action::MergeAttempt: return "merge_attempt";
        case Action::MergeWithFusion: return "merge_with_fusion";
        case Action::MergeDeterministic: return "merge_deterministic";
        case Action::BridgeAttempt: return "bridge_attempt";
        case Action::BridgeWithEdge: return "bridge_with_edge";
        case Action::BridgeDeterministic: return "bridge_deterministic";
        case Action::PmAttempt: return "pm_attempt";
        case Action::GiveUp: return "give_up";
    }
    return "unknown";
}

Action choose_action(const GeneralizedGraphState& ledger, const StrategyPolicy& policy,
                     const ActionContext& context) {
    if (context.intercore < 0 || !ledger.has_vertex(context.intercore)) {
        if (context.target_a < 0) return Action::GiveUp;
        return Action::PmAttempt;
    }
    const int v = context.intercore;
    const bool tilted = !is_proper_tilt(ledger.tilt(v));

    if (tilted && policy.realign_first) {
        for (int w : ledger.neighbors(v)) {
            if (w == context.target_a || w == context.target_b) continue;
            if (ledger.degree(w) == 1) return Action::Realign;
        }
    }

    // a prior record between the targets selects the family; otherwise the
    // caller's intent decides
    bool fusion_link = context.want_fusion;
    const auto prior_fusion = ledger.fusion_between(context.target_a, context.target_b);
    const auto prior_edge = ledger.edge_between(context.target_a, context.target_b);
    if (prior_fusion) {
        fusion_link = true;
    } else if (prior_edge && prior_edge->kind == EdgeKind::Weighted) {
        fusion_link = false;
    }

    if (fusion_link) {
        if (!tilted) return Action::MergeDeterministic;
        return prior_fusion ? Action::MergeWithFusion : Action::MergeAttempt;
    }
    if (!tilted) return Action::BridgeDeterministic;
    return (prior_edge && prior_edge->kind == EdgeKind::Weighted) ? Action::BridgeWithEdge
                                                                  : Action::BridgeAttempt;
}

int sign_for(SignRule rule, bool fusion_link, double alpha, double prior_theta) {
    switch (rule) {
        case SignRule::FixedPlus: return 1;
        case SignRule::FixedMinus: return -1;
        case SignRule::Matched:
            return fusion_link ? matched_merge_sign(prior_theta)
                               : matched_bridge_sign(alpha, prior_theta);
    }
    return 1;
}

bool run_growth_trial(const ExperimentConfig& config, const StepSink& on_step) {
    validate(config);
    std::mt19937_64 rng(trial_stream_seed(config.seed, 0));
    TrialOutcome out;
    switch (config.target.kind) {
        case TargetKind::Chain:
            out = run_chain_trial(config, rng, &on_step);
            break;
        case TargetKind::Ghz:
        default:
            out = run_ghz_trial(config, rng, &on_step);
            break;
    }
    return out.budget;
}

TrialStats run_experiment(const ExperimentConfig& config, const TrialSink& sink) {
    validate(config);
    TrialStats stats;
    stats.trials = config.trials;
    stats.histogram.assign(static_cast<std::size_t>(config.policy.max_retries) + 2, 0);

    double recycled_sum = 0.0;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        std::mt19937_64 rng(trial_stream_seed(config.seed, trial));
        TrialOutcome out;
        if (config.policy.mode == Mode::Naive) {
            out = run_naive_trial(config, rng);
        } else {
            switch (config.target.kind) {
                case TargetKind::Bond: out = run_bond_trial(config, rng); break;
                case TargetKind::Chain: out = run_chain_trial(config, rng); break;
                case TargetKind::Ghz: out = run_ghz_trial(config, rng); break;
            }
        }
        if (out.headline) ++stats.successes;
        if (out.budget) {
            ++stats.budget_successes;
            const std::size_t bin =
                std::min(stats.histogram.size() - 1, static_cast<std::size_t>(out.attempts_used));
            ++stats.histogram[bin];
        }
        for (const auto& [name, count] : out.action_counts) {
            stats.action_counts[name] += count;
        }
        recycled_sum += out.recycled_angle_sum;
        stats.recycled_attempts += out.recycled_count;

        if (sink) {
            TrialRecord rec;
            rec.trial = trial;
            rec.t_click = out.first_t;
            rec.alpha = out.first_alpha;
            rec.success = out.headline;
            std::string seq;
            for (std::size_t i = 0; i < out.actions.size(); ++i) {
                if (i > 0) seq += ';';
                seq += out.actions[i];
            }
            rec.action_sequence = seq;
            sink(rec);
        }
    }

    const double n = static_cast<double>(stats.trials);
    stats.rate = static_cast<double>(stats.successes) / n;
    stats.budget_rate = static_cast<double>(stats.budget_successes) / n;
    stats.ci95 = 1.96 * std::sqrt(std::max(stats.rate * (1.0 - stats.rate), 0.0) / n);
    stats.mean_recycled_angle =
        stats.recycled_attempts > 0 ? recycled_sum / static_cast<double>(stats.recycled_attempts)
                                    : 0.0;
    return stats;
}

std::string stats_to_json(const TrialStats& stats) {
    nlohmann::ordered_json j;
    j["trials"] = stats.trials;
    j["successes"] = stats.successes;
    j["rate"] = stats.rate;
    j["ci95"] = stats.ci95;
    j["histogram"] = stats.histogram;
    j["budget_successes"] = stats.budget_successes;
    j["budget_rate"] = stats.budget_rate;
    j["action_counts"] = stats.action_counts;
    j["mean_recycled_angle"] = stats.mean_recycled_angle;
    j["recycled_attempts"] = stats.recycled_attempts;
    return j.dump(2);
}

std::string trial_csv_header() {
    return "trial,t_click,alpha,action_sequence,outcome\n";
}

std::string trial_csv_row(const TrialRecord& record) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%llu,%.12g,%.12g,",
                  static_cast<unsigned long long>(record.trial), record.t_click, record.alpha);
    return std::string(buf) + record.action_sequence + "," +
           (record.success ? "success" : "failure") + "\n";
}

} // namespace ggs
