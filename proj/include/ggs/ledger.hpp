#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ggs/frame.hpp"
#include "ggs/op_algebra.hpp"

namespace ggs {

enum class EdgeKind { Proper, Weighted };

struct EdgeRecord {
    EdgeKind kind = EdgeKind::Proper;
    double theta = 0.0;  // weighted edges only, canonical
};

enum class VertexRole { Core, Cherry, Intercore, Isolated };

using VertexPair = std::pair<int, int>;  // normalized (min, max)

VertexPair make_pair_key(int a, int b);

// Symbolic ledger for a generalized graph state: tilted vertices, proper and
// weighted edges, partial-fusion records and a local byproduct frame. The
// description stays polynomial in the number of qubits; the dense state is
// only ever materialized by the statevector oracle.
class GeneralizedGraphState {
public:
    void add_vertex(int id, double alpha);
    // Collisions compose eagerly: weighted edges add angles, a duplicated
    // proper edge cancels (CZ^2 = I). Mixing proper and weighted records on
    // one pair has no ledger normal form and is rejected.
    void add_edge(int a, int b, EdgeKind kind, double theta = 0.0);
    void add_fusion(int a, int b, double theta);
    // Physical local operation, applied outside any existing frame.
    void apply_local(int id, const LocalFrame& f);
    // Record-layer byproduct tag: arises beneath the existing frame when a
    // canonicalization or rewrite reshapes the records, so it composes on
    // the inside.
    void tag_under_frame(int id, const LocalFrame& f);
    // Z-measurement with outcome 0: drops the vertex and its proper edges.
    // Weighted-edge or fusion records incident to the vertex are rejected,
    // since outcome-0 removal would leave non-ledger residues on neighbours.
    void remove_vertex(int id);

    void set_tilt(int id, double alpha);
    void set_frame(int id, const LocalFrame& f);
    // Drop a vertex and its records without measurement semantics; used by
    // strategy operations that have already accounted for the branch.
    void drop_vertex_raw(int id);
    void erase_fusion(int a, int b);
    void erase_edge(int a, int b);
    void bump_log_weight(double amplitude_factor);

    bool has_vertex(int id) const;
    double tilt(int id) const;
    LocalFrame frame(int id) const;
    const std::map<int, double>& vertices() const { return tilts_; }
    const std::map<VertexPair, EdgeRecord>& edges() const { return edges_; }
    const std::map<VertexPair, double>& fusions() const { return fusions_; }
    const std::map<int, LocalFrame>& frames() const { return frames_; }
    double log_weight() const { return log_weight_; }

    std::vector<int> neighbors(int id) const;  // via edge records
    int degree(int id) const;
    std::optional<EdgeRecord> edge_between(int a, int b) const;
    std::optional<double> fusion_between(int a, int b) const;
    std::vector<int> fusion_partners(int id) const;
    bool same_component(int a, int b) const;  // edges and fusions both connect

    int num_vertices() const { return static_cast<int>(tilts_.size()); }
    std::size_t record_count() const;
    // Dense-simulation qubit index: rank of the id in sorted order.
    int qubit_index(int id) const;

private:
    void require_vertex(int id, const char* what) const;

    std::map<int, double> tilts_;
    std::map<VertexPair, EdgeRecord> edges_;
    std::map<VertexPair, double> fusions_;
    std::map<int, LocalFrame> frames_;  // non-identity entries only
    double log_weight_ = 0.0;           // ln of accumulated amplitude factors
};

struct LedgerEvent {
    enum class Kind { AddVertex, AddEdge, AddFusion, ApplyLocal, RemoveVertex };

    Kind kind = Kind::AddVertex;
    int a = -1;
    int b = -1;
    double angle = 0.0;
    EdgeKind edge_kind = EdgeKind::Proper;
    LocalFrame local;

    static LedgerEvent add_vertex(int id, double alpha);
    static LedgerEvent add_edge(int a, int b, EdgeKind kind, double theta = 0.0);
    static LedgerEvent add_fusion(int a, int b, double theta);
    static LedgerEvent apply_local(int id, const LocalFrame& f);
    static LedgerEvent remove_vertex(int id);
};

GeneralizedGraphState ledger_apply(GeneralizedGraphState ledger, const LedgerEvent& event);

// Degree rules: 0 isolated, 1 cherry, >= 3 core; degree 2 is an intercore
// exactly when both neighbours have degree >= 2, else it is a (small) core.
VertexRole classify_vertex(const GeneralizedGraphState& ledger, int id);

// Rewrite a full fusion P(+-pi/4) between proper vertices into proper-graph
// records: the first endpoint inherits the symmetric difference of the two
// neighbourhoods, the second becomes its cherry carrying an H (even) or XH
// (odd) frame; the odd rule adds Z frames on the partner's old neighbours.
// Oracle-certified; see docs/derivation_notes.md.
GeneralizedGraphState contract_full_fusion(const GeneralizedGraphState& ledger, int a, int b);

// Deterministic DOT rendering: tilted vertices hollow and labelled with the
// tilt (4 decimals), weighted edges solid labelled, fusions dashed labelled.
std::string to_dot(const GeneralizedGraphState& ledger);

// Line-oriented snapshot, header "GGS v1"; lines "V id alpha",
// "E i j theta|proper", "F i j theta", "B id tag".
std::string to_snapshot(const GeneralizedGraphState& ledger);
GeneralizedGraphState from_snapshot(std::string_view text);

} // namespace ggs
