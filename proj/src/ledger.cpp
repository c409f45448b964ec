#include "ggs/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>

namespace ggs {

namespace {

std::string format_angle(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string format_exact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace

VertexPair make_pair_key(int a, int b) {
    return a < b ? VertexPair{a, b} : VertexPair{b, a};
}

void GeneralizedGraphState::require_vertex(int id, const char* what) const {
    if (!has_vertex(id)) {
        throw std::invalid_argument(std::string(what) + ": unknown vertex " + std::to_string(id));
    }
}

void GeneralizedGraphState::add_vertex(int id, double alpha) {
    if (has_vertex(id)) {
        throw std::invalid_argument("add_vertex: duplicate vertex " + std::to_string(id));
    }
    require_tilt(alpha, "add_vertex");
    tilts_[id] = alpha;
}

void GeneralizedGraphState::add_edge(int a, int b, EdgeKind kind, double theta) {
    require_vertex(a, "add_edge");
    require_vertex(b, "add_edge");
    if (a == b) throw std::invalid_argument("add_edge: self edge");
    const VertexPair key = make_pair_key(a, b);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
        if (kind == EdgeKind::Weighted) {
            const CanonicalAngle canon = canonicalize_weighted(theta);
            if (canon.byproduct.z_a) tag_under_frame(key.first, kFrameZ);
            if (canon.byproduct.z_b) tag_under_frame(key.second, kFrameZ);
            if (std::abs(canon.theta) >= kAngleTol) {
                edges_[key] = EdgeRecord{EdgeKind::Weighted, canon.theta};
            }
        } else {
            edges_[key] = EdgeRecord{EdgeKind::Proper, 0.0};
        }
        return;
    }
    // collision: compose eagerly
    if (it->second.kind == EdgeKind::Proper && kind == EdgeKind::Proper) {
        edges_.erase(it);  // CZ^2 = I
        return;
    }
    if (it->second.kind == EdgeKind::Weighted && kind == EdgeKind::Weighted) {
        const CanonicalAngle canon = compose_weighted(it->second.theta, theta);
        // i^k (ZZ)^(k mod 2): the phase is global, the Z tags land in frames.
        if (canon.byproduct.z_a) tag_under_frame(key.first, kFrameZ);
        if (canon.byproduct.z_b) tag_under_frame(key.second, kFrameZ);
        if (std::abs(canon.theta) < kAngleTol) {
            edges_.erase(it);
        } else {
            it->second.theta = canon.theta;
        }
        return;
    }
    throw std::invalid_argument(
        "add_edge: proper and weighted records on one pair have no ledger normal form");
}

void GeneralizedGraphState::add_fusion(int a, int b, double theta) {
    require_vertex(a, "add_fusion");
    require_vertex(b, "add_fusion");
    if (a == b) throw std::invalid_argument("add_fusion: self fusion");
    const VertexPair key = make_pair_key(a, b);
    const CanonicalAngle canon = canonicalize_fusion(theta);
    auto it = fusions_.find(key);
    if (it == fusions_.end()) {
        if (canon.byproduct.z_a) tag_under_frame(key.first, kFrameZ);
        if (canon.byproduct.z_b) tag_under_frame(key.second, kFrameZ);
        if (std::abs(canon.theta) >= kAngleTol) {
            fusions_[key] = canon.theta;
        }
        return;
    }
    const FusionComposition comp = compose_fusion(it->second, canon.theta);
    if (canon.byproduct.z_a != comp.byproduct.z_a) tag_under_frame(key.first, kFrameZ);
    if (canon.byproduct.z_b != comp.byproduct.z_b) tag_under_frame(key.second, kFrameZ);
    bump_log_weight(comp.weight);
    if (std::abs(comp.theta) < kAngleTol) {
        fusions_.erase(it);
    } else {
        it->second = comp.theta;
    }
}

void GeneralizedGraphState::apply_local(int id, const LocalFrame& f) {
    require_vertex(id, "apply_local");
    const LocalFrame combined = compose(f, frame(id));
    if (combined.is_identity()) {
        frames_.erase(id);
    } else {
        frames_[id] = combined;
    }
}

void GeneralizedGraphState::tag_under_frame(int id, const LocalFrame& f) {
    require_vertex(id, "tag_under_frame");
    const LocalFrame combined = compose(frame(id), f);
    if (combined.is_identity()) {
        frames_.erase(id);
    } else {
        frames_[id] = combined;
    }
}

void GeneralizedGraphState::remove_vertex(int id) {
    require_vertex(id, "remove_vertex");
    if (!frame(id).is_diagonal()) {
        throw std::invalid_argument("remove_vertex: non-diagonal frame on measured vertex");
    }
    for (const auto& [pair, rec] : edges_) {
        if ((pair.first == id || pair.second == id) && rec.kind == EdgeKind::Weighted) {
            throw std::invalid_argument(
                "remove_vertex: weighted edge incident to measured vertex");
        }
    }
    if (!fusion_partners(id).empty()) {
        throw std::invalid_argument("remove_vertex: fusion record incident to measured vertex");
    }
    bump_log_weight(std::cos(tilt(id)));
    drop_vertex_raw(id);
}

void GeneralizedGraphState::set_tilt(int id, double alpha) {
    require_vertex(id, "set_tilt");
    require_tilt(alpha, "set_tilt");
    tilts_[id] = alpha;
}

void GeneralizedGraphState::set_frame(int id, const LocalFrame& f) {
    require_vertex(id, "set_frame");
    if (f.is_identity()) {
        frames_.erase(id);
    } else {
        frames_[id] = f;
    }
}

void GeneralizedGraphState::drop_vertex_raw(int id) {
    require_vertex(id, "drop_vertex_raw");
    tilts_.erase(id);
    frames_.erase(id);
    std::erase_if(edges_, [id](const auto& kv) {
        return kv.first.first == id || kv.first.second == id;
    });
    std::erase_if(fusions_, [id](const auto& kv) {
        return kv.first.first == id || kv.first.second == id;
    });
}

void GeneralizedGraphState::erase_fusion(int a, int b) {
    fusions_.erase(make_pair_key(a, b));
}

void GeneralizedGraphState::erase_edge(int a, int b) {
    edges_.erase(make_pair_key(a, b));
}

void GeneralizedGraphState::bump_log_weight(double amplitude_factor) {
    if (amplitude_factor <= 0.0) {
        throw AnnihilatedState("bump_log_weight: zero amplitude factor");
    }
    log_weight_ += std::log(amplitude_factor);
}

bool GeneralizedGraphState::has_vertex(int id) const {
    return tilts_.count(id) != 0;
}

double GeneralizedGraphState::tilt(int id) const {
    require_vertex(id, "tilt");
    return tilts_.at(id);
}

LocalFrame GeneralizedGraphState::frame(int id) const {
    auto it = frames_.find(id);
    return it == frames_.end() ? LocalFrame{} : it->second;
}

std::vector<int> GeneralizedGraphState::neighbors(int id) const {
    std::vector<int> out;
    for (const auto& [pair, rec] : edges_) {
        if (pair.first == id) out.push_back(pair.second);
        if (pair.second == id) out.push_back(pair.first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int GeneralizedGraphState::degree(int id) const {
    return static_cast<int>(neighbors(id).size());
}

std::optional<EdgeRecord> GeneralizedGraphState::edge_between(int a, int b) const {
    auto it = edges_.find(make_pair_key(a, b));
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> GeneralizedGraphState::fusion_between(int a, int b) const {
    auto it = fusions_.find(make_pair_key(a, b));
    if (it == fusions_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> GeneralizedGraphState::fusion_partners(int id) const {
    std::vector<int> out;
    for (const auto& [pair, theta] : fusions_) {
        if (pair.first == id) out.push_back(pair.second);
        if (pair.second == id) out.push_back(pair.first);
    }
    return out;
}

bool GeneralizedGraphState::same_component(int a, int b) const {
    if (a == b) return true;
    std::set<int> seen{a};
    std::deque<int> queue{a};
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        std::vector<int> links = neighbors(v);
        const std::vector<int> fused = fusion_partners(v);
        links.insert(links.end(), fused.begin(), fused.end());
        for (int w : links) {
            if (w == b) return true;
            if (seen.insert(w).second) queue.push_back(w);
        }
    }
    return false;
}

std::size_t GeneralizedGraphState::record_count() const {
    return tilts_.size() + edges_.size() + fusions_.size() + frames_.size();
}

int GeneralizedGraphState::qubit_index(int id) const {
    require_vertex(id, "qubit_index");
    return static_cast<int>(std::distance(tilts_.begin(), tilts_.find(id)));
}

LedgerEvent LedgerEvent::add_vertex(int id, double alpha) {
    LedgerEvent e;
    e.kind = Kind::AddVertex;
    e.a = id;
    e.angle = alpha;
    return e;
}

LedgerEvent LedgerEvent::add_edge(int a, int b, EdgeKind kind, double theta) {
    LedgerEvent e;
    e.kind = Kind::AddEdge;
    e.a = a;
    e.b = b;
    e.edge_kind = kind;
    e.angle = theta;
    return e;
}

LedgerEvent LedgerEvent::add_fusion(int a, int b, double theta) {
    LedgerEvent e;
    e.kind = Kind::AddFusion;
    e.a = a;
    e.b = b;
    e.angle = theta;
    return e;
}

LedgerEvent LedgerEvent::apply_local(int id, const LocalFrame& f) {
    LedgerEvent e;
    e.kind = Kind::ApplyLocal;
    e.a = id;
    e.local = f;
    return e;
}

LedgerEvent LedgerEvent::remove_vertex(int id) {
    LedgerEvent e;
    e.kind = Kind::RemoveVertex;
    e.a = id;
    return e;
}

GeneralizedGraphState ledger_apply(GeneralizedGraphState ledger, const LedgerEvent& event) {
    switch (event.kind) {
        case LedgerEvent::Kind::AddVertex:
            ledger.add_vertex(event.a, event.angle);
            break;
        case LedgerEvent::Kind::AddEdge:
            ledger.add_edge(event.a, event.b, event.edge_kind, event.angle);
            break;
        case LedgerEvent::Kind::AddFusion:
            ledger.add_fusion(event.a, event.b, event.angle);
            break;
        case LedgerEvent::Kind::ApplyLocal:
            ledger.apply_local(event.a, event.local);
            break;
        case LedgerEvent::Kind::RemoveVertex:
            ledger.remove_vertex(event.a);
            break;
    }
    return ledger;
}

VertexRole classify_vertex(const GeneralizedGraphState& ledger, int id) {
    const std::vector<int> nbrs = ledger.neighbors(id);
    switch (nbrs.size()) {
        case 0: return VertexRole::Isolated;
        case 1: return VertexRole::Cherry;
        case 2:
            if (ledger.degree(nbrs[0]) >= 2 && ledger.degree(nbrs[1]) >= 2) {
                return VertexRole::Intercore;
            }
            return VertexRole::Core;
        default: return VertexRole::Core;
    }
}

GeneralizedGraphState contract_full_fusion(const GeneralizedGraphState& ledger, int a, int b) {
    const auto theta = ledger.fusion_between(a, b);
    if (!theta) {
        throw std::invalid_argument("contract_full_fusion: no fusion record on pair");
    }
    if (std::abs(std::abs(*theta) - kQuarterPi) > kAngleTol) {
        throw std::invalid_argument("contract_full_fusion: fusion is not full");
    }
    if (!is_proper_tilt(ledger.tilt(a)) || !is_proper_tilt(ledger.tilt(b))) {
        throw std::invalid_argument("contract_full_fusion: endpoints must be proper vertices");
    }
    for (int v : {a, b}) {
        if (ledger.fusion_partners(v).size() > 1) {
            throw std::invalid_argument("contract_full_fusion: extra fusion record on endpoint");
        }
        for (int w : ledger.neighbors(v)) {
            if (ledger.edge_between(v, w)->kind == EdgeKind::Weighted) {
                throw std::invalid_argument(
                    "contract_full_fusion: weighted edge incident to endpoint");
            }
        }
    }
    const bool even = *theta > 0.0;

    GeneralizedGraphState out = ledger;
    const std::vector<int> na = ledger.neighbors(a);
    const std::vector<int> nb = ledger.neighbors(b);
    std::set<int> sym_diff;
    for (int v : na) {
        if (v != b) sym_diff.insert(v);
    }
    for (int v : nb) {
        if (v == a) continue;
        if (!sym_diff.insert(v).second) sym_diff.erase(v);  // common neighbour cancels
    }
    const bool adjacent = ledger.edge_between(a, b).has_value();

    out.erase_fusion(a, b);
    for (int v : na) out.erase_edge(a, v);
    for (int v : nb) out.erase_edge(b, v);
    for (int v : sym_diff) out.add_edge(a, v, EdgeKind::Proper);
    out.add_edge(a, b, EdgeKind::Proper);

    out.tag_under_frame(b, even ? kFrameH : kFrameXH);
    if (!even) {
        for (int v : nb) {
            if (v != a) out.tag_under_frame(v, kFrameZ);
        }
    }
    if (even && adjacent) out.tag_under_frame(a, kFrameZ);
    // full fusion on proper vertices has unit amplitude; log_weight unchanged
    return out;
}

std::string to_dot(const GeneralizedGraphState& ledger) {
    std::ostringstream out;
    out << "graph ggs {\n";
    for (const auto& [id, alpha] : ledger.vertices()) {
        out << "  v" << id;
        const bool proper = is_proper_tilt(alpha);
        out << " [shape=circle";
        if (proper) {
            out << ", style=filled, fillcolor=black, label=\"\"";
        } else {
            out << ", style=solid, label=\"" << format_angle(alpha, 4) << "\"";
        }
        const LocalFrame f = ledger.frame(id);
        if (!f.is_identity()) {
            out << ", xlabel=\"" << f.tag() << "\"";
        }
        out << "];\n";
    }
    for (const auto& [pair, rec] : ledger.edges()) {
        out << "  v" << pair.first << " -- v" << pair.second;
        if (rec.kind == EdgeKind::Weighted) {
            out << " [label=\"" << format_angle(rec.theta, 4) << "\"]";
        }
        out << ";\n";
    }
    for (const auto& [pair, theta] : ledger.fusions()) {
        out << "  v" << pair.first << " -- v" << pair.second
            << " [style=dashed, label=\"" << format_angle(theta, 4) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_snapshot(const GeneralizedGraphState& ledger) {
    std::ostringstream out;
    out << "GGS v1\n";
    for (const auto& [id, alpha] : ledger.vertices()) {
        out << "V " << id << " " << format_exact(alpha) << "\n";
    }
    for (const auto& [pair, rec] : ledger.edges()) {
        out << "E " << pair.first << " " << pair.second << " ";
        if (rec.kind == EdgeKind::Proper) {
            out << "proper\n";
        } else {
            out << format_exact(rec.theta) << "\n";
        }
    }
    for (const auto& [pair, theta] : ledger.fusions()) {
        out << "F " << pair.first << " " << pair.second << " " << format_exact(theta) << "\n";
    }
    for (const auto& [id, f] : ledger.frames()) {
        out << "B " << id << " " << f.tag() << "\n";
    }
    return out.str();
}

GeneralizedGraphState from_snapshot(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "GGS v1") {
        throw std::invalid_argument("from_snapshot: missing 'GGS v1' header");
    }
    GeneralizedGraphState ledger;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "V") {
            int id;
            double alpha;
            if (!(ls >> id >> alpha)) throw std::invalid_argument("from_snapshot: bad V line");
            ledger.add_vertex(id, alpha);
        } else if (kind == "E") {
            int a, b;
            std::string value;
            if (!(ls >> a >> b >> value)) throw std::invalid_argument("from_snapshot: bad E line");
            if (value == "proper") {
                ledger.add_edge(a, b, EdgeKind::Proper);
            } else {
                ledger.add_edge(a, b, EdgeKind::Weighted, std::stod(value));
            }
        } else if (kind == "F") {
            int a, b;
            double theta;
            if (!(ls >> a >> b >> theta)) throw std::invalid_argument("from_snapshot: bad F line");
            ledger.add_fusion(a, b, theta);
        } else if (kind == "B") {
            int id;
            std::string tag;
            if (!(ls >> id >> tag)) throw std::invalid_argument("from_snapshot: bad B line");
            const auto f = LocalFrame::from_tag(tag);
            if (!f) throw std::invalid_argument("from_snapshot: unknown frame tag " + tag);
            ledger.set_frame(id, *f);
        } else {
            throw std::invalid_argument("from_snapshot: unknown record '" + kind + "'");
        }
    }
    return ledger;
}

} // namespace ggs
