#include "ggs/statevec.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ggs {

namespace {

void check_qubit(const StateVector& sv, int q, const char* what) {
    if (q < 0 || q >= sv.num_qubits) {
        throw std::out_of_range(std::string(what) + ": qubit index out of range");
    }
}

void check_capacity(int num_qubits, int max_qubits) {
    if (num_qubits < 0 || num_qubits > max_qubits) {
        throw std::invalid_argument("state size exceeds the dense-oracle qubit cap");
    }
}

} // namespace

StateVector basis_state(int num_qubits, std::uint64_t index, int max_qubits) {
    check_capacity(num_qubits, max_qubits);
    StateVector sv;
    sv.num_qubits = num_qubits;
    sv.amps = Eigen::VectorXcd::Zero(std::int64_t(1) << num_qubits);
    sv.amps[static_cast<std::int64_t>(index)] = 1.0;
    return sv;
}

StateVector tilted_product(const std::vector<double>& alphas, int max_qubits) {
    const int n = static_cast<int>(alphas.size());
    check_capacity(n, max_qubits);
    StateVector sv;
    sv.num_qubits = n;
    const std::size_t dim = std::size_t(1) << n;
    sv.amps = Eigen::VectorXcd::Ones(static_cast<std::int64_t>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        double amp = 1.0;
        for (int q = 0; q < n; ++q) {
            amp *= ((i >> q) & 1u) ? std::sin(alphas[q]) : std::cos(alphas[q]);
        }
        sv.amps[static_cast<std::int64_t>(i)] = amp;
    }
    return sv;
}

double state_norm(const StateVector& sv) {
    return sv.amps.norm();
}

void renormalize(StateVector& sv) {
    const double n = sv.amps.norm();
    if (n < kAnnihilationTol) {
        throw AnnihilatedState("renormalize: state annihilated");
    }
    sv.amps /= n;
}

double apply_op(StateVector& sv, int q, const Eigen::Matrix2cd& op, bool renorm) {
    check_qubit(sv, q, "apply_op");
    const std::size_t step = std::size_t(1) << q;
    const std::size_t dim = sv.dim();
    for (std::size_t base = 0; base < dim; base += step << 1) {
        for (std::size_t off = 0; off < step; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + step;
            const auto a = sv.amps[static_cast<std::int64_t>(i0)];
            const auto b = sv.amps[static_cast<std::int64_t>(i1)];
            sv.amps[static_cast<std::int64_t>(i0)] = op(0, 0) * a + op(0, 1) * b;
            sv.amps[static_cast<std::int64_t>(i1)] = op(1, 0) * a + op(1, 1) * b;
        }
    }
    const double weight = sv.amps.norm();
    if (renorm) {
        if (weight < kAnnihilationTol) {
            throw AnnihilatedState("apply_op: state annihilated");
        }
        sv.amps /= weight;
    }
    return weight;
}

double apply_op(StateVector& sv, int qa, int qb, const Eigen::Matrix4cd& op, bool renorm) {
    check_qubit(sv, qa, "apply_op");
    check_qubit(sv, qb, "apply_op");
    if (qa == qb) throw std::invalid_argument("apply_op: targets must be distinct");
    const std::size_t ma = std::size_t(1) << qa;
    const std::size_t mb = std::size_t(1) << qb;
    const std::size_t dim = sv.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & ma) || (i & mb)) continue;  // visit each 4-block once
        const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};  // (a b) = 00,01,10,11
        std::complex<double> in[4];
        for (int k = 0; k < 4; ++k) in[k] = sv.amps[static_cast<std::int64_t>(idx[k])];
        for (int r = 0; r < 4; ++r) {
            std::complex<double> acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += op(r, c) * in[c];
            sv.amps[static_cast<std::int64_t>(idx[r])] = acc;
        }
    }
    const double weight = sv.amps.norm();
    if (renorm) {
        if (weight < kAnnihilationTol) {
            throw AnnihilatedState("apply_op: state annihilated");
        }
        sv.amps /= weight;
    }
    return weight;
}

MeasureResult measure_qubit(const StateVector& sv, int q,
                            const Eigen::Matrix2cd& pre_rotation,
                            std::optional<int> forced, std::mt19937_64* rng) {
    check_qubit(sv, q, "measure_qubit");
    StateVector rotated = sv;
    apply_op(rotated, q, pre_rotation, /*renorm=*/false);

    const std::size_t mask = std::size_t(1) << q;
    double p1 = 0.0;
    for (std::size_t i = 0; i < rotated.dim(); ++i) {
        if (i & mask) p1 += std::norm(rotated.amps[static_cast<std::int64_t>(i)]);
    }
    const double total = rotated.amps.squaredNorm();
    const double probs[2] = {total - p1, p1};

    int outcome;
    if (forced) {
        outcome = *forced;
        if (outcome != 0 && outcome != 1) {
            throw std::invalid_argument("measure_qubit: forced outcome must be 0 or 1");
        }
        if (probs[outcome] < 1e-15) {
            throw ImpossibleBranch("measure_qubit: forced branch has zero probability");
        }
    } else {
        if (rng == nullptr) {
            throw std::invalid_argument("measure_qubit: sampling requires an rng");
        }
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(*rng) * total;
        outcome = u < probs[0] ? 0 : 1;
    }

    MeasureResult out;
    out.outcome = outcome;
    out.probability = probs[outcome] / total;
    out.post.num_qubits = sv.num_qubits - 1;
    out.post.amps = Eigen::VectorXcd::Zero(std::int64_t(1) << out.post.num_qubits);
    const std::size_t low = mask - 1;
    for (std::size_t i = 0; i < rotated.dim(); ++i) {
        if (((i & mask) != 0) != (outcome == 1)) continue;
        const std::size_t j = (i & low) | ((i >> 1) & ~low);
        out.post.amps[static_cast<std::int64_t>(j)] = rotated.amps[static_cast<std::int64_t>(i)];
    }
    renormalize(out.post);
    return out;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.num_qubits != b.num_qubits) {
        throw std::invalid_argument("fidelity: qubit counts differ");
    }
    return std::norm(a.amps.dot(b.amps));
}

double expectation_z(const StateVector& sv, int q) {
    check_qubit(sv, q, "expectation_z");
    const std::size_t mask = std::size_t(1) << q;
    double acc = 0.0;
    for (std::size_t i = 0; i < sv.dim(); ++i) {
        const double p = std::norm(sv.amps[static_cast<std::int64_t>(i)]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

double expectation_zz(const StateVector& sv, int qa, int qb) {
    check_qubit(sv, qa, "expectation_zz");
    check_qubit(sv, qb, "expectation_zz");
    const std::size_t ma = std::size_t(1) << qa;
    const std::size_t mb = std::size_t(1) << qb;
    double acc = 0.0;
    for (std::size_t i = 0; i < sv.dim(); ++i) {
        const double p = std::norm(sv.amps[static_cast<std::int64_t>(i)]);
        const bool odd = ((i & ma) != 0) != ((i & mb) != 0);
        acc += odd ? -p : p;
    }
    return acc;
}

StateVector build_from_ledger(const GeneralizedGraphState& ledger, double* raw_norm,
                              int max_qubits) {
    const int n = ledger.num_vertices();
    check_capacity(n, max_qubits);

    std::vector<double> alphas(static_cast<std::size_t>(n));
    for (const auto& [id, alpha] : ledger.vertices()) {
        alphas[static_cast<std::size_t>(ledger.qubit_index(id))] = alpha;
    }
    StateVector sv = tilted_product(alphas, max_qubits);

    for (const auto& [pair, rec] : ledger.edges()) {
        const int qa = ledger.qubit_index(pair.first);
        const int qb = ledger.qubit_index(pair.second);
        const Eigen::Matrix4cd op =
            rec.kind == EdgeKind::Proper ? control_z() : weighted_edge(rec.theta);
        apply_op(sv, qa, qb, op, /*renorm=*/false);
    }
    for (const auto& [pair, theta] : ledger.fusions()) {
        apply_op(sv, ledger.qubit_index(pair.first), ledger.qubit_index(pair.second),
                 partial_fusion(theta), /*renorm=*/false);
    }
    const double weight = sv.amps.norm();
    if (weight < kAnnihilationTol) {
        throw AnnihilatedState("build_from_ledger: ledger encodes an annihilated state");
    }
    sv.amps /= weight;
    if (raw_norm != nullptr) *raw_norm = weight;

    for (const auto& [id, f] : ledger.frames()) {
        apply_op(sv, ledger.qubit_index(id), f.matrix(), /*renorm=*/false);
    }
    return sv;
}

void write_fixture(std::ostream& out, const StateVector& sv) {
    out << "n=" << sv.num_qubits << "\n";
    char buf[96];
    for (std::size_t i = 0; i < sv.dim(); ++i) {
        const auto a = sv.amps[static_cast<std::int64_t>(i)];
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", a.real(), a.imag());
        out << buf;
    }
}

StateVector read_fixture(std::istream& in) {
    std::string line;
    int n = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("n=", 0) == 0) {
            n = std::stoi(line.substr(2));
            break;
        }
        throw std::invalid_argument("read_fixture: expected 'n=<qubits>' header");
    }
    if (n < 0) throw std::invalid_argument("read_fixture: missing header");
    StateVector sv = basis_state(n);
    std::size_t idx = 0;
    while (idx < sv.dim() && std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double re, im;
        if (!(ls >> re >> im)) throw std::invalid_argument("read_fixture: bad amplitude line");
        sv.amps[static_cast<std::int64_t>(idx++)] = std::complex<double>(re, im);
    }
    if (idx != sv.dim()) {
        throw std::invalid_argument("read_fixture: truncated amplitude list");
    }
    return sv;
}

StateVector read_fixture_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("read_fixture_file: cannot open " + path);
    return read_fixture(in);
}

} // namespace ggs
