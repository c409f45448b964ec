#include "ggs/frame.hpp"

#include <array>
#include <cmath>

namespace ggs {

Eigen::Matrix2cd LocalFrame::matrix() const {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    if (h) {
        const double r = 1.0 / std::sqrt(2.0);
        Eigen::Matrix2cd had;
        had << r, r, r, -r;
        m = had * m;
    }
    if (z) {
        Eigen::Matrix2cd pz;
        pz << 1, 0, 0, -1;
        m = pz * m;
    }
    if (x) {
        Eigen::Matrix2cd px;
        px << 0, 1, 1, 0;
        m = px * m;
    }
    return m;
}

std::string LocalFrame::tag() const {
    if (is_identity()) return "I";
    std::string out;
    if (x) out += 'X';
    if (z) out += 'Z';
    if (h) out += 'H';
    return out;
}

std::optional<LocalFrame> LocalFrame::from_tag(std::string_view tag) {
    static constexpr std::array<std::string_view, 8> names = {
        "I", "X", "Z", "XZ", "H", "XH", "ZH", "XZH"};
    for (const auto& name : names) {
        if (tag == name) {
            LocalFrame f;
            f.x = tag.find('X') != std::string_view::npos;
            f.z = tag.find('Z') != std::string_view::npos;
            f.h = tag.find('H') != std::string_view::npos;
            return f;
        }
    }
    return std::nullopt;
}

LocalFrame compose(const LocalFrame& g, const LocalFrame& f) {
    // g * f = X^gx Z^gz H^gh X^fx Z^fz H^fh; conjugating Paulis through an H
    // swaps X and Z (phase dropped).
    const bool fx = g.h ? f.z : f.x;
    const bool fz = g.h ? f.x : f.z;
    LocalFrame out;
    out.x = g.x != fx;
    out.z = g.z != fz;
    out.h = g.h != f.h;
    return out;
}

LocalFrame inverse(const LocalFrame& f) {
    // (X^x Z^z H^h)^-1 = H^h Z^z X^x up to phase; renormalize the word order.
    LocalFrame out;
    const bool px = f.h ? f.z : f.x;
    const bool pz = f.h ? f.x : f.z;
    out.x = px;
    out.z = pz;
    out.h = f.h;
    return out;
}

} // namespace ggs
