#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>

namespace ggs {

// Per-vertex local byproduct, an element of the group generated by X, Z and H
// with global phases dropped. Every element has the normal form X^x Z^z H^h
// (H innermost). Ledger states are defined up to a global phase, so the
// dropped phases never affect fidelities or weights.
struct LocalFrame {
    bool x = false;
    bool z = false;
    bool h = false;

    bool is_identity() const { return !x && !z && !h; }
    // Diagonal frames (I, Z) commute with every edge/fusion record.
    bool is_diagonal() const { return !x && !h; }

    Eigen::Matrix2cd matrix() const;
    std::string tag() const;  // "I", "X", "Z", "XZ", "H", "XH", "ZH", "XZH"
    static std::optional<LocalFrame> from_tag(std::string_view tag);

    friend bool operator==(const LocalFrame&, const LocalFrame&) = default;
};

// Group product g * f (f applied first), phases dropped:
//   H X = Z H and H Z = X H, so pushing f's Paulis through g's H swaps them.
LocalFrame compose(const LocalFrame& g, const LocalFrame& f);

// Inverse up to phase; X, Z and H are involutions, so only the normal-form
// bookkeeping changes.
LocalFrame inverse(const LocalFrame& f);

inline constexpr LocalFrame kFrameI{};
inline constexpr LocalFrame kFrameX{true, false, false};
inline constexpr LocalFrame kFrameZ{false, true, false};
inline constexpr LocalFrame kFrameH{false, false, true};
inline constexpr LocalFrame kFrameXH{true, false, true};

} // namespace ggs
