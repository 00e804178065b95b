#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "types.hpp"

namespace piecevec::chess {

enum class MoveFlag : std::uint8_t { Quiet, Capture, Castle, EnPassant, DoublePush };

// Castling is encoded as the king's two-file move (e1g1 etc., the UCI
// convention); the rook relocation is implicit.
struct Move {
    Square source;
    Square target;
    std::optional<PieceKind> promotion;
    MoveFlag flag = MoveFlag::Quiet;

    bool is_capture() const { return flag == MoveFlag::Capture || flag == MoveFlag::EnPassant; }

    // UCI long algebraic: "e2e4", "e7e8q". Flags are not part of the text.
    std::string uci() const {
        std::string s = source.name() + target.name();
        if (promotion) s += kKindChar[static_cast<int>(*promotion)];
        return s;
    }

    // Source, target and promotion identify a move within a position;
    // flags are derived state.
    friend bool operator==(const Move& a, const Move& b) {
        return a.source == b.source && a.target == b.target && a.promotion == b.promotion;
    }
};

// Parses the square/promotion part of a UCI move. Flags must be derived
// against a position (see Position::move_from_uci).
inline std::optional<Move> parse_uci_squares(std::string_view s) {
    if (s.size() < 4 || s.size() > 5) return std::nullopt;
    auto from = Square::parse(s.substr(0, 2));
    auto to = Square::parse(s.substr(2, 2));
    if (!from || !to) return std::nullopt;
    Move m;
    m.source = *from;
    m.target = *to;
    if (s.size() == 5) {
        auto k = kind_from_char(s[4]);
        if (!k || *k == PieceKind::Pawn || *k == PieceKind::King) return std::nullopt;
        m.promotion = *k;
    }
    return m;
}

}  // namespace piecevec::chess
