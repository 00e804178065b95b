#pragma once

#include <string>
#include <string_view>

#include "../errors.hpp"
#include "movegen.hpp"
#include "position.hpp"

namespace piecevec::chess {

// Resolves a SAN token ("Nf3", "exd5", "O-O", "e8=Q+") against the legal
// moves of a position. Mainline PGN subset: no support for null moves.
inline Move parse_san(const Position& pos, std::string_view san) {
    std::string_view token = san;
    while (!token.empty() &&
           (token.back() == '+' || token.back() == '#' || token.back() == '!' || token.back() == '?'))
        token.remove_suffix(1);
    if (token.empty()) throw IllegalSanMove("empty SAN token");

    auto moves = legal_moves(pos);

    if (token == "O-O" || token == "0-0" || token == "O-O-O" || token == "0-0-0") {
        bool kingside = token.size() == 3;
        for (const Move& m : moves)
            if (m.flag == MoveFlag::Castle && (m.target.file() == 6) == kingside) return m;
        throw IllegalSanMove("castling not legal: " + std::string(san));
    }

    PieceKind kind = PieceKind::Pawn;
    if (token[0] >= 'A' && token[0] <= 'Z') {
        auto k = kind_from_char(static_cast<char>(token[0] | 0x20));
        if (!k) throw IllegalSanMove("bad piece letter in SAN: " + std::string(san));
        kind = *k;
        token.remove_prefix(1);
    }

    std::optional<PieceKind> promotion;
    if (token.size() >= 2 && token[token.size() - 2] == '=') {
        auto k = kind_from_char(static_cast<char>(token.back() | 0x20));
        if (!k || *k == PieceKind::Pawn || *k == PieceKind::King)
            throw IllegalSanMove("bad promotion in SAN: " + std::string(san));
        promotion = *k;
        token.remove_suffix(2);
    } else if (kind == PieceKind::Pawn && !token.empty()) {
        // tolerate promotion without '=' ("e8Q")
        if (auto k = kind_from_char(static_cast<char>(token.back() | 0x20));
            k && *k != PieceKind::Pawn && *k != PieceKind::King && token.size() >= 3) {
            promotion = *k;
            token.remove_suffix(1);
        }
    }

    if (token.size() < 2) throw IllegalSanMove("truncated SAN: " + std::string(san));
    auto target = Square::parse(token.substr(token.size() - 2));
    if (!target) throw IllegalSanMove("bad target square in SAN: " + std::string(san));
    token.remove_suffix(2);

    bool capture = false;
    if (!token.empty() && token.back() == 'x') {
        capture = true;
        token.remove_suffix(1);
    }

    int disamb_file = -1, disamb_rank = -1;
    for (char c : token) {
        if (c >= 'a' && c <= 'h')
            disamb_file = c - 'a';
        else if (c >= '1' && c <= '8')
            disamb_rank = c - '1';
        else
            throw IllegalSanMove("bad disambiguator in SAN: " + std::string(san));
    }

    const Move* found = nullptr;
    for (const Move& m : moves) {
        auto piece = pos.occupant(m.source);
        if (piece->kind != kind) continue;
        if (m.target != *target) continue;
        if (promotion != m.promotion) continue;
        if (capture != m.is_capture()) continue;
        if (disamb_file >= 0 && m.source.file() != disamb_file) continue;
        if (disamb_rank >= 0 && m.source.rank() != disamb_rank) continue;
        if (found) throw IllegalSanMove("ambiguous SAN: " + std::string(san));
        found = &m;
    }
    if (!found) throw IllegalSanMove("no legal move matches SAN '" + std::string(san) +
                                     "' in " + pos.fen());
    return *found;
}

}  // namespace piecevec::chess
