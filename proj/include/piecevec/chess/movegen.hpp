#pragma once

#include <cstdint>
#include <vector>

#include "bitboard.hpp"
#include "move.hpp"
#include "position.hpp"
#include "types.hpp"

namespace piecevec::chess {

namespace detail {

inline void push_pawn_move(std::vector<Move>& out, Square from, Square to, MoveFlag flag) {
    if (to.rank() == 0 || to.rank() == 7) {
        for (PieceKind k : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight})
            out.push_back(Move{from, to, k, flag});
    } else {
        out.push_back(Move{from, to, std::nullopt, flag});
    }
}

inline void generate_pseudo(const Board& b, std::vector<Move>& out) {
    const Color us = b.side_to_move();
    const Color them = opposite(us);
    const Bitboard occ = b.occupied();
    const Bitboard own = b.pieces(us);
    const Bitboard enemy = b.pieces(them);
    const int forward = us == Color::White ? 8 : -8;
    const int start_rank = us == Color::White ? 1 : 6;

    Bitboard pawns = b.pieces(PieceKind::Pawn, us);
    while (pawns) {
        Square from(pop_lsb(pawns));
        Square one(from.index + forward);
        if (!(occ & bb(one))) {
            push_pawn_move(out, from, one, MoveFlag::Quiet);
            if (from.rank() == start_rank) {
                Square two(one.index + forward);
                if (!(occ & bb(two)))
                    out.push_back(Move{from, two, std::nullopt, MoveFlag::DoublePush});
            }
        }
        Bitboard caps = pawn_attacks(us, from) & enemy;
        while (caps) push_pawn_move(out, from, Square(pop_lsb(caps)), MoveFlag::Capture);
        if (auto ep = b.en_passant_square())
            if (pawn_attacks(us, from) & bb(*ep))
                out.push_back(Move{from, *ep, std::nullopt, MoveFlag::EnPassant});
    }

    Bitboard knights = b.pieces(PieceKind::Knight, us);
    while (knights) {
        Square from(pop_lsb(knights));
        Bitboard targets = kKnightAttacks[from.index] & ~own;
        while (targets) {
            Square to(pop_lsb(targets));
            out.push_back(Move{from, to, std::nullopt,
                               (enemy & bb(to)) ? MoveFlag::Capture : MoveFlag::Quiet});
        }
    }

    for (PieceKind k : {PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen}) {
        Bitboard sliders = b.pieces(k, us);
        while (sliders) {
            Square from(pop_lsb(sliders));
            Bitboard targets = (k == PieceKind::Bishop  ? bishop_attacks(from, occ)
                                : k == PieceKind::Rook  ? rook_attacks(from, occ)
                                                        : queen_attacks(from, occ)) &
                               ~own;
            while (targets) {
                Square to(pop_lsb(targets));
                out.push_back(Move{from, to, std::nullopt,
                                   (enemy & bb(to)) ? MoveFlag::Capture : MoveFlag::Quiet});
            }
        }
    }

    Square ksq = b.king_square(us);
    Bitboard ktargets = kKingAttacks[ksq.index] & ~own;
    while (ktargets) {
        Square to(pop_lsb(ktargets));
        out.push_back(
            Move{ksq, to, std::nullopt, (enemy & bb(to)) ? MoveFlag::Capture : MoveFlag::Quiet});
    }

    // castling: path empty, king's path unattacked, not currently in check
    const int rank = us == Color::White ? 0 : 7;
    const std::uint8_t kbit = us == Color::White ? kWhiteKingside : kBlackKingside;
    const std::uint8_t qbit = us == Color::White ? kWhiteQueenside : kBlackQueenside;
    auto sq = [rank](int f) { return Square::from_file_rank(f, rank); };
    if ((b.castling_rights() & (kbit | qbit)) && !b.is_attacked(ksq, them)) {
        if ((b.castling_rights() & kbit) && !(occ & (bb(sq(5)) | bb(sq(6)))) &&
            !b.is_attacked(sq(5), them) && !b.is_attacked(sq(6), them))
            out.push_back(Move{ksq, sq(6), std::nullopt, MoveFlag::Castle});
        if ((b.castling_rights() & qbit) && !(occ & (bb(sq(1)) | bb(sq(2)) | bb(sq(3)))) &&
            !b.is_attacked(sq(3), them) && !b.is_attacked(sq(2), them))
            out.push_back(Move{ksq, sq(2), std::nullopt, MoveFlag::Castle});
    }
}

inline bool leaves_king_safe(const Board& b, const Move& m) {
    Board scratch = b;
    scratch.do_move(m);
    return !scratch.in_check(b.side_to_move());
}

}  // namespace detail

inline std::vector<Move> legal_moves(const Board& b) {
    std::vector<Move> pseudo;
    pseudo.reserve(48);
    detail::generate_pseudo(b, pseudo);
    std::vector<Move> legal;
    legal.reserve(pseudo.size());
    for (const Move& m : pseudo)
        if (detail::leaves_king_safe(b, m)) legal.push_back(m);
    return legal;
}

inline std::vector<Move> legal_moves(const Position& pos) { return legal_moves(pos.board()); }

inline bool is_legal(const Board& b, const Move& m) {
    for (const Move& lm : legal_moves(b))
        if (lm == m) return true;
    return false;
}

// Checked application; the returned position carries canonical move flags
// even if the caller's were unset.
inline Position Position::apply_move(const Move& m) const {
    for (const Move& lm : legal_moves(board_)) {
        if (lm == m) {
            Position next = *this;
            next.do_move(lm);
            return next;
        }
    }
    throw IllegalMove("illegal move " + m.uci() + " in " + fen());
}

inline Status game_status(const Position& pos) {
    if (legal_moves(pos.board()).empty())
        return pos.in_check() ? Status::Checkmate : Status::Stalemate;
    if (pos.halfmove_clock() >= 100) return Status::Draw50Move;
    if (pos.repetition_count() >= 3) return Status::DrawRepetition;
    return Status::Ongoing;
}

inline std::uint64_t perft(const Board& b, int depth) {
    if (depth <= 0) return 1;
    std::uint64_t nodes = 0;
    for (const Move& m : legal_moves(b)) {
        if (depth == 1) {
            ++nodes;
        } else {
            Board next = b;
            next.do_move(m);
            nodes += perft(next, depth - 1);
        }
    }
    return nodes;
}

inline std::uint64_t perft(const Position& pos, int depth) { return perft(pos.board(), depth); }

}  // namespace piecevec::chess
