#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "../errors.hpp"
#include "../zobrist.hpp"
#include "bitboard.hpp"
#include "move.hpp"
#include "types.hpp"

namespace piecevec::chess {

enum class Status : std::uint8_t { Ongoing, Checkmate, Stalemate, DrawRepetition, Draw50Move };

inline const char* status_name(Status s) {
    static constexpr const char* names[] = {"ongoing", "checkmate", "stalemate",
                                            "draw-repetition", "draw-50move"};
    return names[static_cast<int>(s)];
}

// Castling right bits.
inline constexpr std::uint8_t kWhiteKingside = 1;
inline constexpr std::uint8_t kWhiteQueenside = 2;
inline constexpr std::uint8_t kBlackKingside = 4;
inline constexpr std::uint8_t kBlackQueenside = 8;

// Board-state changes produced by one move, in terms a hash update needs:
// which (plane, square) entries toggled and how the scalar state moved.
struct BoardDelta {
    struct PlaneSquare {
        std::uint8_t plane;
        std::uint8_t square;
    };
    std::array<PlaneSquare, 6> toggled{};  // XOR-ed piece placements
    int toggled_count = 0;
    std::uint8_t castling_before = 0, castling_after = 0;
    std::int8_t ep_file_before = -1, ep_file_after = -1;
    bool irreversible = false;  // pawn move or capture

    void toggle(int plane, Square s) {
        toggled[static_cast<std::size_t>(toggled_count++)] = {static_cast<std::uint8_t>(plane),
                                                              s.index};
    }
};

inline std::uint64_t hash_delta(const BoardDelta& d, const ZobristTables& t) {
    std::uint64_t h = t.side_to_move();  // side flips on every move
    for (int i = 0; i < d.toggled_count; ++i)
        h ^= t.piece_square(d.toggled[static_cast<std::size_t>(i)].plane,
                            Square(d.toggled[static_cast<std::size_t>(i)].square));
    std::uint8_t rights_changed = d.castling_before ^ d.castling_after;
    for (int r = 0; r < 4; ++r)
        if (rights_changed & (1 << r)) h ^= t.castling(r);
    if (d.ep_file_before >= 0) h ^= t.en_passant_file(d.ep_file_before);
    if (d.ep_file_after >= 0) h ^= t.en_passant_file(d.ep_file_after);
    return h;
}

namespace detail {

// Squares whose presence clears castling rights when a piece moves from
// or is captured on them.
constexpr std::uint8_t castling_clear_mask(int sq) {
    switch (sq) {
        case 0: return kWhiteQueenside;                    // a1
        case 4: return kWhiteKingside | kWhiteQueenside;   // e1
        case 7: return kWhiteKingside;                     // h1
        case 56: return kBlackQueenside;                   // a8
        case 60: return kBlackKingside | kBlackQueenside;  // e8
        case 63: return kBlackKingside;                    // h8
        default: return 0;
    }
}

}  // namespace detail

// Fixed-size board state (no repetition history); cheap to copy, which is
// what movegen legality filtering leans on.
class Board {
  public:
    Board() { clear(); }

    void clear() {
        piece_on_.fill(0);
        id_on_.fill(kNoPieceId);
        planes_.fill(0);
        occ_by_color_ = {0, 0};
        side_ = Color::White;
        castling_ = 0;
        ep_square_ = -1;
        halfmove_clock_ = 0;
        fullmove_number_ = 1;
        key_ = 0;
    }

    // --- read access ---

    Color side_to_move() const { return side_; }
    std::uint8_t castling_rights() const { return castling_; }
    bool has_castling_right(std::uint8_t bit) const { return castling_ & bit; }

    std::optional<Square> en_passant_square() const {
        if (ep_square_ < 0) return std::nullopt;
        return Square(ep_square_);
    }

    int halfmove_clock() const { return halfmove_clock_; }
    int fullmove_number() const { return fullmove_number_; }

    std::optional<Piece> occupant(Square s) const {
        if (!piece_on_[s.index]) return std::nullopt;
        int plane = piece_on_[s.index] - 1;
        return Piece{plane_kind(plane), plane_color(plane)};
    }

    // White piece identity at a square; 0 for empty or black.
    PieceId occupant_id(Square s) const { return id_on_[s.index]; }

    Bitboard pieces(PieceKind k, Color c) const { return planes_[plane_index(k, c)]; }
    Bitboard pieces(Color c) const { return occ_by_color_[static_cast<int>(c)]; }
    Bitboard occupied() const { return occ_by_color_[0] | occ_by_color_[1]; }
    Bitboard plane(int i) const { return planes_[i]; }

    Square king_square(Color c) const {
        return Square(std::countr_zero(pieces(PieceKind::King, c)));
    }

    // Bit (id-1) set for every white piece id still on the board.
    std::uint16_t white_presence_mask() const {
        std::uint16_t m = 0;
        for (int s = 0; s < 64; ++s)
            if (id_on_[s]) m |= static_cast<std::uint16_t>(1u << (id_on_[s] - 1));
        return m;
    }

    // Zobrist key under the default tables, maintained incrementally.
    std::uint64_t key() const { return key_; }

    bool is_attacked(Square s, Color by) const {
        Bitboard occ = occupied();
        if (kPawnAttacks[static_cast<int>(opposite(by))][s.index] & pieces(PieceKind::Pawn, by))
            return true;
        if (kKnightAttacks[s.index] & pieces(PieceKind::Knight, by)) return true;
        if (kKingAttacks[s.index] & pieces(PieceKind::King, by)) return true;
        Bitboard diag = pieces(PieceKind::Bishop, by) | pieces(PieceKind::Queen, by);
        if (diag && (bishop_attacks(s, occ) & diag)) return true;
        Bitboard ortho = pieces(PieceKind::Rook, by) | pieces(PieceKind::Queen, by);
        if (ortho && (rook_attacks(s, occ) & ortho)) return true;
        return false;
    }

    bool in_check(Color c) const { return is_attacked(king_square(c), opposite(c)); }
    bool in_check() const { return in_check(side_); }

    // --- mutation ---

    void put_piece(Square s, PieceKind k, Color c, PieceId id = kNoPieceId) {
        int plane = plane_index(k, c);
        piece_on_[s.index] = static_cast<std::uint8_t>(plane + 1);
        id_on_[s.index] = id;
        planes_[plane] |= bb(s);
        occ_by_color_[static_cast<int>(c)] |= bb(s);
    }

    void remove_piece(Square s) {
        int plane = piece_on_[s.index] - 1;
        planes_[plane] &= ~bb(s);
        occ_by_color_[plane / kKindCount] &= ~bb(s);
        piece_on_[s.index] = 0;
        id_on_[s.index] = kNoPieceId;
    }

    void set_side(Color c) { side_ = c; }
    void set_castling(std::uint8_t rights) { castling_ = rights; }
    void set_halfmove_clock(int n) { halfmove_clock_ = n; }
    void set_fullmove_number(int n) { fullmove_number_ = n; }

    // Records the en-passant target only when an enemy pawn can actually
    // capture there, so equal keys mean equal move possibilities.
    void set_en_passant(std::optional<Square> s, Color mover) {
        ep_square_ = -1;
        if (!s) return;
        if (kPawnAttacks[static_cast<int>(mover)][s->index] & pieces(PieceKind::Pawn, opposite(mover)))
            ep_square_ = static_cast<std::int8_t>(s->index);
    }

    void rebuild_key() { key_ = zobrist_key(default_tables()); }

    // Full hash from scratch against any table set.
    std::uint64_t zobrist_key(const ZobristTables& t) const {
        std::uint64_t h = 0;
        for (int s = 0; s < 64; ++s)
            if (piece_on_[s]) h ^= t.piece_square(piece_on_[s] - 1, Square(s));
        if (side_ == Color::White) h ^= t.side_to_move();
        for (int r = 0; r < 4; ++r)
            if (castling_ & (1 << r)) h ^= t.castling(r);
        if (ep_square_ >= 0) h ^= t.en_passant_file(ep_square_ & 7);
        return h;
    }

    // Applies a legal move. The caller guarantees legality; use
    // Position::apply_move for the checked path.
    void do_move(const Move& m, BoardDelta* delta_out = nullptr) {
        BoardDelta d;
        d.castling_before = castling_;
        d.ep_file_before = ep_square_ >= 0 ? static_cast<std::int8_t>(ep_square_ & 7) : -1;

        const Color us = side_;
        const Color them = opposite(us);
        const int moving_plane = piece_on_[m.source.index] - 1;
        const PieceKind moving_kind = plane_kind(moving_plane);
        const PieceId moving_id = id_on_[m.source.index];

        if (m.flag == MoveFlag::EnPassant) {
            Square cap(us == Color::White ? m.target.index - 8 : m.target.index + 8);
            d.toggle(piece_on_[cap.index] - 1, cap);
            remove_piece(cap);
        } else if (piece_on_[m.target.index]) {
            d.toggle(piece_on_[m.target.index] - 1, m.target);
            remove_piece(m.target);
        }

        d.toggle(moving_plane, m.source);
        remove_piece(m.source);
        PieceKind placed_kind = m.promotion ? *m.promotion : moving_kind;
        put_piece(m.target, placed_kind, us, moving_id);
        d.toggle(plane_index(placed_kind, us), m.target);

        if (m.flag == MoveFlag::Castle) {
            bool kingside = m.target.file() == 6;
            Square rook_from = Square::from_file_rank(kingside ? 7 : 0, m.source.rank());
            Square rook_to = Square::from_file_rank(kingside ? 5 : 3, m.source.rank());
            int rook_plane = piece_on_[rook_from.index] - 1;
            PieceId rook_id = id_on_[rook_from.index];
            d.toggle(rook_plane, rook_from);
            remove_piece(rook_from);
            put_piece(rook_to, PieceKind::Rook, us, rook_id);
            d.toggle(rook_plane, rook_to);
        }

        castling_ &= static_cast<std::uint8_t>(~(detail::castling_clear_mask(m.source.index) |
                                                 detail::castling_clear_mask(m.target.index)));

        if (m.flag == MoveFlag::DoublePush)
            set_en_passant(Square((m.source.index + m.target.index) / 2), us);
        else
            ep_square_ = -1;

        d.irreversible = moving_kind == PieceKind::Pawn || m.is_capture();
        halfmove_clock_ = d.irreversible ? 0 : halfmove_clock_ + 1;
        if (us == Color::Black) ++fullmove_number_;
        side_ = them;

        d.castling_after = castling_;
        d.ep_file_after = ep_square_ >= 0 ? static_cast<std::int8_t>(ep_square_ & 7) : -1;
        key_ ^= hash_delta(d, default_tables());
        if (delta_out) *delta_out = d;
    }

  private:
    std::array<std::uint8_t, 64> piece_on_;  // 0 empty, else plane+1
    std::array<PieceId, 64> id_on_;
    std::array<Bitboard, 12> planes_;
    std::array<Bitboard, 2> occ_by_color_;
    Color side_;
    std::uint8_t castling_;
    std::int8_t ep_square_;
    std::uint16_t halfmove_clock_;
    std::uint16_t fullmove_number_;
    std::uint64_t key_;
};

std::vector<Move> legal_moves(const Board& b);  // movegen.hpp

// Full game state: board plus the repetition history needed for draw
// detection. Values are immutable from the caller's perspective; do_move
// is the in-place variant used by hot loops, apply_move the checked
// value-returning one.
class Position {
  public:
    Position() : history_{board_.key()} {}

    static Position initial() {
        Position p;
        p.board_.clear();
        auto back_rank = std::array<PieceKind, 8>{PieceKind::Rook,   PieceKind::Knight,
                                                  PieceKind::Bishop, PieceKind::Queen,
                                                  PieceKind::King,   PieceKind::Bishop,
                                                  PieceKind::Knight, PieceKind::Rook};
        for (int f = 0; f < 8; ++f) {
            p.board_.put_piece(Square::from_file_rank(f, 0), back_rank[f], Color::White,
                               static_cast<PieceId>(f + 1));
            p.board_.put_piece(Square::from_file_rank(f, 1), PieceKind::Pawn, Color::White,
                               static_cast<PieceId>(f + 9));
            p.board_.put_piece(Square::from_file_rank(f, 7), back_rank[f], Color::Black);
            p.board_.put_piece(Square::from_file_rank(f, 6), PieceKind::Pawn, Color::Black);
        }
        p.board_.set_castling(kWhiteKingside | kWhiteQueenside | kBlackKingside |
                              kBlackQueenside);
        p.board_.rebuild_key();
        p.history_ = {p.board_.key()};
        return p;
    }

    static Position from_fen(std::string_view fen);

    const Board& board() const { return board_; }

    Color side_to_move() const { return board_.side_to_move(); }
    std::optional<Piece> occupant(Square s) const { return board_.occupant(s); }
    PieceId occupant_id(Square s) const { return board_.occupant_id(s); }
    std::optional<Square> en_passant_square() const { return board_.en_passant_square(); }
    int halfmove_clock() const { return board_.halfmove_clock(); }
    std::uint8_t castling_rights() const { return board_.castling_rights(); }
    bool in_check() const { return board_.in_check(); }
    std::uint64_t key() const { return board_.key(); }
    std::uint16_t white_presence_mask() const { return board_.white_presence_mask(); }

    const std::vector<std::uint64_t>& repetition_history() const { return history_; }

    int repetition_count() const {
        int n = 0;
        for (auto k : history_)
            if (k == board_.key()) ++n;
        return n;
    }

    void do_move(const Move& m) {
        BoardDelta d;
        board_.do_move(m, &d);
        if (d.irreversible) history_.clear();
        history_.push_back(board_.key());
    }

    Position apply_move(const Move& m) const;  // movegen.hpp (needs legality check)

    // Derives flags for a "e2e4"-style move against this position. Does
    // not check legality beyond basic shape.
    std::optional<Move> move_from_uci(std::string_view text) const {
        auto m = parse_uci_squares(text);
        if (!m) return std::nullopt;
        auto piece = board_.occupant(m->source);
        if (!piece) return std::nullopt;
        if (piece->kind == PieceKind::King && std::abs(m->target.file() - m->source.file()) == 2)
            m->flag = MoveFlag::Castle;
        else if (piece->kind == PieceKind::Pawn && board_.en_passant_square() &&
                 m->target == *board_.en_passant_square())
            m->flag = MoveFlag::EnPassant;
        else if (piece->kind == PieceKind::Pawn &&
                 std::abs(m->target.rank() - m->source.rank()) == 2)
            m->flag = MoveFlag::DoublePush;
        else if (board_.occupant(m->target))
            m->flag = MoveFlag::Capture;
        return m;
    }

    std::string fen() const;

  private:
    Board board_;
    std::vector<std::uint64_t> history_;  // keys since last irreversible move
};

// --- Zobrist hashing over positions ---

// Hash of a position from scratch: XOR of the piece-square entries for
// every occupied square (keyed by piece kind and color, not identity),
// plus side/castling/en-passant terms.
inline std::uint64_t full_hash(const Position& pos, const ZobristTables& t) {
    return pos.board().zobrist_key(t);
}

inline std::uint64_t full_hash(const Board& b, const ZobristTables& t) {
    return b.zobrist_key(t);
}

// Advances a hash across one legal move using XOR deltas of the touched
// squares and state terms only. h must equal full_hash(before, t).
inline std::uint64_t incremental_update(std::uint64_t h, const Board& before, const Move& m,
                                        const ZobristTables& t) {
    Board scratch = before;
    BoardDelta d;
    scratch.do_move(m, &d);
    return h ^ hash_delta(d, t);
}

inline std::uint64_t incremental_update(std::uint64_t h, const Position& before, const Move& m,
                                        const ZobristTables& t) {
    return incremental_update(h, before.board(), m, t);
}

// --- FEN ---

inline Position Position::from_fen(std::string_view fen) {
    Position p;
    p.board_.clear();

    // split into fields
    std::array<std::string_view, 6> fields{};
    int nfields = 0;
    std::size_t i = 0;
    while (i < fen.size() && nfields < 6) {
        while (i < fen.size() && fen[i] == ' ') ++i;
        std::size_t j = i;
        while (j < fen.size() && fen[j] != ' ') ++j;
        if (j > i) fields[nfields++] = fen.substr(i, j - i);
        i = j;
    }
    if (nfields < 4) throw InvalidFen("FEN needs at least 4 fields: " + std::string(fen));

    // piece placement; white identities are assigned by encounter order
    // from each kind's initial pool since FEN carries no identity
    std::array<bool, 17> id_used{};
    auto assign_id = [&](PieceKind k) -> PieceId {
        static constexpr std::array<std::array<int, 8>, 6> pools = {{
            {9, 10, 11, 12, 13, 14, 15, 16},  // pawns
            {2, 7, 0, 0, 0, 0, 0, 0},         // knights
            {3, 6, 0, 0, 0, 0, 0, 0},         // bishops
            {1, 8, 0, 0, 0, 0, 0, 0},         // rooks
            {4, 0, 0, 0, 0, 0, 0, 0},         // queen
            {5, 0, 0, 0, 0, 0, 0, 0},         // king
        }};
        for (int cand : pools[static_cast<int>(k)]) {
            if (cand && !id_used[cand]) {
                id_used[cand] = true;
                return static_cast<PieceId>(cand);
            }
        }
        for (int cand = 1; cand <= 16; ++cand) {  // promoted extras
            if (!id_used[cand]) {
                id_used[cand] = true;
                return static_cast<PieceId>(cand);
            }
        }
        throw InvalidFen("more than 16 white pieces");
    };

    int rank = 7, file = 0;
    int white_kings = 0, black_kings = 0;
    for (char c : fields[0]) {
        if (c == '/') {
            if (file != 8) throw InvalidFen("bad rank length in FEN");
            --rank;
            file = 0;
            if (rank < 0) throw InvalidFen("too many ranks in FEN");
            continue;
        }
        if (c >= '1' && c <= '8') {
            file += c - '0';
            if (file > 8) throw InvalidFen("bad rank length in FEN");
            continue;
        }
        auto kind = kind_from_char(static_cast<char>(c | 0x20));
        if (!kind || file >= 8) throw InvalidFen("bad piece char in FEN");
        Color color = (c & 0x20) ? Color::Black : Color::White;
        Square sq = Square::from_file_rank(file, rank);
        if (*kind == PieceKind::Pawn && (rank == 0 || rank == 7))
            throw InvalidFen("pawn on back rank");
        if (*kind == PieceKind::King) (color == Color::White ? white_kings : black_kings)++;
        PieceId id = color == Color::White ? assign_id(*kind) : kNoPieceId;
        p.board_.put_piece(sq, *kind, color, id);
        ++file;
    }
    if (rank != 0 || file != 8) throw InvalidFen("incomplete board in FEN");
    if (white_kings != 1 || black_kings != 1) throw InvalidFen("need exactly one king per side");

    if (fields[1] == "w")
        p.board_.set_side(Color::White);
    else if (fields[1] == "b")
        p.board_.set_side(Color::Black);
    else
        throw InvalidFen("bad side to move");

    std::uint8_t rights = 0;
    if (fields[2] != "-") {
        for (char c : fields[2]) {
            switch (c) {
                case 'K': rights |= kWhiteKingside; break;
                case 'Q': rights |= kWhiteQueenside; break;
                case 'k': rights |= kBlackKingside; break;
                case 'q': rights |= kBlackQueenside; break;
                default: throw InvalidFen("bad castling field");
            }
        }
    }
    p.board_.set_castling(rights);

    if (fields[3] != "-") {
        auto ep = Square::parse(fields[3]);
        if (!ep) throw InvalidFen("bad en-passant square");
        // the side that just double-pushed is the one not to move
        p.board_.set_en_passant(*ep, opposite(p.board_.side_to_move()));
    }

    if (nfields > 4) {
        std::int64_t hm = 0;
        for (char c : fields[4]) {
            if (c < '0' || c > '9') throw InvalidFen("bad halfmove clock");
            hm = hm * 10 + (c - '0');
        }
        p.board_.set_halfmove_clock(static_cast<int>(hm));
    }
    if (nfields > 5) {
        std::int64_t fm = 0;
        for (char c : fields[5]) {
            if (c < '0' || c > '9') throw InvalidFen("bad fullmove number");
            fm = fm * 10 + (c - '0');
        }
        p.board_.set_fullmove_number(static_cast<int>(fm ? fm : 1));
    }

    p.board_.rebuild_key();
    p.history_ = {p.board_.key()};
    return p;
}

inline std::string Position::fen() const {
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int empties = 0;
        for (int file = 0; file < 8; ++file) {
            auto piece = board_.occupant(Square::from_file_rank(file, rank));
            if (!piece) {
                ++empties;
                continue;
            }
            if (empties) {
                out += static_cast<char>('0' + empties);
                empties = 0;
            }
            char c = kKindChar[static_cast<int>(piece->kind)];
            out += piece->color == Color::White ? static_cast<char>(c & ~0x20) : c;
        }
        if (empties) out += static_cast<char>('0' + empties);
        if (rank) out += '/';
    }
    out += board_.side_to_move() == Color::White ? " w " : " b ";
    if (board_.castling_rights()) {
        if (board_.has_castling_right(kWhiteKingside)) out += 'K';
        if (board_.has_castling_right(kWhiteQueenside)) out += 'Q';
        if (board_.has_castling_right(kBlackKingside)) out += 'k';
        if (board_.has_castling_right(kBlackQueenside)) out += 'q';
    } else {
        out += '-';
    }
    out += ' ';
    if (auto ep = board_.en_passant_square())
        out += ep->name();
    else
        out += '-';
    out += ' ';
    out += std::to_string(board_.halfmove_clock());
    out += ' ';
    out += std::to_string(board_.fullmove_number());
    return out;
}

inline Position initial_position() { return Position::initial(); }

// occupant_piece: the white piece id at a square (0 for empty or black).
inline PieceId occupant_piece(const Position& pos, Square l) { return pos.occupant_id(l); }

}  // namespace piecevec::chess
