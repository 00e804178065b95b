#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace piecevec::chess {

enum class Color : std::uint8_t { White = 0, Black = 1 };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

enum class PieceKind : std::uint8_t { Pawn = 0, Knight, Bishop, Rook, Queen, King };

inline constexpr int kKindCount = 6;
inline constexpr std::array<char, 6> kKindChar = {'p', 'n', 'b', 'r', 'q', 'k'};

inline const char* kind_name(PieceKind k) {
    static constexpr const char* names[6] = {"pawn", "knight", "bishop", "rook", "queen", "king"};
    return names[static_cast<int>(k)];
}

inline std::optional<PieceKind> kind_from_char(char c) {
    switch (c) {
        case 'p': return PieceKind::Pawn;
        case 'n': return PieceKind::Knight;
        case 'b': return PieceKind::Bishop;
        case 'r': return PieceKind::Rook;
        case 'q': return PieceKind::Queen;
        case 'k': return PieceKind::King;
        default: return std::nullopt;
    }
}

// One of the 12 bitboard planes: white planes 0..5, black planes 6..11,
// kind order pawn..king inside each color block.
constexpr int plane_index(PieceKind k, Color c) {
    return static_cast<int>(c) * kKindCount + static_cast<int>(k);
}

constexpr PieceKind plane_kind(int plane) { return static_cast<PieceKind>(plane % kKindCount); }
constexpr Color plane_color(int plane) { return static_cast<Color>(plane / kKindCount); }

struct Piece {
    PieceKind kind;
    Color color;
    friend constexpr bool operator==(Piece a, Piece b) {
        return a.kind == b.kind && a.color == b.color;
    }
};

// a1=0, b1=1, ..., h1=7, a2=8, ..., h8=63
struct Square {
    std::uint8_t index = 0;

    constexpr Square() = default;
    constexpr explicit Square(int i) : index(static_cast<std::uint8_t>(i)) {}

    static constexpr Square from_file_rank(int file, int rank) { return Square(file + 8 * rank); }

    constexpr int file() const { return index & 7; }
    constexpr int rank() const { return index >> 3; }

    std::string name() const {
        return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
    }

    static std::optional<Square> parse(std::string_view s) {
        if (s.size() != 2 || s[0] < 'a' || s[0] > 'h' || s[1] < '1' || s[1] > '8')
            return std::nullopt;
        return Square::from_file_rank(s[0] - 'a', s[1] - '1');
    }

    friend constexpr bool operator==(Square a, Square b) { return a.index == b.index; }
    friend constexpr bool operator!=(Square a, Square b) { return a.index != b.index; }
    friend constexpr bool operator<(Square a, Square b) { return a.index < b.index; }
};

inline constexpr int kSquareCount = 64;

// White piece identity, stable across a game. 0 means "empty square or
// black piece"; 1..16 are the individual white pieces in their initial
// arrangement (1=Ra1 .. 8=Rh1, 9..16 = pawns a2..h2). Identity survives
// promotion and is retired on capture.
using PieceId = std::uint8_t;

inline constexpr PieceId kNoPieceId = 0;
inline constexpr int kPieceIdCount = 17;  // ids 0..16
inline constexpr int kWhitePieceCount = 16;

// Column coordinate of the move space: 64*source + target, 4096 values.
struct MoveIndex {
    std::uint16_t index = 0;

    constexpr MoveIndex() = default;
    constexpr explicit MoveIndex(int i) : index(static_cast<std::uint16_t>(i)) {}

    friend constexpr bool operator==(MoveIndex a, MoveIndex b) { return a.index == b.index; }
    friend constexpr bool operator!=(MoveIndex a, MoveIndex b) { return a.index != b.index; }
    friend constexpr bool operator<(MoveIndex a, MoveIndex b) { return a.index < b.index; }
};

inline constexpr int kMoveIndexCount = 64 * 64;

constexpr MoveIndex move_index(Square source, Square target) {
    return MoveIndex(64 * source.index + target.index);
}

constexpr std::pair<Square, Square> decode_move_index(MoveIndex mi) {
    return {Square(mi.index >> 6), Square(mi.index & 63)};
}

}  // namespace piecevec::chess

namespace piecevec {

// Pipeline-wide vocabulary: the row and column coordinates of every count
// matrix are piece identities and move indices, so the whole library uses
// these names unqualified.
using chess::decode_move_index;
using chess::kMoveIndexCount;
using chess::kNoPieceId;
using chess::kPieceIdCount;
using chess::kWhitePieceCount;
using chess::move_index;
using chess::MoveIndex;
using chess::PieceId;

}  // namespace piecevec
