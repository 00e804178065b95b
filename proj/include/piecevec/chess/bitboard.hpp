#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "types.hpp"

namespace piecevec::chess {

using Bitboard = std::uint64_t;

constexpr Bitboard bb(Square s) { return 1ULL << s.index; }

constexpr int pop_lsb(Bitboard& b) {
    int s = std::countr_zero(b);
    b &= b - 1;
    return s;
}

namespace detail {

// Directions indexed N, S, E, W, NE, NW, SE, SW.
inline constexpr std::array<std::pair<int, int>, 8> kDirs = {
    {{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};

constexpr bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }

constexpr std::array<std::array<Bitboard, 64>, 8> make_rays() {
    std::array<std::array<Bitboard, 64>, 8> rays{};
    for (int d = 0; d < 8; ++d) {
        for (int s = 0; s < 64; ++s) {
            int f = (s & 7) + kDirs[d].first;
            int r = (s >> 3) + kDirs[d].second;
            Bitboard ray = 0;
            while (on_board(f, r)) {
                ray |= 1ULL << (f + 8 * r);
                f += kDirs[d].first;
                r += kDirs[d].second;
            }
            rays[d][s] = ray;
        }
    }
    return rays;
}

constexpr std::array<Bitboard, 64> make_leaper(const std::array<std::pair<int, int>, 8>& deltas) {
    std::array<Bitboard, 64> tbl{};
    for (int s = 0; s < 64; ++s) {
        Bitboard b = 0;
        for (auto [df, dr] : deltas) {
            int f = (s & 7) + df, r = (s >> 3) + dr;
            if (on_board(f, r)) b |= 1ULL << (f + 8 * r);
        }
        tbl[s] = b;
    }
    return tbl;
}

constexpr std::array<std::array<Bitboard, 64>, 2> make_pawn_attacks() {
    std::array<std::array<Bitboard, 64>, 2> tbl{};
    for (int s = 0; s < 64; ++s) {
        int f = s & 7, r = s >> 3;
        Bitboard w = 0, b = 0;
        if (r < 7) {
            if (f > 0) w |= 1ULL << (s + 7);
            if (f < 7) w |= 1ULL << (s + 9);
        }
        if (r > 0) {
            if (f > 0) b |= 1ULL << (s - 9);
            if (f < 7) b |= 1ULL << (s - 7);
        }
        tbl[0][s] = w;
        tbl[1][s] = b;
    }
    return tbl;
}

inline constexpr auto kRays = make_rays();

}  // namespace detail

inline constexpr auto kKnightAttacks = detail::make_leaper(
    {{{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}});

inline constexpr auto kKingAttacks = detail::make_leaper(
    {{{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}});

// kPawnAttacks[color][sq]: squares a pawn of that color on sq attacks.
inline constexpr auto kPawnAttacks = detail::make_pawn_attacks();

inline Bitboard pawn_attacks(Color c, Square s) {
    return kPawnAttacks[static_cast<int>(c)][s.index];
}

namespace detail {

// Classical ray blocker scan. dir 0,2,4,5 advance toward higher square
// indices (first blocker = lsb), the rest toward lower (first = msb).
inline Bitboard ray_attack(int dir, int sq, Bitboard occ) {
    Bitboard ray = kRays[dir][sq];
    Bitboard blockers = ray & occ;
    if (!blockers) return ray;
    int first;
    if (dir == 0 || dir == 2 || dir == 4 || dir == 5)
        first = std::countr_zero(blockers);
    else
        first = 63 - std::countl_zero(blockers);
    return ray ^ kRays[dir][first];
}

}  // namespace detail

inline Bitboard rook_attacks(Square s, Bitboard occ) {
    return detail::ray_attack(0, s.index, occ) | detail::ray_attack(1, s.index, occ) |
           detail::ray_attack(2, s.index, occ) | detail::ray_attack(3, s.index, occ);
}

inline Bitboard bishop_attacks(Square s, Bitboard occ) {
    return detail::ray_attack(4, s.index, occ) | detail::ray_attack(5, s.index, occ) |
           detail::ray_attack(6, s.index, occ) | detail::ray_attack(7, s.index, occ);
}

inline Bitboard queen_attacks(Square s, Bitboard occ) {
    return rook_attacks(s, occ) | bishop_attacks(s, occ);
}

}  // namespace piecevec::chess
