#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <random>

#include "chess/types.hpp"
#include "errors.hpp"

namespace piecevec {

// Position hash keys. All 781 entries are drawn from std::mt19937_64,
// whose output sequence is fixed by the C++ standard, so a given seed
// produces bit-identical tables on every platform. Fill order: the 12
// piece planes (white pawn..king, then black pawn..king), square 0..63
// within each plane; then the side key; then the four castling keys
// (white kingside, white queenside, black kingside, black queenside);
// then the eight en-passant file keys (a..h).
//
// Hash composition convention (see Position::zobrist_key): the side key
// is folded in when white is to move, castling keys for each right held,
// and the en-passant file key when a capturable en-passant square is set.
class ZobristTables {
  public:
    static constexpr int kPlaneCount = 12;
    static constexpr int kEntryCount = kPlaneCount * 64 + 1 + 4 + 8;  // 781

    explicit ZobristTables(std::uint64_t seed) : seed_(seed) {
        std::mt19937_64 gen(seed);
        for (auto& plane : piece_square_)
            for (auto& v : plane) v = gen();
        side_to_move_ = gen();
        for (auto& v : castling_) v = gen();
        for (auto& v : en_passant_file_) v = gen();
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t piece_square(chess::PieceKind k, chess::Color c, chess::Square s) const {
        return piece_square_[chess::plane_index(k, c)][s.index];
    }

    std::uint64_t piece_square(int plane, chess::Square s) const {
        return piece_square_[plane][s.index];
    }

    std::uint64_t side_to_move() const { return side_to_move_; }

    // right: 0 = white kingside, 1 = white queenside, 2 = black kingside,
    // 3 = black queenside
    std::uint64_t castling(int right) const { return castling_[right]; }

    std::uint64_t en_passant_file(int file) const { return en_passant_file_[file]; }

    friend bool operator==(const ZobristTables& a, const ZobristTables& b) {
        return a.piece_square_ == b.piece_square_ && a.side_to_move_ == b.side_to_move_ &&
               a.castling_ == b.castling_ && a.en_passant_file_ == b.en_passant_file_;
    }

  private:
    std::array<std::array<std::uint64_t, 64>, kPlaneCount> piece_square_;
    std::uint64_t side_to_move_;
    std::array<std::uint64_t, 4> castling_;
    std::array<std::uint64_t, 8> en_passant_file_;
    std::uint64_t seed_;
};

inline ZobristTables init_tables(std::uint64_t seed) { return ZobristTables(seed); }

// Default seed used by the CLI and by Position's internal repetition keys.
// Runs are reproducible under this seed unless overridden by flag.
inline constexpr std::uint64_t kDefaultZobristSeed = 0x5EEDBA5EULL;

inline const ZobristTables& default_tables() {
    static const ZobristTables tables(kDefaultZobristSeed);
    return tables;
}

using BucketId = std::uint32_t;

inline constexpr std::uint32_t kMaxBuckets = 32768;  // 2^15

inline bool valid_bucket_count(std::uint32_t num_buckets) {
    return num_buckets >= 1 && num_buckets <= kMaxBuckets && std::has_single_bit(num_buckets);
}

// Bucket = low bits of the hash. Power-of-two counts up to 32768.
inline BucketId bucket(std::uint64_t hash, std::uint32_t num_buckets) {
    if (!valid_bucket_count(num_buckets))
        throw InvalidBucketCount("bucket count must be a power of two in [1, 32768], got " +
                                 std::to_string(num_buckets));
    return static_cast<BucketId>(hash & (num_buckets - 1));
}

}  // namespace piecevec
