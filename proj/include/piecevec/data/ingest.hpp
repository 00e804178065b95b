#pragma once

#include <string>
#include <utility>
#include <vector>

#include "piecevec/data/mlog.hpp"
#include "piecevec/data/records.hpp"
#include "piecevec/zobrist.hpp"

namespace piecevec::data {

namespace detail {

inline void append_white_records(const GameRecord& g, std::vector<MoveRecord>& out) {
    for (const MoveRecord& r : g.moves)
        if (r.mover == chess::Color::White) out.push_back(r);
}

}  // namespace detail

// Keeps white-won games and their white plies only. Metadata (hash seed,
// bucket state) carries through untouched.
inline FilteredDataset filter_white_wins(std::vector<GameRecord> games, DatasetMeta meta = {}) {
    FilteredDataset ds;
    ds.meta = std::move(meta);
    ds.summary.games_in = games.size();
    for (GameRecord& g : games) {
        if (g.result != GameResult::WhiteWin) continue;
        detail::append_white_records(g, ds.records);
        ds.games.push_back(std::move(g));
    }
    ds.summary.games_kept = ds.games.size();
    ds.summary.records_kept = ds.records.size();
    return ds;
}

// Streaming variant: non-qualifying games never accumulate in memory.
inline FilteredDataset filter_white_wins_mlog(const std::string& path) {
    FilteredDataset ds;
    MlogHeader header = stream_mlog(path, [&](GameRecord&& g) {
        ++ds.summary.games_in;
        if (g.result != GameResult::WhiteWin) return;
        detail::append_white_records(g, ds.records);
        ds.games.push_back(std::move(g));
    });
    ds.meta = header.meta;
    if (ds.meta.source.empty()) ds.meta.source = path;
    ds.summary.games_kept = ds.games.size();
    ds.summary.records_kept = ds.records.size();
    return ds;
}

// Assigns each record the bucket of the position it was made from. When the
// tables' seed matches the dataset's recorded seed the stored hashes are
// reused; otherwise every game is replayed and hashes recomputed, so a
// dataset can be re-partitioned under any seed.
inline FilteredDataset annotate_buckets(FilteredDataset ds, const ZobristTables& tables,
                                        std::uint32_t num_buckets) {
    if (!valid_bucket_count(num_buckets))
        throw InvalidBucketCount("bucket count must be a power of two in [1, 32768], got " +
                                 std::to_string(num_buckets));

    if (tables.seed() != ds.meta.zobrist_seed) {
        for (GameRecord& g : ds.games) {
            chess::Position pos = chess::initial_position();
            for (MoveRecord& r : g.moves) {
                r.hash_before = full_hash(pos, tables);
                pos = pos.apply_move(record_move(r));
            }
        }
        ds.meta.zobrist_seed = tables.seed();
    }
    for (GameRecord& g : ds.games)
        for (MoveRecord& r : g.moves) r.bucket = bucket(r.hash_before, num_buckets);

    // rebuild the flattened view so records and games stay in lockstep
    ds.records.clear();
    for (const GameRecord& g : ds.games) detail::append_white_records(g, ds.records);
    ds.meta.num_buckets = num_buckets;
    return ds;
}

}  // namespace piecevec::data
