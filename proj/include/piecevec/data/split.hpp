#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "piecevec/data/ingest.hpp"
#include "piecevec/data/records.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/util/rng.hpp"

namespace piecevec::data {

// ByGame keeps all of a game's records on one side, so near-duplicate
// positions from one game cannot leak across the boundary. ByMove splits
// individual records regardless of game (the leakier reading); both sides
// then carry the full move list of every game they touch, since evaluation
// has to replay games to reconstruct the faced positions.
enum class SplitMode { ByGame, ByMove };

namespace detail {

inline FilteredDataset split_part(const FilteredDataset& ds, std::vector<GameRecord> games,
                                  std::vector<MoveRecord> records) {
    FilteredDataset part;
    part.meta = ds.meta;
    part.games = std::move(games);
    part.records = std::move(records);
    part.summary.games_in = part.games.size();
    part.summary.games_kept = part.games.size();
    part.summary.records_kept = part.records.size();
    return part;
}

}  // namespace detail

// Deterministic under the seed: games (or records) are shuffled and assigned
// to the test side until it first reaches `test_fraction` of the records.
inline std::pair<FilteredDataset, FilteredDataset> split_train_test(
    const FilteredDataset& ds, double test_fraction, std::uint64_t seed,
    SplitMode mode = SplitMode::ByGame) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InvalidDimension("test fraction must lie in (0, 1)");
    if (ds.records.empty()) throw EmptyDataset("cannot split an empty dataset");

    Rng rng(seed);
    if (mode == SplitMode::ByGame) {
        std::vector<std::size_t> order(ds.games.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        const double target = test_fraction * static_cast<double>(ds.records.size());
        std::vector<char> in_test(ds.games.size(), 0);
        double test_records = 0;
        for (std::size_t idx : order) {
            if (test_records >= target) break;
            in_test[idx] = 1;
            for (const MoveRecord& r : ds.games[idx].moves)
                if (r.mover == chess::Color::White) ++test_records;
        }

        std::vector<GameRecord> test_games, train_games;
        std::vector<MoveRecord> test_recs, train_recs;
        for (std::size_t i = 0; i < ds.games.size(); ++i) {
            (in_test[i] ? test_games : train_games).push_back(ds.games[i]);
            detail::append_white_records(ds.games[i], in_test[i] ? test_recs : train_recs);
        }
        return {detail::split_part(ds, std::move(train_games), std::move(train_recs)),
                detail::split_part(ds, std::move(test_games), std::move(test_recs))};
    }

    // ByMove: pick test records uniformly; a game whose records land on both
    // sides appears (with its full move list) in both parts' game sets.
    std::vector<std::size_t> order(ds.records.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const auto k = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(ds.records.size())));
    std::vector<char> in_test(ds.records.size(), 0);
    for (std::size_t i = 0; i < k && i < order.size(); ++i) in_test[order[i]] = 1;

    std::vector<GameRecord> test_games, train_games;
    std::vector<MoveRecord> test_recs, train_recs;
    std::size_t cursor = 0;  // ds.records is flattened in game order
    for (const GameRecord& g : ds.games) {
        bool any_test = false, any_train = false;
        for (const MoveRecord& r : g.moves) {
            if (r.mover != chess::Color::White) continue;
            if (in_test[cursor++]) {
                test_recs.push_back(r);
                any_test = true;
            } else {
                train_recs.push_back(r);
                any_train = true;
            }
        }
        if (any_test) test_games.push_back(g);
        if (any_train) train_games.push_back(g);
    }
    return {detail::split_part(ds, std::move(train_games), std::move(train_recs)),
            detail::split_part(ds, std::move(test_games), std::move(test_recs))};
}

}  // namespace piecevec::data
