#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/counts.hpp"
#include "piecevec/data/split.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/factor/model_io.hpp"
#include "piecevec/factor/nmf.hpp"
#include "piecevec/util/text.hpp"
#include "piecevec/zobrist.hpp"

namespace piecevec::predict {

namespace detail {

inline void require_bucket_model(const factor::NmfModel& model, const factor::ModelInfo& info,
                                 const ZobristTables& tables) {
    if (info.scheme != counts::RowScheme::PieceBucket)
        throw ModelSchemeMismatch("prediction needs a piece-bucket model, got scheme '" +
                                  std::string(counts::scheme_name(info.scheme)) + "'");
    if (model.w.rows() !=
        static_cast<Eigen::Index>(counts::row_count(counts::RowScheme::PieceBucket,
                                                    info.num_buckets)))
        throw ModelSchemeMismatch("model has " + std::to_string(model.w.rows()) +
                                  " rows, expected 16*" + std::to_string(info.num_buckets));
    if (tables.seed() != info.zobrist_seed)
        throw ModelSchemeMismatch("hash tables seeded with " + std::to_string(tables.seed()) +
                                  ", model trained under " + std::to_string(info.zobrist_seed));
}

// sum of W rows for the white pieces on the board, all in bucket j
inline Eigen::VectorXd presence_wsum(const factor::NmfModel& model, std::uint32_t num_buckets,
                                     std::uint16_t presence_mask, BucketId j) {
    Eigen::VectorXd wsum = Eigen::VectorXd::Zero(model.d);
    for (int id = 1; id <= kWhitePieceCount; ++id)
        if (presence_mask & (1u << (id - 1)))
            wsum += model.w.row(static_cast<Eigen::Index>(id - 1) * num_buckets + j).transpose();
    return wsum;
}

}  // namespace detail

// Argmax with deterministic ties: the smallest move index wins.
inline MoveIndex argmax_move(const Eigen::VectorXd& y) {
    int best = 0;
    for (int j = 1; j < y.size(); ++j)
        if (y[j] > y[best]) best = j;
    return MoveIndex(best);
}

// The 4096-dimensional prediction for the position s: each white piece on
// the board contributes H^T w_{piece, bucket(s)}; empty squares and black
// pieces contribute nothing, as do (piece, bucket) rows that never received
// training mass (their W rows are zero).
inline Eigen::VectorXd predict_vector(const chess::Position& s, const factor::NmfModel& model,
                                      const factor::ModelInfo& info, const ZobristTables& tables) {
    detail::require_bucket_model(model, info, tables);
    const BucketId j = bucket(full_hash(s, tables), info.num_buckets);
    const Eigen::VectorXd wsum =
        detail::presence_wsum(model, info.num_buckets, s.white_presence_mask(), j);
    return model.h.transpose() * wsum;
}

inline MoveIndex predict_move(const chess::Position& s, const factor::NmfModel& model,
                              const factor::ModelInfo& info, const ZobristTables& tables) {
    return argmax_move(predict_vector(s, model, info, tables));
}

struct EvalOptions {
    bool mask_legal = false;  // restrict the argmax to legal moves of s
};

// One evaluation row; the fixed CSV columns of the sweep report.
struct EvalResult {
    std::uint32_t num_buckets = 1;
    int d = 0;
    counts::RowScheme scheme = counts::RowScheme::PieceBucket;
    std::uint64_t train_records = 0;
    std::uint64_t test_records = 0;
    double accuracy = 0;
    double empty_bucket_rate = 0;
    double random_baseline = 1.0 / kMoveIndexCount;
    std::uint64_t split_seed = 0;
    std::uint64_t nmf_seed = 0;
};

// Replays every test game and scores the model's argmax against the move
// the winner actually played, for exactly the records listed in
// test.records (a by-move split lists only some plies of a game).
// Identical (presence mask, bucket) states repeat constantly, so
// predictions are memoized on that pair.
inline EvalResult evaluate_accuracy(const data::FilteredDataset& test,
                                    const factor::NmfModel& model, const factor::ModelInfo& info,
                                    const EvalOptions& opts = {}) {
    const ZobristTables tables = init_tables(info.zobrist_seed);
    detail::require_bucket_model(model, info, tables);
    const std::uint32_t B = info.num_buckets;

    // a bucket is empty when no piece row in it carries any mass
    std::vector<char> bucket_empty(B, 1);
    for (std::uint32_t j = 0; j < B; ++j)
        for (int id = 1; id <= kWhitePieceCount && bucket_empty[j]; ++id)
            if (!model.w.row(static_cast<Eigen::Index>(id - 1) * B + j).isZero(0.0))
                bucket_empty[j] = 0;

    const auto ply_key = [](std::uint64_t game_id, std::uint32_t ply) {
        return (game_id << 10) | ply;  // ply cap is far below 1024
    };
    std::unordered_set<std::uint64_t> scored;
    scored.reserve(test.records.size());
    for (const data::MoveRecord& r : test.records) scored.insert(ply_key(r.game_id, r.ply));

    EvalResult res;
    res.num_buckets = B;
    res.d = model.d;
    res.test_records = test.records.size();
    res.nmf_seed = model.seed;

    std::unordered_map<std::uint64_t, std::uint16_t> memo;
    std::uint64_t correct = 0, empty_hits = 0;
    for (const data::GameRecord& g : test.games) {
        chess::Position pos = chess::initial_position();
        for (const data::MoveRecord& r : g.moves) {
            if (r.mover == chess::Color::White && scored.count(ply_key(r.game_id, r.ply))) {
                const BucketId j = bucket(full_hash(pos, tables), B);
                if (bucket_empty[j]) ++empty_hits;
                std::uint16_t predicted;
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(pos.white_presence_mask()) << 16) | j;
                auto it = opts.mask_legal ? memo.end() : memo.find(key);
                if (!opts.mask_legal && it != memo.end()) {
                    predicted = it->second;
                } else {
                    const Eigen::VectorXd y =
                        model.h.transpose() *
                        detail::presence_wsum(model, B, pos.white_presence_mask(), j);
                    if (opts.mask_legal) {
                        // argmax over the legal moves only (position-specific,
                        // so not memoizable on the presence/bucket key)
                        auto legal = chess::legal_moves(pos);
                        int best = -1;
                        for (const chess::Move& lm : legal) {
                            const int idx = move_index(lm.source, lm.target).index;
                            if (best < 0 || y[idx] > y[best] ||
                                (y[idx] == y[best] && idx < best))
                                best = idx;
                        }
                        predicted = static_cast<std::uint16_t>(best < 0 ? 0 : best);
                    } else {
                        predicted = argmax_move(y).index;
                        memo.emplace(key, predicted);
                    }
                }
                if (predicted == r.move.index) ++correct;
            }
            pos = pos.apply_move(data::record_move(r));
        }
    }
    res.accuracy = res.test_records ? static_cast<double>(correct) /
                                          static_cast<double>(res.test_records)
                                    : 0.0;
    res.empty_bucket_rate = res.test_records ? static_cast<double>(empty_hits) /
                                                   static_cast<double>(res.test_records)
                                             : 0.0;
    return res;
}

struct SweepOptions {
    int d = 10;
    std::vector<std::uint32_t> bucket_counts = {1, 16, 256};
    std::vector<std::uint64_t> split_seeds = {1};
    double test_fraction = 0.2;
    factor::NmfOptions nmf;     // .seed is the base; per-run seeds derive from it
    bool raw_counts = false;    // default: row-normalized counts
    bool mask_legal = false;
};

// annotate -> split -> count -> factorize -> evaluate, once per
// (bucket count, split seed) pair, in that order.
inline std::vector<EvalResult> bucket_sweep(const data::FilteredDataset& ds,
                                            const SweepOptions& opts) {
    const ZobristTables tables = init_tables(ds.meta.zobrist_seed);
    std::vector<EvalResult> report;
    for (std::uint32_t B : opts.bucket_counts) {
        data::FilteredDataset annotated = data::annotate_buckets(ds, tables, B);
        for (std::uint64_t split_seed : opts.split_seeds) {
            auto [train, test] = data::split_train_test(annotated, opts.test_fraction, split_seed);
            counts::CountMatrix x = counts::build_count_matrix(train, counts::RowScheme::PieceBucket);

            factor::NmfOptions nmf_opts = opts.nmf;
            nmf_opts.d = opts.d;
            nmf_opts.seed = splitmix64(opts.nmf.seed ^ splitmix64(B) ^ split_seed);
            factor::NmfModel model =
                factor::nmf_fit(opts.raw_counts ? x.to_sparse() : counts::row_normalize(x),
                                nmf_opts);

            factor::ModelInfo info;
            info.scheme = counts::RowScheme::PieceBucket;
            info.num_buckets = B;
            info.zobrist_seed = ds.meta.zobrist_seed;
            info.row_normalized = !opts.raw_counts;

            EvalResult row = evaluate_accuracy(test, model, info, {opts.mask_legal});
            row.train_records = train.records.size();
            row.split_seed = split_seed;
            report.push_back(row);
        }
    }
    return report;
}

// num_buckets,d,scheme,train_records,test_records,accuracy,empty_bucket_rate,
// random_baseline,split_seed,nmf_seed
inline void write_eval_csv(const std::string& path, const std::vector<EvalResult>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "num_buckets,d,scheme,train_records,test_records,accuracy,empty_bucket_rate,"
           "random_baseline,split_seed,nmf_seed\n";
    for (const EvalResult& r : rows)
        out << r.num_buckets << ',' << r.d << ',' << counts::scheme_name(r.scheme) << ','
            << r.train_records << ',' << r.test_records << ',' << format_double(r.accuracy) << ','
            << format_double(r.empty_bucket_rate) << ',' << format_double(r.random_baseline)
            << ',' << r.split_seed << ',' << r.nmf_seed << '\n';
}

}  // namespace piecevec::predict
