#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/data/mlog.hpp"
#include "piecevec/data/records.hpp"
#include "piecevec/engine/uci_client.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/util/rng.hpp"
#include "piecevec/zobrist.hpp"

namespace piecevec::engine {

struct SelfplayOptions {
    std::uint32_t max_games = 1;
    std::uint32_t max_plies = 600;  // per game; reaching it records a draw
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string source = "selfplay";  // provenance string for the log header
};

struct SelfplaySummary {
    std::uint64_t games_written = 0;
    std::uint64_t games_aborted = 0;  // engine proposed an illegal move
    std::uint64_t total_plies = 0;    // plies (half-moves) across written games
};

// One game from the initial position to termination. Throws IllegalEngineMove
// when an engine's reply is not in the legal set; the caller decides whether
// that aborts the run or just the game.
inline data::GameRecord play_game(Engine& white, Engine& black, std::uint32_t game_id,
                                  std::uint64_t game_seed, std::uint32_t max_plies,
                                  const ZobristTables& tables) {
    white.start_game(game_seed);
    black.start_game(game_seed);

    data::GameRecord g;
    g.game_id = game_id;
    chess::Position pos = chess::initial_position();
    std::vector<std::string> history;

    for (std::uint32_t ply = 1;; ++ply) {
        const chess::Status st = chess::game_status(pos);
        if (st != chess::Status::Ongoing) {
            g.result = data::result_from_status(st, pos.side_to_move());
            g.termination = data::termination_from_status(st);
            return g;
        }
        if (ply > max_plies) {
            g.result = data::GameResult::Draw;
            g.termination = data::Termination::PlyCap;
            return g;
        }

        Engine& mover = pos.side_to_move() == chess::Color::White ? white : black;
        mover.set_position("startpos", history);
        const chess::Move m = resolve_move(pos, mover.best_move());

        g.moves.push_back(data::make_move_record(game_id, ply, pos, m, tables));
        pos.do_move(m);
        history.push_back(m.uci());
    }
}

namespace detail {

inline std::uint64_t per_game_seed(std::uint64_t base, std::uint32_t game_id) {
    return splitmix64(base ^ game_id);
}

inline void log_aborted(std::uint32_t game_id, const char* what) {
    std::cerr << "selfplay: game " << game_id << " aborted: " << what << '\n';
}

}  // namespace detail

// Plays opts.max_games games and streams them to `out_path` as a move log.
// Games appear strictly in game_id order regardless of `jobs`, so worker
// count never changes the output bytes (given deterministic engines). Games
// aborted for an illegal engine move are logged to stderr, counted, and
// omitted from the file; their game_ids are not reused.
inline SelfplaySummary run_selfplay(const EngineConfig& white_cfg, const EngineConfig& black_cfg,
                                    const SelfplayOptions& opts, const std::string& out_path) {
    data::MlogHeader header;
    header.meta.zobrist_seed = kDefaultZobristSeed;
    header.meta.source = opts.source;
    data::MlogWriter writer(out_path, header);
    const ZobristTables& tables = default_tables();

    SelfplaySummary sum;
    auto emit = [&](std::optional<data::GameRecord>&& g) {
        if (g) {
            ++sum.games_written;
            sum.total_plies += g->moves.size();
            writer.write_game(*g);
        } else {
            ++sum.games_aborted;
        }
    };

    if (opts.jobs <= 1) {
        auto white = make_engine(white_cfg);
        auto black = make_engine(black_cfg);
        for (std::uint32_t gid = 0; gid < opts.max_games; ++gid) {
            try {
                emit(play_game(*white, *black, gid, detail::per_game_seed(opts.seed, gid),
                               opts.max_plies, tables));
            } catch (const IllegalEngineMove& e) {
                detail::log_aborted(gid, e.what());
                emit(std::nullopt);
            }
        }
        white->close();
        black->close();
        writer.flush();
        return sum;
    }

    // Worker pool with a reorder buffer: workers race through game ids, the
    // caller drains results in id order. nullopt marks an aborted game.
    std::atomic<std::uint32_t> next{0};
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint32_t, std::optional<data::GameRecord>> done;
    std::exception_ptr fatal;

    auto worker = [&] {
        try {
            auto white = make_engine(white_cfg);
            auto black = make_engine(black_cfg);
            for (;;) {
                {
                    std::lock_guard lk(mu);
                    if (fatal) break;
                }
                const std::uint32_t gid = next.fetch_add(1);
                if (gid >= opts.max_games) break;
                std::optional<data::GameRecord> g;
                try {
                    g = play_game(*white, *black, gid, detail::per_game_seed(opts.seed, gid),
                                  opts.max_plies, tables);
                } catch (const IllegalEngineMove& e) {
                    detail::log_aborted(gid, e.what());
                }
                {
                    std::lock_guard lk(mu);
                    done.emplace(gid, std::move(g));
                }
                cv.notify_all();
            }
            white->close();
            black->close();
        } catch (...) {
            {
                std::lock_guard lk(mu);
                if (!fatal) fatal = std::current_exception();
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(opts.jobs));
    for (int i = 0; i < opts.jobs; ++i) pool.emplace_back(worker);

    for (std::uint32_t gid = 0; gid < opts.max_games; ++gid) {
        std::unique_lock lk(mu);
        cv.wait(lk, [&] { return fatal || done.count(gid) != 0; });
        if (done.count(gid) == 0) break;  // fatal error before this game finished
        auto node = done.extract(gid);
        lk.unlock();
        emit(std::move(node.mapped()));
    }

    for (std::thread& t : pool) t.join();
    if (fatal) std::rethrow_exception(fatal);
    writer.flush();
    return sum;
}

}  // namespace piecevec::engine
