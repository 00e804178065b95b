#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/errors.hpp"

namespace piecevec::engine {

// How to obtain a move supplier. `executable` is either a path to a UCI
// binary or a "builtin:" name ("builtin:random" is the seeded uniform legal
// mover that ships with the library, so the pipeline runs without any
// external engine installed).
struct EngineConfig {
    std::string executable = "builtin:random";
    std::optional<int> movetime_ms;  // exactly one of these two must be set
    std::optional<int> depth;
    std::map<std::string, std::string> options;  // forwarded as setoption
    std::vector<std::string> args;
    int handshake_timeout_ms = 5000;
    int response_timeout_ms = 10000;

    bool is_builtin() const { return executable.rfind("builtin:", 0) == 0; }
};

inline void validate_config(const EngineConfig& cfg) {
    if (cfg.executable.empty()) throw InvalidEngineConfig("engine executable is empty");
    if (cfg.movetime_ms.has_value() == cfg.depth.has_value())
        throw InvalidEngineConfig("exactly one of movetime/depth must be set");
    if (cfg.movetime_ms && *cfg.movetime_ms <= 0)
        throw InvalidEngineConfig("movetime must be positive");
    if (cfg.depth && *cfg.depth <= 0) throw InvalidEngineConfig("depth must be positive");
}

// Move supplier driven the way a UCI engine is driven: the caller announces
// game starts, sets the position as a start token ("startpos" or a FEN) plus
// a move list, and asks for a move. Returned moves carry only
// source/target/promotion; resolve_move below matches them against the legal
// set to validate and pick up flags.
class Engine {
  public:
    virtual ~Engine() = default;

    // `game_seed` lets deterministic engines reseed per game. Engines
    // without a seed knob ignore it.
    virtual void start_game(std::uint64_t game_seed) = 0;
    virtual void set_position(const std::string& start,
                              const std::vector<std::string>& moves_uci) = 0;
    virtual chess::Move best_move() = 0;
    virtual void close() = 0;
};

// Validates an engine's bare move against the position it was asked about.
// Move equality ignores flags, so a match also canonicalizes castle/en
// passant/capture flags from the generated move.
inline chess::Move resolve_move(const chess::Position& pos, const chess::Move& proposed) {
    for (const chess::Move& m : chess::legal_moves(pos))
        if (m == proposed) return m;
    throw IllegalEngineMove("illegal move " + proposed.uci() + " in " + pos.fen());
}

}  // namespace piecevec::engine
