#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/engine/engine.hpp"
#include "piecevec/util/rng.hpp"

namespace piecevec::engine {

// Stateless move pick: the same (seed, position) pair always selects the
// same index, with no draw-order dependence on how the position was reached.
// Shared with the standalone UCI stub binary so a run against the external
// stub is byte-identical to a run against the builtin.
inline std::size_t deterministic_choice(std::uint64_t seed, std::uint64_t position_key,
                                        std::size_t n) {
    if (n == 0) return 0;
    return static_cast<std::size_t>(splitmix64(seed ^ position_key) % n);
}

// Builtin uniform-random legal mover. Tracks the position like a UCI engine
// would (start token + move list), with a prefix cache so the per-ply
// "position startpos moves ..." convention stays O(1) instead of replaying
// the whole game each call.
class RandomMover final : public Engine {
  public:
    void start_game(std::uint64_t game_seed) override { seed_ = game_seed; }

    void set_position(const std::string& start,
                      const std::vector<std::string>& moves_uci) override {
        const bool extends = start == start_ && moves_uci.size() >= history_.size() &&
                             std::equal(history_.begin(), history_.end(), moves_uci.begin());
        if (!extends) {
            pos_ = start == "startpos" ? chess::initial_position()
                                       : chess::Position::from_fen(start);
            start_ = start;
            history_.clear();
        }
        for (std::size_t i = history_.size(); i < moves_uci.size(); ++i) {
            auto m = pos_.move_from_uci(moves_uci[i]);
            if (!m) throw EngineProtocolError("unparsable move in history: " + moves_uci[i]);
            pos_ = pos_.apply_move(*m);
            history_.push_back(moves_uci[i]);
        }
    }

    chess::Move best_move() override {
        auto legal = chess::legal_moves(pos_);
        if (legal.empty())  // terminal position; mirrors "bestmove (none)"
            throw EngineProtocolError("no legal move available");
        return legal[deterministic_choice(seed_, pos_.key(), legal.size())];
    }

    void close() override {}

  private:
    std::uint64_t seed_ = 0;
    chess::Position pos_ = chess::initial_position();
    std::string start_ = "startpos";
    std::vector<std::string> history_;
};

}  // namespace piecevec::engine
