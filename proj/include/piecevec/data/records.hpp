#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/zobrist.hpp"

namespace piecevec::data {

enum class GameResult : std::uint8_t { WhiteWin, BlackWin, Draw };

// Why a game ended. PlyCap marks games truncated by the per-game move limit;
// they replay to an Ongoing position.
enum class Termination : std::uint8_t {
    Checkmate,
    Stalemate,
    Repetition,
    FiftyMove,
    PlyCap,
};

inline std::string_view result_name(GameResult r) {
    switch (r) {
        case GameResult::WhiteWin: return "white";
        case GameResult::BlackWin: return "black";
        case GameResult::Draw: return "draw";
    }
    return "?";
}

inline std::optional<GameResult> parse_result(std::string_view s) {
    if (s == "white") return GameResult::WhiteWin;
    if (s == "black") return GameResult::BlackWin;
    if (s == "draw") return GameResult::Draw;
    return std::nullopt;
}

inline std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::Checkmate: return "checkmate";
        case Termination::Stalemate: return "stalemate";
        case Termination::Repetition: return "repetition";
        case Termination::FiftyMove: return "fifty_move";
        case Termination::PlyCap: return "ply_cap";
    }
    return "?";
}

inline std::optional<Termination> parse_termination(std::string_view s) {
    if (s == "checkmate") return Termination::Checkmate;
    if (s == "stalemate") return Termination::Stalemate;
    if (s == "repetition") return Termination::Repetition;
    if (s == "fifty_move") return Termination::FiftyMove;
    if (s == "ply_cap") return Termination::PlyCap;
    return std::nullopt;
}

// Result implied by a terminal status. Checkmate: the side to move is mated,
// so the mover of the last ply won.
inline GameResult result_from_status(chess::Status st, chess::Color side_to_move) {
    if (st == chess::Status::Checkmate)
        return side_to_move == chess::Color::White ? GameResult::BlackWin : GameResult::WhiteWin;
    return GameResult::Draw;
}

inline Termination termination_from_status(chess::Status st) {
    switch (st) {
        case chess::Status::Checkmate: return Termination::Checkmate;
        case chess::Status::Stalemate: return Termination::Stalemate;
        case chess::Status::DrawRepetition: return Termination::Repetition;
        case chess::Status::Draw50Move: return Termination::FiftyMove;
        case chess::Status::Ongoing: break;
    }
    return Termination::PlyCap;
}

// One logged ply. `piece` is the white piece identity (0 for black movers and
// empty squares); `kind` is the mover's piece kind at move time, which the
// per-type row scheme needs since promotion changes it mid-game. `promotion`
// makes records replayable without the source game.
struct MoveRecord {
    std::uint32_t game_id = 0;
    std::uint32_t ply = 0;  // 1-based within the game
    chess::Color mover = chess::Color::White;
    PieceId piece = kNoPieceId;
    chess::PieceKind kind = chess::PieceKind::Pawn;
    chess::Square source;
    chess::Square target;
    MoveIndex move;
    std::optional<chess::PieceKind> promotion;
    std::uint64_t hash_before = 0;  // zobrist of the position the mover faced
    std::optional<BucketId> bucket;
};

struct GameRecord {
    std::uint32_t game_id = 0;
    std::vector<MoveRecord> moves;
    GameResult result = GameResult::Draw;
    Termination termination = Termination::PlyCap;
};

inline MoveRecord make_move_record(std::uint32_t game_id, std::uint32_t ply,
                                   const chess::Position& before, const chess::Move& m,
                                   const ZobristTables& tables) {
    MoveRecord r;
    r.game_id = game_id;
    r.ply = ply;
    r.mover = before.side_to_move();
    r.piece = before.side_to_move() == chess::Color::White ? before.occupant_id(m.source)
                                                           : kNoPieceId;
    r.kind = before.occupant(m.source)->kind;
    r.source = m.source;
    r.target = m.target;
    r.move = move_index(m.source, m.target);
    r.promotion = m.promotion;
    r.hash_before = full_hash(before, tables);
    return r;
}

inline chess::Move record_move(const MoveRecord& r) {
    chess::Move m;
    m.source = r.source;
    m.target = r.target;
    m.promotion = r.promotion;
    return m;
}

// Replays a game from the initial position, validating each ply and the
// recorded terminal state. Returns the final position.
inline chess::Position replay_game(const GameRecord& g) {
    chess::Position pos = chess::initial_position();
    std::uint32_t expect_ply = 1;
    for (const MoveRecord& r : g.moves) {
        if (r.ply != expect_ply++)
            throw MlogFormatError("game " + std::to_string(g.game_id) + ": ply " +
                                  std::to_string(r.ply) + " out of order");
        pos = pos.apply_move(record_move(r));
    }
    chess::Status st = chess::game_status(pos);
    if (g.termination != Termination::PlyCap &&
        (st != chess::Status::Ongoing && termination_from_status(st) != g.termination))
        throw MlogFormatError("game " + std::to_string(g.game_id) +
                              ": recorded termination does not match replay");
    return pos;
}

// Provenance carried alongside records so downstream stages know which hash
// seed produced hash_before and whether buckets were already assigned.
struct DatasetMeta {
    std::uint64_t zobrist_seed = kDefaultZobristSeed;
    std::optional<std::uint32_t> num_buckets;  // set once annotated
    std::string source;                        // free-form: file name, engine pair, ...
};

struct FilterSummary {
    std::uint64_t games_in = 0;
    std::uint64_t games_kept = 0;
    std::uint64_t records_kept = 0;
};

// White moves from white-won games. Full games are retained (black plies
// included) so records can be re-hashed under a different seed and so
// evaluation can replay to the positions the records were made from.
struct FilteredDataset {
    DatasetMeta meta;
    std::vector<GameRecord> games;
    std::vector<MoveRecord> records;  // the white plies of `games`, flattened
    FilterSummary summary;
};

}  // namespace piecevec::data
