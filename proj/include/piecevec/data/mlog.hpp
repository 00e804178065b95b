#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "piecevec/data/records.hpp"
#include "piecevec/errors.hpp"

// Move-log (.mlog) file format: UTF-8, one JSON object per line.
//   line 1   {"type":"header","format":"mlog","version":1,"zobrist_seed":N,
//             "buckets":N?,"source":"..."}
//   then, per game, its move rows followed by one result trailer:
//            {"type":"move","game":G,"ply":P,"color":"w|b","piece":ID,
//             "kind":"P|N|B|R|Q|K","from":"e2","to":"e4","move":IDX,
//             "promo":"q|r|b|n"?,"hash":H,"bucket":B?}
//            {"type":"result","game":G,"result":"white|black|draw",
//             "termination":"checkmate|stalemate|repetition|fifty_move|ply_cap",
//             "plies":N}
// Rows are grouped by game with plies strictly increasing from 1.

namespace piecevec::data {

struct MlogHeader {
    std::uint32_t version = 1;
    DatasetMeta meta;
};

struct MoveLogFile {
    MlogHeader header;
    std::vector<GameRecord> games;
};

namespace detail {

inline char kind_letter(chess::PieceKind k) { return "PNBRQK"[static_cast<int>(k)]; }

inline chess::PieceKind kind_from_letter(char c, const std::string& where) {
    switch (c) {
        case 'P': return chess::PieceKind::Pawn;
        case 'N': return chess::PieceKind::Knight;
        case 'B': return chess::PieceKind::Bishop;
        case 'R': return chess::PieceKind::Rook;
        case 'Q': return chess::PieceKind::Queen;
        case 'K': return chess::PieceKind::King;
        default: throw MlogFormatError(where + ": bad piece kind '" + std::string(1, c) + "'");
    }
}

inline chess::PieceKind promo_from_letter(char c, const std::string& where) {
    switch (c) {
        case 'q': return chess::PieceKind::Queen;
        case 'r': return chess::PieceKind::Rook;
        case 'b': return chess::PieceKind::Bishop;
        case 'n': return chess::PieceKind::Knight;
        default: throw MlogFormatError(where + ": bad promotion '" + std::string(1, c) + "'");
    }
}

}  // namespace detail

inline nlohmann::json header_to_json(const MlogHeader& h) {
    nlohmann::json j{{"type", "header"},
                     {"format", "mlog"},
                     {"version", h.version},
                     {"zobrist_seed", h.meta.zobrist_seed},
                     {"source", h.meta.source}};
    if (h.meta.num_buckets) j["buckets"] = *h.meta.num_buckets;
    return j;
}

inline nlohmann::json move_to_json(const MoveRecord& r) {
    nlohmann::json j{{"type", "move"},
                     {"game", r.game_id},
                     {"ply", r.ply},
                     {"color", r.mover == chess::Color::White ? "w" : "b"},
                     {"piece", r.piece},
                     {"kind", std::string(1, detail::kind_letter(r.kind))},
                     {"from", r.source.name()},
                     {"to", r.target.name()},
                     {"move", r.move.index},
                     {"hash", r.hash_before}};
    if (r.promotion) j["promo"] = std::string(1, chess::kKindChar[static_cast<int>(*r.promotion)]);
    if (r.bucket) j["bucket"] = *r.bucket;
    return j;
}

// Streaming writer: header on construction, games appended in call order.
class MlogWriter {
public:
    MlogWriter(const std::string& path, const MlogHeader& header) : out_(path) {
        if (!out_) throw MlogFormatError("cannot open for writing: " + path);
        out_ << header_to_json(header).dump() << '\n';
    }

    void write_game(const GameRecord& g) {
        for (const MoveRecord& r : g.moves) out_ << move_to_json(r).dump() << '\n';
        nlohmann::json trailer{{"type", "result"},
                               {"game", g.game_id},
                               {"result", std::string(result_name(g.result))},
                               {"termination", std::string(termination_name(g.termination))},
                               {"plies", g.moves.size()}};
        out_ << trailer.dump() << '\n';
        ++games_written_;
    }

    void flush() { out_.flush(); }
    std::uint64_t games_written() const { return games_written_; }

private:
    std::ofstream out_;
    std::uint64_t games_written_ = 0;
};

inline void write_mlog(const std::string& path, const MlogHeader& header,
                       const std::vector<GameRecord>& games) {
    MlogWriter w(path, header);
    for (const GameRecord& g : games) w.write_game(g);
}

// Parses an .mlog file, handing each completed game to `on_game`. Keeps one
// game in memory at a time so million-row logs stream.
inline MlogHeader stream_mlog(const std::string& path,
                              const std::function<void(GameRecord&&)>& on_game) {
    std::ifstream in(path);
    if (!in) throw MlogFormatError("cannot open: " + path);

    std::string line;
    std::uint64_t line_no = 0;
    auto where = [&] { return path + ":" + std::to_string(line_no); };

    MlogHeader header;
    bool have_header = false;
    std::optional<GameRecord> game;

    auto finish_game = [&](const nlohmann::json& j) {
        std::uint32_t gid = j.at("game").get<std::uint32_t>();
        if (!game || game->game_id != gid)
            throw MlogFormatError(where() + ": result trailer for game " + std::to_string(gid) +
                                  " does not follow its moves");
        auto res = parse_result(j.at("result").get<std::string>());
        auto term = parse_termination(j.at("termination").get<std::string>());
        if (!res || !term) throw MlogFormatError(where() + ": bad result/termination");
        if (j.at("plies").get<std::uint64_t>() != game->moves.size())
            throw MlogFormatError(where() + ": trailer ply count does not match rows");
        game->result = *res;
        game->termination = *term;
        on_game(std::move(*game));
        game.reset();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MlogFormatError(where() + ": " + e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (type == "header") {
                if (have_header || line_no != 1)
                    throw MlogFormatError(where() + ": header must be the first line only");
                if (j.at("format").get<std::string>() != "mlog")
                    throw MlogFormatError(where() + ": not an mlog file");
                header.version = j.at("version").get<std::uint32_t>();
                if (header.version != 1)
                    throw MlogFormatError(where() + ": unsupported version " +
                                          std::to_string(header.version));
                header.meta.zobrist_seed = j.at("zobrist_seed").get<std::uint64_t>();
                header.meta.source = j.value("source", std::string());
                if (j.contains("buckets"))
                    header.meta.num_buckets = j.at("buckets").get<std::uint32_t>();
                have_header = true;
            } else if (type == "move") {
                if (!have_header) throw MlogFormatError(where() + ": move row before header");
                MoveRecord r;
                r.game_id = j.at("game").get<std::uint32_t>();
                r.ply = j.at("ply").get<std::uint32_t>();
                const std::string color = j.at("color").get<std::string>();
                if (color != "w" && color != "b")
                    throw MlogFormatError(where() + ": bad color '" + color + "'");
                r.mover = color == "w" ? chess::Color::White : chess::Color::Black;
                r.piece = j.at("piece").get<PieceId>();
                const std::string kind = j.at("kind").get<std::string>();
                if (kind.size() != 1) throw MlogFormatError(where() + ": bad kind");
                r.kind = detail::kind_from_letter(kind[0], where());
                auto src = chess::Square::parse(j.at("from").get<std::string>());
                auto tgt = chess::Square::parse(j.at("to").get<std::string>());
                if (!src || !tgt) throw MlogFormatError(where() + ": bad square");
                r.source = *src;
                r.target = *tgt;
                r.move = move_index(r.source, r.target);
                if (j.at("move").get<std::uint16_t>() != r.move.index)
                    throw MlogFormatError(where() + ": move index does not match squares");
                if (j.contains("promo")) {
                    const std::string promo = j.at("promo").get<std::string>();
                    if (promo.size() != 1) throw MlogFormatError(where() + ": bad promo");
                    r.promotion = detail::promo_from_letter(promo[0], where());
                }
                r.hash_before = j.at("hash").get<std::uint64_t>();
                if (j.contains("bucket")) r.bucket = j.at("bucket").get<BucketId>();

                if (game && game->game_id != r.game_id)
                    throw MlogFormatError(where() + ": game " + std::to_string(game->game_id) +
                                          " has no result trailer");
                if (!game) {
                    game.emplace();
                    game->game_id = r.game_id;
                }
                if (r.ply != game->moves.size() + 1)
                    throw MlogFormatError(where() + ": expected ply " +
                                          std::to_string(game->moves.size() + 1) + ", got " +
                                          std::to_string(r.ply));
                game->moves.push_back(r);
            } else if (type == "result") {
                if (!have_header) throw MlogFormatError(where() + ": trailer before header");
                finish_game(j);
            } else {
                throw MlogFormatError(where() + ": unknown row type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw MlogFormatError(where() + ": " + e.what());
        }
    }
    if (!have_header) throw MlogFormatError(path + ": empty file, missing header");
    if (game)
        throw MlogFormatError(path + ": game " + std::to_string(game->game_id) +
                              " missing result trailer at end of file");
    return header;
}

inline MoveLogFile read_mlog(const std::string& path) {
    MoveLogFile file;
    file.header = stream_mlog(path, [&](GameRecord&& g) { file.games.push_back(std::move(g)); });
    return file;
}

}  // namespace piecevec::data
