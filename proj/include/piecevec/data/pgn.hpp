#pragma once

#include <cctype>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "piecevec/chess/san.hpp"
#include "piecevec/data/records.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/util/text.hpp"

// Mainline-only PGN reader: tag pairs, SAN movetext, result token. Comments
// {...}, variations (...) and NAGs $n are tolerated and skipped. Enough to
// feed public corpora through the pipeline; not a full PGN implementation.

namespace piecevec::data {

namespace detail {

struct PgnToken {
    std::string text;
    std::uint64_t line = 0;
};

// Movetext tokenizer. Strips comments/variations/NAGs, keeps SAN tokens,
// move numbers and result markers.
inline std::vector<PgnToken> tokenize_movetext(const std::string& text, std::uint64_t first_line) {
    std::vector<PgnToken> out;
    std::uint64_t line = first_line;
    int paren_depth = 0;
    bool in_comment = false;
    std::string cur;
    std::uint64_t cur_line = line;

    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back({cur, cur_line});
            cur.clear();
        }
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') ++line;
        if (in_comment) {
            if (c == '}') in_comment = false;
            continue;
        }
        if (c == '{') {
            flush();
            in_comment = true;
            continue;
        }
        if (c == '(') {
            flush();
            ++paren_depth;
            continue;
        }
        if (c == ')') {
            if (paren_depth == 0) throw PgnSyntaxError("unbalanced ')'", line);
            --paren_depth;
            continue;
        }
        if (paren_depth > 0) continue;
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (cur.empty()) cur_line = line;
        cur += c;
    }
    if (in_comment) throw PgnSyntaxError("unterminated comment", line);
    if (paren_depth != 0) throw PgnSyntaxError("unterminated variation", line);
    flush();
    return out;
}

inline bool is_move_number(const std::string& t) {
    std::size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0) return false;
    while (i < t.size() && t[i] == '.') ++i;
    return i == t.size();
}

inline bool is_nag(const std::string& t) { return t.size() >= 2 && t[0] == '$'; }

}  // namespace detail

// Parses concatenated PGN games. Each game must end with a result token
// (1-0, 0-1, 1/2-1/2 or *); '*'-terminated (unfinished) games are kept with
// result = draw so the white-win filter drops them. SAN is resolved through
// full legality; an unresolvable move aborts the parse with game id and ply.
inline std::vector<GameRecord> parse_pgn(std::istream& in,
                                         std::uint64_t zobrist_seed = kDefaultZobristSeed,
                                         std::uint32_t first_game_id = 0) {
    const ZobristTables tables = init_tables(zobrist_seed);
    std::vector<GameRecord> games;

    std::string line;
    std::uint64_t line_no = 0;
    std::uint32_t game_id = first_game_id;
    std::string movetext;
    std::uint64_t movetext_line = 0;
    std::string result_tag;  // from [Result "..."] if present
    bool in_game = false;

    auto finish_game = [&] {
        if (!in_game) return;
        auto tokens = detail::tokenize_movetext(movetext, movetext_line);
        GameRecord g;
        g.game_id = game_id++;
        chess::Position pos = chess::initial_position();
        std::string end_token;
        for (const auto& tok : tokens) {
            if (detail::is_move_number(tok.text) || detail::is_nag(tok.text)) continue;
            if (tok.text == "1-0" || tok.text == "0-1" || tok.text == "1/2-1/2" ||
                tok.text == "*") {
                end_token = tok.text;
                break;
            }
            chess::Move m;
            try {
                m = chess::parse_san(pos, tok.text);
            } catch (const IllegalSanMove& e) {
                throw IllegalSanMove("game " + std::to_string(g.game_id) + " ply " +
                                     std::to_string(g.moves.size() + 1) + " (line " +
                                     std::to_string(tok.line) + "): " + e.what());
            }
            g.moves.push_back(make_move_record(g.game_id,
                                               static_cast<std::uint32_t>(g.moves.size() + 1),
                                               pos, m, tables));
            pos = pos.apply_move(m);
        }
        if (end_token.empty())
            throw PgnSyntaxError("game " + std::to_string(g.game_id) + " has no result token",
                                 line_no);
        if (!result_tag.empty() && result_tag != end_token && end_token != "*")
            throw PgnSyntaxError("game " + std::to_string(g.game_id) +
                                     ": Result tag disagrees with movetext result",
                                 line_no);

        if (end_token == "1-0") g.result = GameResult::WhiteWin;
        else if (end_token == "0-1") g.result = GameResult::BlackWin;
        else g.result = GameResult::Draw;

        chess::Status st = chess::game_status(pos);
        g.termination = st == chess::Status::Ongoing ? Termination::PlyCap
                                                     : termination_from_status(st);
        games.push_back(std::move(g));
        movetext.clear();
        result_tag.clear();
        in_game = false;
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed{trim(line)};
        if (trimmed.empty()) continue;
        if (trimmed[0] == '[' && movetext.empty()) {
            // games finish eagerly at their result token, so a tag line here
            // always belongs to the next game
            in_game = true;
            std::size_t close = trimmed.rfind(']');
            if (close == std::string::npos) throw PgnSyntaxError("unterminated tag pair", line_no);
            std::string inner{trim(trimmed.substr(1, close - 1))};
            if (inner.rfind("Result", 0) == 0) {
                std::size_t q1 = inner.find('"');
                std::size_t q2 = inner.rfind('"');
                if (q1 == std::string::npos || q2 <= q1)
                    throw PgnSyntaxError("malformed Result tag", line_no);
                result_tag = inner.substr(q1 + 1, q2 - q1 - 1);
            }
            continue;
        }
        // movetext (may span lines until the result token)
        if (!in_game) {
            in_game = true;  // tagless game
        }
        if (movetext.empty()) movetext_line = line_no;
        movetext += line;
        movetext += '\n';
        // a result token ends the game; detect it so concatenated games split
        auto tokens = detail::tokenize_movetext(movetext, movetext_line);
        if (!tokens.empty()) {
            const std::string& last = tokens.back().text;
            if (last == "1-0" || last == "0-1" || last == "1/2-1/2" || last == "*") finish_game();
        }
    }
    finish_game();
    return games;
}

inline std::vector<GameRecord> parse_pgn(const std::string& text,
                                         std::uint64_t zobrist_seed = kDefaultZobristSeed,
                                         std::uint32_t first_game_id = 0) {
    std::istringstream in(text);
    return parse_pgn(in, zobrist_seed, first_game_id);
}

}  // namespace piecevec::data
