// Standalone UCI engine: uniform-random legal mover, deterministic under a
// "Seed" string option. The fault-injection flags exist for driver tests
// (illegal replies, missing bestmove, slow/broken handshakes).

#include <chrono>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/engine/random_mover.hpp"

namespace pc = piecevec::chess;

int main(int argc, char** argv) {
    CLI::App app{"uniform-random UCI engine"};
    long long illegal_after = -1;
    long long none_after = -1;
    int sleep_ms = 0;
    bool no_uciok = false;
    app.add_option("--illegal-after", illegal_after,
                   "reply 'bestmove a1a1' once N good replies were sent");
    app.add_option("--none-after", none_after,
                   "reply 'bestmove (none)' once N good replies were sent");
    app.add_option("--sleep-ms", sleep_ms, "delay before every bestmove");
    app.add_flag("--no-uciok", no_uciok, "omit uciok from the handshake");
    CLI11_PARSE(app, argc, argv);

    std::uint64_t seed = 0;
    pc::Position pos = pc::initial_position();
    long long answered = 0;

    std::string line;
    while (std::getline(std::cin, line)) {
        std::istringstream ss(line);
        std::string cmd;
        ss >> cmd;
        if (cmd == "uci") {
            std::cout << "id name pv-random-engine\n"
                      << "id author piecevec\n"
                      << "option name Seed type string default 0\n";
            if (!no_uciok) std::cout << "uciok\n";
            std::cout.flush();
        } else if (cmd == "isready") {
            std::cout << "readyok\n";
            std::cout.flush();
        } else if (cmd == "setoption") {
            const auto npos = line.find(" name ");
            const auto vpos = line.find(" value ");
            if (npos != std::string::npos && vpos != std::string::npos && vpos > npos) {
                const std::string name = line.substr(npos + 6, vpos - (npos + 6));
                if (name == "Seed") seed = std::stoull(line.substr(vpos + 7));
            }
        } else if (cmd == "ucinewgame") {
            pos = pc::initial_position();
        } else if (cmd == "position") {
            std::string tok;
            ss >> tok;
            if (tok == "startpos") {
                pos = pc::initial_position();
                ss >> tok;
            } else if (tok == "fen") {
                std::string fen, part;
                for (int i = 0; i < 6 && ss >> part; ++i) {
                    if (!fen.empty()) fen += ' ';
                    fen += part;
                }
                pos = pc::Position::from_fen(fen);
                ss >> tok;
            }
            if (tok == "moves") {
                std::string mv;
                while (ss >> mv) {
                    auto m = pos.move_from_uci(mv);
                    if (!m) return 1;
                    pos = pos.apply_move(*m);
                }
            }
        } else if (cmd == "go") {
            if (sleep_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
            if (none_after >= 0 && answered >= none_after) {
                std::cout << "bestmove (none)\n";
                std::cout.flush();
                continue;
            }
            if (illegal_after >= 0 && answered >= illegal_after) {
                std::cout << "bestmove a1a1\n";  // source == target: never legal
                std::cout.flush();
                continue;
            }
            const auto legal = pc::legal_moves(pos);
            if (legal.empty()) {
                std::cout << "bestmove (none)\n";
                std::cout.flush();
                continue;
            }
            const auto& m =
                legal[piecevec::engine::deterministic_choice(seed, pos.key(), legal.size())];
            std::cout << "info depth 1\n";  // drivers must skip non-bestmove lines
            std::cout << "bestmove " << m.uci() << "\n";
            std::cout.flush();
            ++answered;
        } else if (cmd == "quit") {
            return 0;
        }
        // anything else is ignored, as UCI engines customarily do
    }
    return 0;
}
