#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "piecevec/chess/move.hpp"
#include "piecevec/engine/engine.hpp"
#include "piecevec/engine/process.hpp"
#include "piecevec/engine/random_mover.hpp"

namespace piecevec::engine {

// UCI client over a child process. Handshake runs in the constructor;
// best_move() drives one "go"/"bestmove" exchange with the configured limit.
class UciSession final : public Engine {
  public:
    explicit UciSession(const EngineConfig& cfg)
        : cfg_(cfg), proc_(cfg.executable, cfg.args) {
        proc_.write_line("uci");
        read_until("uciok", cfg_.handshake_timeout_ms, [&](const std::string& line) {
            // remember declared options so we only set knobs that exist
            if (line.rfind("option name ", 0) == 0) declared_options_.push_back(line);
        });
        for (const auto& [name, value] : cfg_.options)
            proc_.write_line("setoption name " + name + " value " + value);
        sync();
        go_cmd_ = cfg_.movetime_ms ? "go movetime " + std::to_string(*cfg_.movetime_ms)
                                   : "go depth " + std::to_string(*cfg_.depth);
    }

    ~UciSession() override { close(); }

    void start_game(std::uint64_t game_seed) override {
        proc_.write_line("ucinewgame");
        if (declares_option("Seed"))
            proc_.write_line("setoption name Seed value " + std::to_string(game_seed));
        sync();
    }

    void set_position(const std::string& start,
                      const std::vector<std::string>& moves_uci) override {
        std::string cmd =
            start == "startpos" ? "position startpos" : "position fen " + start;
        if (!moves_uci.empty()) {
            cmd += " moves";
            for (const std::string& m : moves_uci) cmd += " " + m;
        }
        proc_.write_line(cmd);
    }

    chess::Move best_move() override {
        proc_.write_line(go_cmd_);
        std::string reply;
        read_until("bestmove", cfg_.response_timeout_ms,
                   [](const std::string&) {},  // info lines etc. are skipped
                   &reply);
        // "bestmove e2e4 [ponder ...]"
        std::string token = reply.substr(std::string("bestmove").size());
        const auto b = token.find_first_not_of(" \t");
        if (b == std::string::npos) throw EngineProtocolError("empty bestmove reply");
        token = token.substr(b, token.find_first_of(" \t", b) - b);
        if (token == "(none)")
            throw EngineProtocolError("engine reported no legal move (bestmove (none))");
        auto m = chess::parse_uci_squares(token);
        if (!m) throw EngineProtocolError("unparsable bestmove '" + token + "'");
        return *m;
    }

    void close() override {
        if (closed_) return;
        closed_ = true;
        try {
            proc_.write_line("quit");
        } catch (const ProcessError&) {
            // already gone; ChildProcess::close escalates regardless
        }
        proc_.close();
    }

  private:
    bool declares_option(const std::string& name) const {
        const std::string needle = "option name " + name + " ";
        for (const std::string& line : declared_options_)
            if (line.rfind(needle, 0) == 0) return true;
        return false;
    }

    void sync() {
        proc_.write_line("isready");
        read_until("readyok", cfg_.response_timeout_ms, [](const std::string&) {});
    }

    // Reads lines until one starts with `prefix`, under one overall deadline
    // (a chatty engine cannot stretch the wait by emitting other lines).
    template <typename OnLine>
    void read_until(const std::string& prefix, int timeout_ms, OnLine on_line,
                    std::string* matched = nullptr) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        for (;;) {
            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       deadline - std::chrono::steady_clock::now())
                                       .count();
            if (remaining <= 0)
                throw EngineTimeout("engine did not send '" + prefix + "' within " +
                                    std::to_string(timeout_ms) + " ms");
            auto line = proc_.read_line(static_cast<int>(remaining));
            if (!line)
                throw EngineTimeout("engine did not send '" + prefix + "' within " +
                                    std::to_string(timeout_ms) + " ms");
            if (line->rfind(prefix, 0) == 0) {
                if (matched) *matched = *line;
                return;
            }
            on_line(*line);
        }
    }

    EngineConfig cfg_;
    ChildProcess proc_;
    std::vector<std::string> declared_options_;
    std::string go_cmd_;
    bool closed_ = false;
};

inline std::unique_ptr<Engine> make_engine(const EngineConfig& cfg) {
    validate_config(cfg);
    if (cfg.is_builtin()) {
        if (cfg.executable != "builtin:random")
            throw InvalidEngineConfig("unknown builtin engine: " + cfg.executable);
        return std::make_unique<RandomMover>();
    }
    return std::make_unique<UciSession>(cfg);
}

}  // namespace piecevec::engine
