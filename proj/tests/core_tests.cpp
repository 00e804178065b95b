#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/chess/san.hpp"
#include "piecevec/util/rng.hpp"

using namespace piecevec;
using namespace piecevec::chess;

namespace {

Square sq(const char* name) { return *Square::parse(name); }

Move uci(const Position& pos, const char* text) {
    auto m = pos.move_from_uci(text);
    REQUIRE(m.has_value());
    return *m;
}

}  // namespace

TEST_CASE("square encoding is rank-major from a1") {
    CHECK(sq("a1").index == 0);
    CHECK(sq("b1").index == 1);
    CHECK(sq("h1").index == 7);
    CHECK(sq("a2").index == 8);
    CHECK(sq("h8").index == 63);
    CHECK(sq("e2").index == 12);
    CHECK(sq("e4").index == 28);
    CHECK(Square(12).name() == "e2");
    CHECK_FALSE(Square::parse("i1").has_value());
    CHECK_FALSE(Square::parse("a9").has_value());
}

TEST_CASE("move index round trip covers all 4096 pairs") {
    CHECK(move_index(sq("e2"), sq("e4")).index == 796);
    CHECK(move_index(sq("a1"), sq("a1")).index == 0);
    auto [s63, t63] = decode_move_index(MoveIndex(4095));
    CHECK(s63 == sq("h8"));
    CHECK(t63 == sq("h8"));
    for (int i = 0; i < kMoveIndexCount; ++i) {
        auto [s, t] = decode_move_index(MoveIndex(i));
        CHECK(move_index(s, t).index == i);
    }
}

TEST_CASE("initial position has the fixed identity mapping") {
    Position pos = Position::initial();
    auto a1 = pos.occupant(sq("a1"));
    REQUIRE(a1.has_value());
    CHECK(a1->kind == PieceKind::Rook);
    CHECK(a1->color == Color::White);
    CHECK(pos.occupant_id(sq("a1")) == 1);
    CHECK(pos.occupant_id(sq("b1")) == 2);
    CHECK(pos.occupant_id(sq("c1")) == 3);
    CHECK(pos.occupant_id(sq("d1")) == 4);
    CHECK(pos.occupant_id(sq("e1")) == 5);
    CHECK(pos.occupant_id(sq("f1")) == 6);
    CHECK(pos.occupant_id(sq("g1")) == 7);
    CHECK(pos.occupant_id(sq("h1")) == 8);
    for (int f = 0; f < 8; ++f)
        CHECK(pos.occupant_id(Square::from_file_rank(f, 1)) == 9 + f);

    CHECK_FALSE(pos.occupant(sq("e4")).has_value());
    CHECK(pos.occupant_id(sq("e4")) == kNoPieceId);
    CHECK(pos.side_to_move() == Color::White);
    CHECK_FALSE(pos.en_passant_square().has_value());
    CHECK(pos.fen() == "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

TEST_CASE("occupant_piece maps black and empty squares to piece 0") {
    Position pos = Position::initial();
    CHECK(occupant_piece(pos, sq("d1")) == 4);
    CHECK(occupant_piece(pos, sq("d8")) == 0);
    CHECK(occupant_piece(pos, sq("e5")) == 0);
}

TEST_CASE("legal move counts and apply_move basics") {
    Position pos = Position::initial();
    CHECK(legal_moves(pos).size() == 20);

    Position after = pos.apply_move(uci(pos, "e2e4"));
    auto e4 = after.occupant(sq("e4"));
    REQUIRE(e4.has_value());
    CHECK(e4->kind == PieceKind::Pawn);
    CHECK(after.occupant_id(sq("e4")) == 13);
    CHECK(after.side_to_move() == Color::Black);
    REQUIRE(after.en_passant_square().has_value() == false);  // no black pawn can capture e3

    CHECK_THROWS_AS(pos.apply_move(uci(pos, "e2e5")), IllegalMove);
}

TEST_CASE("en passant square only recorded when capturable") {
    // black pawn on d4 can take e3 after e2e4
    Position pos = Position::from_fen("rnbqkbnr/ppp1pppp/8/8/3p4/8/PPPPPPPP/RNBQKBNR w KQkq - 0 2");
    Position after = pos.apply_move(uci(pos, "e2e4"));
    REQUIRE(after.en_passant_square().has_value());
    CHECK(*after.en_passant_square() == sq("e3"));
    auto moves = legal_moves(after);
    bool has_ep = false;
    for (const auto& m : moves)
        if (m.flag == MoveFlag::EnPassant && m.target == sq("e3")) has_ep = true;
    CHECK(has_ep);
}

TEST_CASE("promotion keeps the pawn's identity") {
    Position pos = Position::from_fen("8/P7/8/8/8/4k3/8/4K3 w - - 0 1");
    // a7 pawn gets id 9 (first pawn pool slot) on FEN load
    CHECK(pos.occupant_id(sq("a7")) == 9);
    Position after = pos.apply_move(uci(pos, "a7a8q"));
    auto a8 = after.occupant(sq("a8"));
    REQUIRE(a8.has_value());
    CHECK(a8->kind == PieceKind::Queen);
    CHECK(after.occupant_id(sq("a8")) == 9);
}

TEST_CASE("castling moves king and rook with identities") {
    Position pos = Position::initial();
    for (const char* mv : {"g1f3", "g8f6", "e2e4", "e7e5", "f1c4", "f8c5"})
        pos = pos.apply_move(uci(pos, mv));
    auto moves = legal_moves(pos);
    bool has_castle = false;
    for (const auto& m : moves)
        if (m.flag == MoveFlag::Castle && m.target == sq("g1")) has_castle = true;
    REQUIRE(has_castle);

    Position after = pos.apply_move(uci(pos, "e1g1"));
    CHECK(after.occupant_id(sq("g1")) == 5);
    CHECK(after.occupant_id(sq("f1")) == 8);
    auto f1 = after.occupant(sq("f1"));
    REQUIRE(f1.has_value());
    CHECK(f1->kind == PieceKind::Rook);
    CHECK_FALSE(after.occupant(sq("h1")).has_value());
    CHECK_FALSE(static_cast<bool>(after.castling_rights() & kWhiteKingside));
    CHECK_FALSE(static_cast<bool>(after.castling_rights() & kWhiteQueenside));
}

TEST_CASE("captured identities are retired") {
    Position pos = Position::initial();
    for (const char* mv : {"e2e4", "d7d5", "e4d5"})
        pos = pos.apply_move(uci(pos, mv));
    CHECK(pos.occupant_id(sq("d5")) == 13);  // e-pawn went to d5
    // capture the white pawn; id 13 disappears
    pos = pos.apply_move(uci(pos, "d8d5"));
    CHECK(pos.occupant_id(sq("d5")) == 0);
    CHECK_FALSE(static_cast<bool>(pos.white_presence_mask() & (1u << 12)));
}

TEST_CASE("fool's mate is checkmate") {
    Position pos = Position::initial();
    for (const char* mv : {"f2f3", "e7e5", "g2g4", "d8h4"})
        pos = pos.apply_move(uci(pos, mv));
    CHECK(legal_moves(pos).empty());
    CHECK(pos.in_check());
    CHECK(game_status(pos) == Status::Checkmate);
}

TEST_CASE("stalemate is detected") {
    Position pos = Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1");
    CHECK(legal_moves(pos).empty());
    CHECK_FALSE(pos.in_check());
    CHECK(game_status(pos) == Status::Stalemate);
}

TEST_CASE("threefold repetition via knight shuffles") {
    Position pos = Position::initial();
    const char* shuffle[] = {"g1f3", "g8f6", "f3g1", "f6g8"};
    CHECK(game_status(pos) == Status::Ongoing);
    for (int round = 0; round < 2; ++round)
        for (const char* mv : shuffle) pos = pos.apply_move(uci(pos, mv));
    // start position has now occurred three times
    CHECK(game_status(pos) == Status::DrawRepetition);
}

TEST_CASE("fifty-move rule triggers at halfmove 100") {
    Position pos = Position::from_fen("4k3/8/8/8/8/8/8/4K2R w - - 99 80");
    CHECK(game_status(pos) == Status::Ongoing);
    Position after = pos.apply_move(uci(pos, "h1h2"));
    CHECK(after.halfmove_clock() == 100);
    CHECK(game_status(after) == Status::Draw50Move);
}

TEST_CASE("perft matches published reference values") {
    struct Case {
        const char* fen;
        std::vector<std::uint64_t> counts;  // depth 1..n
    };
    const Case cases[] = {
        {"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", {20, 400, 8902, 197281}},
        {"r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
         {48, 2039, 97862}},
        {"8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", {14, 191, 2812, 43238}},
        {"r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1", {6, 264, 9467}},
        {"rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", {44, 1486, 62379}},
        {"r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
         {46, 2079, 89890}},
    };
    for (const auto& c : cases) {
        Position pos = Position::from_fen(c.fen);
        for (std::size_t d = 0; d < c.counts.size(); ++d) {
            INFO(c.fen << " depth " << d + 1);
            CHECK(perft(pos, static_cast<int>(d + 1)) == c.counts[d]);
        }
    }
}

TEST_CASE("fen round trip") {
    const char* fens[] = {
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
        "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
        "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R b KQ - 3 9",
    };
    for (const char* f : fens) CHECK(Position::from_fen(f).fen() == f);
}

TEST_CASE("fen rejects invalid inputs") {
    CHECK_THROWS_AS(Position::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"), InvalidFen);  // no kings
    CHECK_THROWS_AS(Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBN w KQkq - 0 1"),
                    InvalidFen);
    CHECK_THROWS_AS(Position::from_fen("P3k3/8/8/8/8/8/8/4K3 w - - 0 1"), InvalidFen);  // pawn rank 8
    CHECK_THROWS_AS(Position::from_fen("4k3/8/8/8/8/8/8/4K3 x - - 0 1"), InvalidFen);
}

TEST_CASE("bitboard planes stay consistent with occupancy over playouts") {
    Rng rng(12345);
    Position pos = Position::initial();
    for (int ply = 0; ply < 300; ++ply) {
        auto moves = legal_moves(pos);
        if (moves.empty() || game_status(pos) != Status::Ongoing) {
            pos = Position::initial();
            continue;
        }
        pos.do_move(moves[static_cast<std::size_t>(rng.next_below(moves.size()))]);

        Bitboard seen = 0;
        for (int p = 0; p < 12; ++p) {
            CHECK((seen & pos.board().plane(p)) == 0);  // planes disjoint
            seen |= pos.board().plane(p);
        }
        CHECK(seen == pos.board().occupied());
        for (int s = 0; s < 64; ++s) {
            auto piece = pos.occupant(Square(s));
            if (piece)
                CHECK(static_cast<bool>(pos.board().pieces(piece->kind, piece->color) &
                                        bb(Square(s))));
        }
    }
}

TEST_CASE("status matches legal_moves/in_check definitions on random positions") {
    Rng rng(777);
    for (int game = 0; game < 12; ++game) {
        Position pos = Position::initial();
        for (int ply = 0; ply < 250; ++ply) {
            auto moves = legal_moves(pos);
            Status st = game_status(pos);
            if (moves.empty()) {
                CHECK((st == Status::Checkmate || st == Status::Stalemate));
                CHECK((st == Status::Checkmate) == pos.in_check());
                break;
            }
            if (st != Status::Ongoing) break;
            pos.do_move(moves[static_cast<std::size_t>(rng.next_below(moves.size()))]);
        }
    }
}

TEST_CASE("san parsing resolves disambiguation and castling") {
    Position pos = Position::initial();
    Move m = parse_san(pos, "e4");
    CHECK(m.uci() == "e2e4");
    pos = pos.apply_move(m);
    pos = pos.apply_move(parse_san(pos, "e5"));
    pos = pos.apply_move(parse_san(pos, "Nf3"));
    pos = pos.apply_move(parse_san(pos, "Nc6"));
    pos = pos.apply_move(parse_san(pos, "Bc4"));
    pos = pos.apply_move(parse_san(pos, "Nf6"));
    Move castle = parse_san(pos, "O-O");
    CHECK(castle.flag == MoveFlag::Castle);
    CHECK(castle.uci() == "e1g1");

    // two pawns can capture on d5; file disambiguator picks one
    Position caps = Position::from_fen("4k3/8/8/3p4/2P1P3/8/8/4K3 w - - 0 1");
    Move exd5 = parse_san(caps, "exd5");
    CHECK(exd5.source == sq("e4"));
    CHECK(exd5.is_capture());
    Move cxd5 = parse_san(caps, "cxd5");
    CHECK(cxd5.source == sq("c4"));

    // knight disambiguation by file
    Position knights = Position::from_fen("4k3/8/8/8/8/8/8/N3K2N w - - 0 1");
    CHECK(parse_san(knights, "Nab3").source == sq("a1"));
    CHECK_THROWS_AS(parse_san(knights, "Nb3xx"), IllegalSanMove);
    CHECK_THROWS_AS(parse_san(knights, "Nd4"), IllegalSanMove);  // no knight reaches d4
}

TEST_CASE("promotion san and uci strings") {
    Position pos = Position::from_fen("8/P7/8/8/8/4k3/8/4K3 w - - 0 1");
    Move m = parse_san(pos, "a8=Q+");
    CHECK(m.uci() == "a7a8q");
    auto moves = legal_moves(pos);
    int promos = 0;
    for (const auto& mv : moves)
        if (mv.promotion) ++promos;
    CHECK(promos == 4);  // queen, rook, bishop, knight
}
