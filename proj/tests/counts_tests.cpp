#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "piecevec/counts.hpp"
#include "piecevec/data/ingest.hpp"
#include "piecevec/util/rng.hpp"

using namespace piecevec;
using namespace piecevec::counts;
using piecevec::data::FilteredDataset;
using piecevec::data::GameRecord;
using piecevec::data::MoveRecord;

namespace {

MoveRecord rec(std::uint32_t game, std::uint32_t ply, PieceId piece, chess::PieceKind kind,
               const char* from, const char* to, std::uint64_t hash) {
    MoveRecord r;
    r.game_id = game;
    r.ply = ply;
    r.mover = chess::Color::White;
    r.piece = piece;
    r.kind = kind;
    r.source = *chess::Square::parse(from);
    r.target = *chess::Square::parse(to);
    r.move = move_index(r.source, r.target);
    r.hash_before = hash;
    return r;
}

FilteredDataset tiny_dataset() {
    // pawn id13 plays e2e4 twice, knight id7 plays g1f3 once
    FilteredDataset ds;
    GameRecord g;
    g.game_id = 0;
    g.result = data::GameResult::WhiteWin;
    g.moves = {rec(0, 1, 13, chess::PieceKind::Pawn, "e2", "e4", 111),
               rec(0, 3, 7, chess::PieceKind::Knight, "g1", "f3", 222),
               rec(1, 1, 13, chess::PieceKind::Pawn, "e2", "e4", 111)};
    ds.games = {g};
    ds.records = g.moves;
    return ds;
}

FilteredDataset playout_dataset(int games, std::uint64_t seed, std::uint32_t buckets) {
    Rng rng(seed);
    std::vector<GameRecord> out;
    for (int id = 0; id < games; ++id) {
        GameRecord g;
        g.game_id = static_cast<std::uint32_t>(id);
        chess::Position pos = chess::initial_position();
        chess::Status st = chess::Status::Ongoing;
        int ply = 0;
        while (st == chess::Status::Ongoing && ply < 400) {
            auto moves = chess::legal_moves(pos);
            chess::Move m = moves[static_cast<std::size_t>(rng.next_below(moves.size()))];
            g.moves.push_back(data::make_move_record(
                g.game_id, static_cast<std::uint32_t>(++ply), pos, m, default_tables()));
            pos = pos.apply_move(m);
            st = chess::game_status(pos);
        }
        g.result = st == chess::Status::Ongoing ? data::GameResult::Draw
                                                : data::result_from_status(st, pos.side_to_move());
        g.termination = data::termination_from_status(st);
        out.push_back(std::move(g));
    }
    return data::annotate_buckets(data::filter_white_wins(std::move(out)), default_tables(),
                                  buckets);
}

}  // namespace

TEST_CASE("per-piece counting matches hand tally") {
    CountMatrix m = build_count_matrix(tiny_dataset(), RowScheme::PerPiece);
    CHECK(m.n() == 16);
    CHECK(m.p() == 4096);
    CHECK(m.total_count() == 3);
    const std::size_t row13 = row_index(RowKey{RowScheme::PerPiece, {}, 13, {}}, 1);
    const std::size_t row7 = row_index(RowKey{RowScheme::PerPiece, {}, 7, {}}, 1);
    CHECK(m.entry(row13, MoveIndex(796)) == 2);  // e2e4
    CHECK(m.entry(row7, move_index(*chess::Square::parse("g1"), *chess::Square::parse("f3"))) ==
          1);
    CHECK(m.nonzeros() == 2);
    CHECK(m.row_key(row13).piece == 13);
}

TEST_CASE("per-type counting folds identities into kinds") {
    CountMatrix m = build_count_matrix(tiny_dataset(), RowScheme::PerType);
    CHECK(m.n() == 6);
    CHECK(m.total_count() == 3);
    CHECK(m.entry(static_cast<std::size_t>(chess::PieceKind::Pawn), MoveIndex(796)) == 2);
    CHECK(m.entry(static_cast<std::size_t>(chess::PieceKind::Knight),
                  move_index(*chess::Square::parse("g1"), *chess::Square::parse("f3"))) == 1);
}

TEST_CASE("empty dataset gives a zero matrix") {
    FilteredDataset empty;
    CountMatrix m = build_count_matrix(empty, RowScheme::PerPiece);
    CHECK(m.total_count() == 0);
    CHECK(m.nonzeros() == 0);
}

TEST_CASE("piece-bucket scheme requires annotation") {
    FilteredDataset ds = tiny_dataset();  // no bucket metadata
    CHECK_THROWS_AS(build_count_matrix(ds, RowScheme::PieceBucket), MissingBucketAnnotation);

    // metadata present but a record missing its bucket
    ds.meta.num_buckets = 16;
    CHECK_THROWS_AS(build_count_matrix(ds, RowScheme::PieceBucket), MissingBucketAnnotation);
}

TEST_CASE("row index layout is piece-major, bucket-minor") {
    const std::uint32_t B = 16;
    CHECK(row_count(RowScheme::PieceBucket, B) == 256);
    RowKey k{RowScheme::PieceBucket, {}, 1, BucketId{0}};
    CHECK(row_index(k, B) == 0);
    k.bucket = 15;
    CHECK(row_index(k, B) == 15);
    k.piece = 2;
    k.bucket = 0;
    CHECK(row_index(k, B) == 16);
    k.piece = 16;
    k.bucket = 15;
    CHECK(row_index(k, B) == 255);
    for (std::size_t row = 0; row < 256; ++row)
        CHECK(row_index(key_for_row(row, RowScheme::PieceBucket, B), B) == row);
}

TEST_CASE("conservation across schemes and bucket collapse") {
    FilteredDataset ds = playout_dataset(120, 5, 16);
    REQUIRE(ds.records.size() > 100);

    CountMatrix per_type = build_count_matrix(ds, RowScheme::PerType);
    CountMatrix per_piece = build_count_matrix(ds, RowScheme::PerPiece);
    CountMatrix pb = build_count_matrix(ds, RowScheme::PieceBucket);

    CHECK(per_type.total_count() == ds.records.size());
    CHECK(per_piece.total_count() == ds.records.size());
    CHECK(pb.total_count() == ds.records.size());
    CHECK(pb.n() == 16 * 16);

    // summing piece-bucket rows over buckets reproduces per-piece exactly
    for (PieceId piece = 1; piece <= 16; ++piece) {
        std::map<std::uint16_t, std::uint32_t> collapsed;
        for (BucketId b = 0; b < 16; ++b) {
            const auto& row = pb.row(row_index(RowKey{RowScheme::PieceBucket, {}, piece, b}, 16));
            for (const auto& [j, c] : row) collapsed[j] += c;
        }
        CHECK(collapsed ==
              per_piece.row(row_index(RowKey{RowScheme::PerPiece, {}, piece, {}}, 1)));
    }
}

TEST_CASE("row normalization: nonzero rows sum to one, zero rows stay zero") {
    FilteredDataset ds = playout_dataset(80, 17, 4);
    CountMatrix m = build_count_matrix(ds, RowScheme::PieceBucket);
    SparseMatrix norm = row_normalize(m);

    int nonzero_rows = 0, zero_rows = 0;
    for (int i = 0; i < norm.outerSize(); ++i) {
        double total = 0;
        for (SparseMatrix::InnerIterator it(norm, i); it; ++it) total += it.value();
        if (m.row(static_cast<std::size_t>(i)).empty()) {
            ++zero_rows;
            CHECK(total == 0.0);
        } else {
            ++nonzero_rows;
            CHECK(std::abs(total - 1.0) < 1e-12);
        }
    }
    CHECK(nonzero_rows > 0);
    CHECK(nonzero_rows + zero_rows == static_cast<int>(m.n()));
}

TEST_CASE("hand normalization example") {
    FilteredDataset ds;
    GameRecord g;
    g.result = data::GameResult::WhiteWin;
    g.moves = {rec(0, 1, 13, chess::PieceKind::Pawn, "e2", "e4", 1),
               rec(0, 3, 13, chess::PieceKind::Pawn, "e2", "e4", 2),
               rec(0, 5, 13, chess::PieceKind::Pawn, "e2", "e3", 3),
               rec(0, 7, 13, chess::PieceKind::Pawn, "e2", "e3", 4)};
    ds.games = {g};
    ds.records = g.moves;
    CountMatrix m = build_count_matrix(ds, RowScheme::PerPiece);
    Eigen::MatrixXd d = dense(row_normalize(m));
    CHECK(d(12, 796) == 0.5);  // row for id13
    CHECK(d(12, move_index(*chess::Square::parse("e2"), *chess::Square::parse("e3")).index) ==
          0.5);
    CHECK(d.row(12).sum() == 1.0);
}

TEST_CASE("column standardization matches hand values and masks constants") {
    Eigen::MatrixXd m(2, 3);
    // col 0: [1,3] -> mean 2, population std 1 -> [-1,1]
    // col 1: constant 5 -> masked, zeroed
    // col 2: [0,4] -> mean 2, std 2 -> [-1,1]
    m << 1, 5, 0, 3, 5, 4;
    auto [z, params] = standardize_columns(m);
    CHECK(z(0, 0) == -1.0);
    CHECK(z(1, 0) == 1.0);
    CHECK(z(0, 1) == 0.0);
    CHECK(z(1, 1) == 0.0);
    CHECK(z(0, 2) == -1.0);
    CHECK(z(1, 2) == 1.0);
    CHECK(params.column_means[0] == 2.0);
    CHECK(params.column_means[1] == 5.0);
    CHECK(params.column_stds[0] == 1.0);
    CHECK(params.column_stds[1] == 0.0);
    CHECK(params.column_stds[2] == 2.0);
    REQUIRE(params.zero_variance_mask.size() == 3);
    CHECK_FALSE(params.zero_variance_mask[0]);
    CHECK(params.zero_variance_mask[1]);
    CHECK_FALSE(params.zero_variance_mask[2]);
}

TEST_CASE("standardized columns have near-zero mean and unit variance") {
    Rng rng(31);
    Eigen::MatrixXd m(20, 40);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.next_double(-2, 2);
    m.col(7).setConstant(3.25);  // one degenerate column

    auto [z, params] = standardize_columns(m);
    for (int j = 0; j < m.cols(); ++j) {
        const double mean = z.col(j).mean();
        CHECK(std::abs(mean) < 1e-12);
        const double var = z.col(j).squaredNorm() / static_cast<double>(m.rows());
        if (params.zero_variance_mask[static_cast<std::size_t>(j)])
            CHECK(var == 0.0);
        else
            CHECK(std::abs(var - 1.0) < 1e-12);
    }

    // invertible on unmasked columns
    for (int j = 0; j < m.cols(); ++j) {
        if (params.zero_variance_mask[static_cast<std::size_t>(j)]) continue;
        Eigen::VectorXd back = z.col(j) * params.column_stds[j];
        back.array() += params.column_means[j];
        CHECK((back - m.col(j)).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("counts file round trip") {
    FilteredDataset ds = playout_dataset(60, 23, 16);
    CountMatrix m = build_count_matrix(ds, RowScheme::PieceBucket);

    auto path = (std::filesystem::temp_directory_path() / "pv_counts_test.counts").string();
    write_counts(path, m);
    CountMatrix back = read_counts(path);
    std::remove(path.c_str());

    CHECK(back.scheme() == m.scheme());
    CHECK(back.num_buckets() == m.num_buckets());
    CHECK(back.n() == m.n());
    CHECK(back.total_count() == m.total_count());
    CHECK(back.meta().zobrist_seed == m.meta().zobrist_seed);
    REQUIRE(back.nonzeros() == m.nonzeros());
    for (std::size_t i = 0; i < m.n(); ++i) CHECK(back.row(i) == m.row(i));
}

TEST_CASE("sparse conversion preserves totals") {
    FilteredDataset ds = playout_dataset(40, 29, 4);
    CountMatrix m = build_count_matrix(ds, RowScheme::PieceBucket);
    SparseMatrix s = m.to_sparse();
    CHECK(static_cast<std::uint64_t>(s.sum()) == m.total_count());
    CHECK(static_cast<std::size_t>(s.nonZeros()) == m.nonzeros());
}
