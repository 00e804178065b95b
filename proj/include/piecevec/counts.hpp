#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include "piecevec/data/records.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/util/text.hpp"
#include "piecevec/zobrist.hpp"

namespace piecevec::counts {

// Row spaces of the count matrix: 6 piece types, 16 piece identities, or
// the piece-identity x hash-bucket product (n = 16*B).
enum class RowScheme : std::uint8_t { PerType, PerPiece, PieceBucket };

inline std::string_view scheme_name(RowScheme s) {
    switch (s) {
        case RowScheme::PerType: return "per-type";
        case RowScheme::PerPiece: return "per-piece";
        case RowScheme::PieceBucket: return "piece-bucket";
    }
    return "?";
}

inline std::optional<RowScheme> parse_scheme(std::string_view s) {
    if (s == "per-type") return RowScheme::PerType;
    if (s == "per-piece") return RowScheme::PerPiece;
    if (s == "piece-bucket") return RowScheme::PieceBucket;
    return std::nullopt;
}

struct RowKey {
    RowScheme scheme = RowScheme::PerType;
    chess::PieceKind kind = chess::PieceKind::Pawn;  // PerType
    PieceId piece = kNoPieceId;                      // PerPiece / PieceBucket
    std::optional<BucketId> bucket;                  // present iff PieceBucket

    std::string label() const {
        switch (scheme) {
            case RowScheme::PerType: return chess::kind_name(kind);
            case RowScheme::PerPiece: return "id" + std::to_string(piece);
            case RowScheme::PieceBucket:
                return "id" + std::to_string(piece) + ":b" + std::to_string(*bucket);
        }
        return "?";
    }
};

inline std::size_t row_count(RowScheme scheme, std::uint32_t num_buckets) {
    switch (scheme) {
        case RowScheme::PerType: return chess::kKindCount;
        case RowScheme::PerPiece: return kWhitePieceCount;
        case RowScheme::PieceBucket:
            return static_cast<std::size_t>(kWhitePieceCount) * num_buckets;
    }
    return 0;
}

// Dense row order: piece-id major, bucket minor.
inline std::size_t row_index(const RowKey& k, std::uint32_t num_buckets) {
    switch (k.scheme) {
        case RowScheme::PerType: return static_cast<std::size_t>(k.kind);
        case RowScheme::PerPiece: return static_cast<std::size_t>(k.piece - 1);
        case RowScheme::PieceBucket:
            return static_cast<std::size_t>(k.piece - 1) * num_buckets + *k.bucket;
    }
    return 0;
}

inline RowKey key_for_row(std::size_t row, RowScheme scheme, std::uint32_t num_buckets) {
    RowKey k;
    k.scheme = scheme;
    switch (scheme) {
        case RowScheme::PerType:
            k.kind = static_cast<chess::PieceKind>(row);
            break;
        case RowScheme::PerPiece:
            k.piece = static_cast<PieceId>(row + 1);
            break;
        case RowScheme::PieceBucket:
            k.piece = static_cast<PieceId>(row / num_buckets + 1);
            k.bucket = static_cast<BucketId>(row % num_buckets);
            break;
    }
    return k;
}

inline RowKey row_key_of(const data::MoveRecord& r, RowScheme scheme) {
    RowKey k;
    k.scheme = scheme;
    switch (scheme) {
        case RowScheme::PerType:
            k.kind = r.kind;
            break;
        case RowScheme::PerPiece:
            k.piece = r.piece;
            break;
        case RowScheme::PieceBucket:
            if (!r.bucket)
                throw MissingBucketAnnotation("record game " + std::to_string(r.game_id) +
                                              " ply " + std::to_string(r.ply) +
                                              " has no bucket; annotate first");
            k.piece = r.piece;
            k.bucket = r.bucket;
            break;
    }
    return k;
}

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Sparse non-negative counts over the 4096 move indices. Rows are stored as
// ordered column->count maps so iteration and serialization are
// deterministic; at paper scale (524,288 x 4096) occupancy is far below 1%.
class CountMatrix {
  public:
    static constexpr int kColumns = kMoveIndexCount;

    CountMatrix(RowScheme scheme, std::uint32_t num_buckets, data::DatasetMeta meta = {})
        : scheme_(scheme),
          num_buckets_(num_buckets),
          meta_(std::move(meta)),
          rows_(row_count(scheme, num_buckets)) {}

    RowScheme scheme() const { return scheme_; }
    std::uint32_t num_buckets() const { return num_buckets_; }
    const data::DatasetMeta& meta() const { return meta_; }
    std::size_t n() const { return rows_.size(); }
    int p() const { return kColumns; }
    std::uint64_t total_count() const { return total_; }

    const std::map<std::uint16_t, std::uint32_t>& row(std::size_t i) const { return rows_[i]; }
    RowKey row_key(std::size_t i) const { return key_for_row(i, scheme_, num_buckets_); }

    std::uint32_t entry(std::size_t i, MoveIndex j) const {
        auto it = rows_[i].find(j.index);
        return it == rows_[i].end() ? 0 : it->second;
    }

    void add(const RowKey& k, MoveIndex j, std::uint32_t count = 1) {
        rows_[row_index(k, num_buckets_)][j.index] += count;
        total_ += count;
    }

    std::uint64_t row_total(std::size_t i) const {
        std::uint64_t t = 0;
        for (const auto& e : rows_[i]) t += e.second;
        return t;
    }

    std::size_t nonzeros() const {
        std::size_t nnz = 0;
        for (const auto& r : rows_) nnz += r.size();
        return nnz;
    }

    SparseMatrix to_sparse() const {
        SparseMatrix m(static_cast<Eigen::Index>(n()), kColumns);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(nonzeros());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (const auto& [j, c] : rows_[i])
                trips.emplace_back(static_cast<int>(i), j, static_cast<double>(c));
        m.setFromTriplets(trips.begin(), trips.end());
        return m;
    }

  private:
    RowScheme scheme_;
    std::uint32_t num_buckets_;
    data::DatasetMeta meta_;
    std::vector<std::map<std::uint16_t, std::uint32_t>> rows_;
    std::uint64_t total_ = 0;
};

// One increment per record at (row key, move index).
inline CountMatrix build_count_matrix(const data::FilteredDataset& ds, RowScheme scheme) {
    std::uint32_t buckets = 1;
    if (scheme == RowScheme::PieceBucket) {
        if (!ds.meta.num_buckets)
            throw MissingBucketAnnotation("dataset not annotated; run bucket annotation first");
        buckets = *ds.meta.num_buckets;
    }
    CountMatrix m(scheme, buckets, ds.meta);
    for (const data::MoveRecord& r : ds.records) m.add(row_key_of(r, scheme), r.move);
    return m;
}

// Rows scaled to sum to 1; all-zero rows stay zero.
inline SparseMatrix row_normalize(const CountMatrix& x) {
    SparseMatrix m = x.to_sparse();
    for (int i = 0; i < m.outerSize(); ++i) {
        double total = 0;
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) total += it.value();
        if (total == 0) continue;
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) it.valueRef() /= total;
    }
    return m;
}

inline Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

struct StandardizationParams {
    Eigen::VectorXd column_means;        // length p
    Eigen::VectorXd column_stds;         // length p; 0 on masked columns
    std::vector<bool> zero_variance_mask;  // true where the column was constant
};

// Column z-scoring with population (1/n) variance. Constant columns (moves
// never observed, e.g. a1a1) become all-zero and are flagged, keeping
// column index == MoveIndex across the pipeline.
inline std::pair<Eigen::MatrixXd, StandardizationParams> standardize_columns(
    const Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows(), p = m.cols();
    StandardizationParams params;
    params.column_means = m.colwise().mean();
    Eigen::MatrixXd centered = m.rowwise() - params.column_means.transpose();
    params.column_stds =
        (centered.array().square().colwise().sum() / static_cast<double>(n)).sqrt();
    params.zero_variance_mask.assign(static_cast<std::size_t>(p), false);

    Eigen::MatrixXd out(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (params.column_stds[j] == 0.0) {
            params.zero_variance_mask[static_cast<std::size_t>(j)] = true;
            out.col(j).setZero();
        } else {
            out.col(j) = centered.col(j) / params.column_stds[j];
        }
    }
    return {std::move(out), std::move(params)};
}

// .counts file: JSON header line, then one "row col count" triplet per line
// in row-major, column-ascending order.
inline void write_counts(const std::string& path, const CountMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    nlohmann::json header{{"type", "header"},
                          {"format", "counts"},
                          {"version", 1},
                          {"scheme", std::string(scheme_name(m.scheme()))},
                          {"zobrist_seed", m.meta().zobrist_seed},
                          {"source", m.meta().source},
                          {"n", m.n()},
                          {"p", m.p()},
                          {"total", m.total_count()},
                          {"nonzeros", m.nonzeros()}};
    if (m.scheme() == RowScheme::PieceBucket) header["buckets"] = m.num_buckets();
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < m.n(); ++i)
        for (const auto& [j, c] : m.row(i)) out << i << ' ' << j << ' ' << c << '\n';
}

inline CountMatrix read_counts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": empty counts file");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
        if (header.at("format").get<std::string>() != "counts" ||
            header.at("version").get<int>() != 1)
            throw Error(path + ": not a version-1 counts file");
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": bad header: " + e.what());
    }
    auto scheme = parse_scheme(header.at("scheme").get<std::string>());
    if (!scheme) throw Error(path + ": unknown scheme");
    std::uint32_t buckets = header.value("buckets", 1u);
    data::DatasetMeta meta;
    meta.zobrist_seed = header.at("zobrist_seed").get<std::uint64_t>();
    meta.source = header.value("source", std::string());
    if (*scheme == RowScheme::PieceBucket) meta.num_buckets = buckets;

    CountMatrix m(*scheme, buckets, meta);
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split(line, ' ');
        std::uint64_t i = 0, j = 0, c = 0;
        if (fields.size() != 3 || !parse_u64(fields[0], i) || !parse_u64(fields[1], j) ||
            !parse_u64(fields[2], c))
            throw Error(path + ":" + std::to_string(line_no) + ": expected 'row col count'");
        if (i >= m.n() || j >= static_cast<std::uint64_t>(m.p()))
            throw Error(path + ":" + std::to_string(line_no) + ": index out of range");
        m.add(m.row_key(i), MoveIndex(static_cast<int>(j)), static_cast<std::uint32_t>(c));
    }
    if (m.total_count() != header.at("total").get<std::uint64_t>())
        throw Error(path + ": total count does not match header");
    return m;
}

}  // namespace piecevec::counts
