#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "piecevec/counts.hpp"
#include "piecevec/factor/nmf.hpp"
#include "piecevec/factor/pca.hpp"
#include "piecevec/util/text.hpp"

namespace piecevec::factor {

struct TopMove {
    MoveIndex move;
    double weight = 0;
};

namespace detail {

// k strongest entries of one basis vector. |weight| ranks PCA loadings
// (sign retained in the output); NMF basis weights are non-negative so the
// magnitude ordering is the plain ordering. Zero entries never qualify.
inline std::vector<TopMove> top_entries(const Eigen::VectorXd& basis, int k) {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(basis.size()));
    for (int j = 0; j < basis.size(); ++j)
        if (basis[j] != 0.0) idx.push_back(j);
    const auto mid = idx.begin() + std::min<std::ptrdiff_t>(k, idx.size());
    std::partial_sort(idx.begin(), mid, idx.end(), [&](int a, int b) {
        const double ma = std::abs(basis[a]), mb = std::abs(basis[b]);
        return ma != mb ? ma > mb : a < b;  // ties: smaller move index first
    });
    std::vector<TopMove> out;
    for (auto it = idx.begin(); it != mid; ++it)
        out.push_back({MoveIndex(*it), basis[*it]});
    return out;
}

}  // namespace detail

// Per component, the k moves with the largest-magnitude loading.
inline std::vector<std::vector<TopMove>> top_moves_per_component(const PcaModel& model, int k) {
    std::vector<std::vector<TopMove>> out;
    for (int c = 0; c < model.d; ++c)
        out.push_back(detail::top_entries(model.loadings.col(c), k));
    return out;
}

// Per component, the k moves with the largest basis weight (row of H).
inline std::vector<std::vector<TopMove>> top_moves_per_component(const NmfModel& model, int k) {
    std::vector<std::vector<TopMove>> out;
    for (int c = 0; c < model.d; ++c)
        out.push_back(detail::top_entries(model.h.row(c).transpose(), k));
    return out;
}

inline std::string move_name(MoveIndex m) {
    auto [s, t] = decode_move_index(m);
    return s.name() + t.name();
}

// component,rank,move,move_index,weight
inline void write_top_moves_csv(const std::string& path,
                                const std::vector<std::vector<TopMove>>& tops) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "component,rank,move,move_index,weight\n";
    for (std::size_t c = 0; c < tops.size(); ++c)
        for (std::size_t r = 0; r < tops[c].size(); ++r)
            out << c << ',' << r + 1 << ',' << move_name(tops[c][r].move) << ','
                << tops[c][r].move.index << ',' << format_double(tops[c][r].weight) << '\n';
}

// Per-row embedding coordinates: one labeled d-vector per matrix row
// (scores W for PCA, factor W for NMF).
struct ScoredRow {
    counts::RowKey key;
    Eigen::VectorXd scores;
};

inline std::vector<ScoredRow> component_scores(const Eigen::MatrixXd& w,
                                               counts::RowScheme scheme,
                                               std::uint32_t num_buckets) {
    std::vector<ScoredRow> out;
    out.reserve(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        out.push_back({counts::key_for_row(static_cast<std::size_t>(i), scheme, num_buckets),
                       w.row(i).transpose()});
    return out;
}

inline std::vector<ScoredRow> component_scores(const PcaModel& model, counts::RowScheme scheme,
                                               std::uint32_t num_buckets = 1) {
    return component_scores(model.scores, scheme, num_buckets);
}

inline std::vector<ScoredRow> component_scores(const NmfModel& model, counts::RowScheme scheme,
                                               std::uint32_t num_buckets = 1) {
    return component_scores(model.w, scheme, num_buckets);
}

// row,score_1,...,score_d
inline void write_scores_csv(const std::string& path, const std::vector<ScoredRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "row";
    if (!rows.empty())
        for (Eigen::Index c = 0; c < rows[0].scores.size(); ++c) out << ",score_" << c + 1;
    out << '\n';
    for (const ScoredRow& r : rows) {
        out << r.key.label();
        for (Eigen::Index c = 0; c < r.scores.size(); ++c)
            out << ',' << format_double(r.scores[c]);
        out << '\n';
    }
}

}  // namespace piecevec::factor
