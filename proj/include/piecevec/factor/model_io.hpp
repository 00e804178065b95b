#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <variant>

#include "piecevec/counts.hpp"
#include "piecevec/errors.hpp"
#include "piecevec/factor/nmf.hpp"
#include "piecevec/factor/pca.hpp"

// Model container (.pvm): little-endian binary.
//   magic "PVM1", kind u8 (0 = pca, 1 = nmf),
//   scheme u8, num_buckets u32, zobrist_seed u64, row_normalized u8,
//   then the kind-specific payload. Matrices are stored as (rows u64,
//   cols u64, column-major doubles), so a write/read cycle is bit-exact.

namespace piecevec::factor {

// Provenance a prediction stage needs to interpret the rows of W.
struct ModelInfo {
    counts::RowScheme scheme = counts::RowScheme::PerPiece;
    std::uint32_t num_buckets = 1;
    std::uint64_t zobrist_seed = kDefaultZobristSeed;
    bool row_normalized = false;
};

namespace detail {

inline void put_bytes(std::ostream& out, const void* p, std::size_t len) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
}

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    put_bytes(out, &v, sizeof(v));
}

inline void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    put_bytes(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

inline void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
    put_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

inline void get_bytes(std::istream& in, void* p, std::size_t len, const std::string& path) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in.gcount()) != len)
        throw ModelFormatError(path + ": truncated model file");
}

template <typename T>
T get(std::istream& in, const std::string& path) {
    T v;
    get_bytes(in, &v, sizeof(v), path);
    return v;
}

inline Eigen::MatrixXd get_matrix(std::istream& in, const std::string& path) {
    const auto rows = get<std::uint64_t>(in, path);
    const auto cols = get<std::uint64_t>(in, path);
    if (rows > (1ull << 32) || cols > (1ull << 32))
        throw ModelFormatError(path + ": implausible matrix shape");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    get_bytes(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()), path);
    return m;
}

inline Eigen::VectorXd get_vector(std::istream& in, const std::string& path) {
    const auto len = get<std::uint64_t>(in, path);
    if (len > (1ull << 32)) throw ModelFormatError(path + ": implausible vector length");
    Eigen::VectorXd v(static_cast<Eigen::Index>(len));
    get_bytes(in, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()), path);
    return v;
}

inline void put_info(std::ostream& out, const ModelInfo& info) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(info.scheme));
    put<std::uint32_t>(out, info.num_buckets);
    put<std::uint64_t>(out, info.zobrist_seed);
    put<std::uint8_t>(out, info.row_normalized ? 1 : 0);
}

inline ModelInfo get_info(std::istream& in, const std::string& path) {
    ModelInfo info;
    const auto scheme = get<std::uint8_t>(in, path);
    if (scheme > 2) throw ModelFormatError(path + ": bad scheme byte");
    info.scheme = static_cast<counts::RowScheme>(scheme);
    info.num_buckets = get<std::uint32_t>(in, path);
    info.zobrist_seed = get<std::uint64_t>(in, path);
    info.row_normalized = get<std::uint8_t>(in, path) != 0;
    return info;
}

constexpr char kMagic[4] = {'P', 'V', 'M', '1'};

}  // namespace detail

inline void save_model(const std::string& path, const PcaModel& model, const ModelInfo& info) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelFormatError("cannot open for writing: " + path);
    detail::put_bytes(out, detail::kMagic, 4);
    detail::put<std::uint8_t>(out, 0);
    detail::put_info(out, info);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.d));
    detail::put_matrix(out, model.loadings);
    detail::put_matrix(out, model.scores);
    detail::put_vector(out, model.explained_variance_ratio);
    detail::put_vector(out, model.singular_values);
    detail::put_vector(out, model.standardization.column_means);
    detail::put_vector(out, model.standardization.column_stds);
    detail::put<std::uint64_t>(out, model.standardization.zero_variance_mask.size());
    for (bool b : model.standardization.zero_variance_mask)
        detail::put<std::uint8_t>(out, b ? 1 : 0);
    if (!out) throw ModelFormatError("write failed: " + path);
}

inline void save_model(const std::string& path, const NmfModel& model, const ModelInfo& info) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelFormatError("cannot open for writing: " + path);
    detail::put_bytes(out, detail::kMagic, 4);
    detail::put<std::uint8_t>(out, 1);
    detail::put_info(out, info);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.d));
    detail::put<std::uint64_t>(out, model.seed);
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(model.init));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.iterations_run));
    detail::put_matrix(out, model.w);
    detail::put_matrix(out, model.h);
    detail::put<std::uint64_t>(out, model.objective_trace.size());
    for (double v : model.objective_trace) detail::put<double>(out, v);
    if (!out) throw ModelFormatError("write failed: " + path);
}

struct LoadedModel {
    std::variant<PcaModel, NmfModel> model;
    ModelInfo info;

    bool is_pca() const { return std::holds_alternative<PcaModel>(model); }
    const PcaModel& pca() const { return std::get<PcaModel>(model); }
    const NmfModel& nmf() const { return std::get<NmfModel>(model); }
};

inline LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open: " + path);
    char magic[4];
    detail::get_bytes(in, magic, 4, path);
    if (std::memcmp(magic, detail::kMagic, 4) != 0)
        throw ModelFormatError(path + ": not a model file (bad magic)");

    LoadedModel out;
    const auto kind = detail::get<std::uint8_t>(in, path);
    out.info = detail::get_info(in, path);
    if (kind == 0) {
        PcaModel m;
        m.d = static_cast<int>(detail::get<std::uint32_t>(in, path));
        m.loadings = detail::get_matrix(in, path);
        m.scores = detail::get_matrix(in, path);
        m.explained_variance_ratio = detail::get_vector(in, path);
        m.singular_values = detail::get_vector(in, path);
        m.standardization.column_means = detail::get_vector(in, path);
        m.standardization.column_stds = detail::get_vector(in, path);
        const auto mask_len = detail::get<std::uint64_t>(in, path);
        m.standardization.zero_variance_mask.resize(mask_len);
        for (std::size_t i = 0; i < mask_len; ++i)
            m.standardization.zero_variance_mask[i] = detail::get<std::uint8_t>(in, path) != 0;
        out.model = std::move(m);
    } else if (kind == 1) {
        NmfModel m;
        m.d = static_cast<int>(detail::get<std::uint32_t>(in, path));
        m.seed = detail::get<std::uint64_t>(in, path);
        const auto init = detail::get<std::uint8_t>(in, path);
        if (init > 1) throw ModelFormatError(path + ": bad init byte");
        m.init = static_cast<NmfInit>(init);
        m.iterations_run = static_cast<int>(detail::get<std::uint32_t>(in, path));
        m.w = detail::get_matrix(in, path);
        m.h = detail::get_matrix(in, path);
        const auto trace_len = detail::get<std::uint64_t>(in, path);
        if (trace_len > (1ull << 32)) throw ModelFormatError(path + ": implausible trace");
        m.objective_trace.resize(trace_len);
        for (auto& v : m.objective_trace) v = detail::get<double>(in, path);
        out.model = std::move(m);
    } else {
        throw ModelFormatError(path + ": unknown model kind " + std::to_string(kind));
    }
    return out;
}

}  // namespace piecevec::factor
