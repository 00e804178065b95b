// Pipeline driver. Every subcommand is one stage: it reads/writes the stage
// file formats (.mlog, .counts, .pvm, .csv) and drops a manifest next to its
// primary output so `rerun` can reproduce it byte-for-byte.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "piecevec/piecevec.hpp"

namespace pv = piecevec;
using nlohmann::json;

namespace {

// Argument problems that CLI11 cannot see (bad key=value pairs, missing
// action flags); they exit 2 like any other usage error.
struct UsageError {
    std::string msg;
};

// ---------------------------------------------------------------- manifest

void emit_manifest(const std::string& sub, const json& cfg,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs) {
    if (outputs.empty()) return;
    pv::Manifest m;
    m.subcommand = sub;
    m.config = cfg;
    for (const auto& p : inputs) m.inputs.push_back(pv::file_digest_entry(p));
    for (const auto& p : outputs) m.outputs.push_back(pv::file_digest_entry(p));
    pv::write_manifest(pv::manifest_path_for(outputs.front()), m);
}

// ---------------------------------------------------------------- datasets

bool has_extension(const std::string& path, const char* ext) {
    auto e = std::filesystem::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e == ext;
}

// .pgn parses as PGN; anything else is treated as a move log.
pv::data::FilteredDataset load_dataset(const std::string& path) {
    if (has_extension(path, ".pgn")) {
        std::ifstream in(path);
        if (!in) throw pv::Error("cannot open: " + path);
        auto games = pv::data::parse_pgn(in);
        pv::data::DatasetMeta meta;
        meta.source = path;
        return pv::data::filter_white_wins(std::move(games), meta);
    }
    return pv::data::filter_white_wins_mlog(path);
}

// ------------------------------------------------------------- engine cfg

json engine_to_json(const std::string& exe, std::optional<int> movetime,
                    std::optional<int> depth, const std::vector<std::string>& options,
                    const std::vector<std::string>& args, int handshake_timeout,
                    int response_timeout) {
    json opts = json::object();
    for (const std::string& kv : options) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError{"engine option must be name=value, got '" + kv + "'"};
        opts[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    json j{{"executable", exe},
           {"options", opts},
           {"args", args},
           {"handshake_timeout_ms", handshake_timeout},
           {"response_timeout_ms", response_timeout}};
    j["movetime_ms"] = movetime ? json(*movetime) : json(nullptr);
    j["depth"] = depth ? json(*depth) : json(nullptr);
    return j;
}

pv::engine::EngineConfig engine_from_json(const json& j) {
    pv::engine::EngineConfig cfg;
    cfg.executable = j.at("executable").get<std::string>();
    if (!j.at("movetime_ms").is_null()) cfg.movetime_ms = j.at("movetime_ms").get<int>();
    if (!j.at("depth").is_null()) cfg.depth = j.at("depth").get<int>();
    for (const auto& [k, v] : j.at("options").items())
        cfg.options[k] = v.get<std::string>();
    cfg.args = j.at("args").get<std::vector<std::string>>();
    cfg.handshake_timeout_ms = j.at("handshake_timeout_ms").get<int>();
    cfg.response_timeout_ms = j.at("response_timeout_ms").get<int>();
    return cfg;
}

// ------------------------------------------------------------------ stages

void stage_selfplay(const json& cfg) {
    const pv::engine::EngineConfig white = engine_from_json(cfg.at("white"));
    const pv::engine::EngineConfig black = engine_from_json(cfg.at("black"));
    pv::engine::SelfplayOptions opts;
    opts.max_games = cfg.at("games").get<std::uint32_t>();
    opts.max_plies = cfg.at("max_plies").get<std::uint32_t>();
    opts.seed = cfg.at("seed").get<std::uint64_t>();
    opts.jobs = cfg.at("jobs").get<int>();
    opts.source = cfg.at("source").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();

    const auto sum = pv::engine::run_selfplay(white, black, opts, out);
    std::cout << "selfplay: " << sum.games_written << " games written, " << sum.games_aborted
              << " aborted, " << sum.total_plies << " plies -> " << out << '\n';

    std::vector<std::string> inputs;
    if (!white.is_builtin()) inputs.push_back(white.executable);
    if (!black.is_builtin() && black.executable != white.executable)
        inputs.push_back(black.executable);
    emit_manifest("selfplay", cfg, inputs, {out});
}

void stage_ingest(const json& cfg) {
    const std::string in = cfg.at("in").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();

    pv::data::FilteredDataset ds = load_dataset(in);
    if (!cfg.at("buckets").is_null()) {
        const auto tables = pv::init_tables(cfg.at("zobrist_seed").get<std::uint64_t>());
        ds = pv::data::annotate_buckets(std::move(ds), tables,
                                        cfg.at("buckets").get<std::uint32_t>());
    }

    pv::data::MlogHeader header;
    header.meta = ds.meta;
    pv::data::write_mlog(out, header, ds.games);
    std::cout << "ingest: kept " << ds.summary.games_kept << "/" << ds.summary.games_in
              << " games, " << ds.summary.records_kept << " white-win records -> " << out
              << '\n';
    emit_manifest("ingest", cfg, {in}, {out});
}

void stage_counts(const json& cfg) {
    const std::string in = cfg.at("in").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();
    const auto scheme = pv::counts::parse_scheme(cfg.at("scheme").get<std::string>());
    if (!scheme) throw pv::Error("unknown scheme: " + cfg.at("scheme").get<std::string>());

    pv::data::FilteredDataset ds = load_dataset(in);
    if (*scheme == pv::counts::RowScheme::PieceBucket) {
        const auto tables = pv::init_tables(cfg.at("zobrist_seed").get<std::uint64_t>());
        ds = pv::data::annotate_buckets(std::move(ds), tables,
                                        cfg.at("buckets").get<std::uint32_t>());
    }
    const pv::counts::CountMatrix x = pv::counts::build_count_matrix(ds, *scheme);
    pv::counts::write_counts(out, x);
    std::cout << "counts: " << x.n() << " rows x " << x.p() << " moves, " << x.total_count()
              << " moves counted, " << x.nonzeros() << " nonzeros -> " << out << '\n';
    emit_manifest("counts", cfg, {in}, {out});
}

void stage_pca(const json& cfg) {
    const std::string in = cfg.at("in").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();
    const int d = cfg.at("d").get<int>();
    const bool raw = cfg.at("raw").get<bool>();

    const pv::counts::CountMatrix x = pv::counts::read_counts(in);
    const Eigen::MatrixXd xd = pv::counts::dense(x.to_sparse());
    pv::factor::PcaModel model;
    if (raw) {
        model = pv::factor::pca_fit(xd, d);
    } else {
        auto [xs, params] = pv::counts::standardize_columns(xd);
        model = pv::factor::pca_fit(xs, d, std::move(params));
    }

    pv::factor::ModelInfo info;
    info.scheme = x.scheme();
    info.num_buckets = x.num_buckets();
    info.zobrist_seed = x.meta().zobrist_seed;
    info.row_normalized = false;
    pv::factor::save_model(out, model, info);

    double cum = 0;
    for (int k = 0; k < model.d; ++k) {
        cum += model.explained_variance_ratio[k];
        std::cout << "pca: component " << k + 1 << " variance "
                  << pv::format_double(model.explained_variance_ratio[k]) << " cumulative "
                  << pv::format_double(cum) << '\n';
    }
    std::cout << "pca: first " << model.d << " components explain "
              << pv::format_double(100.0 * cum) << "% of the variance -> " << out << '\n';

    std::vector<std::string> outputs{out};
    if (!cfg.at("variance_out").is_null()) {
        const std::string vpath = cfg.at("variance_out").get<std::string>();
        std::ofstream v(vpath);
        if (!v) throw pv::Error("cannot open for writing: " + vpath);
        v << "component,variance_ratio,cumulative\n";
        double c = 0;
        for (int k = 0; k < model.d; ++k) {
            c += model.explained_variance_ratio[k];
            v << k + 1 << ',' << pv::format_double(model.explained_variance_ratio[k]) << ','
              << pv::format_double(c) << '\n';
        }
        outputs.push_back(vpath);
    }
    emit_manifest("pca", cfg, {in}, outputs);
}

void stage_nmf(const json& cfg) {
    const std::string in = cfg.at("in").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();
    const bool raw = cfg.at("raw").get<bool>();

    pv::factor::NmfOptions opts;
    opts.d = cfg.at("d").get<int>();
    opts.max_iters = cfg.at("max_iters").get<int>();
    opts.rel_tol = cfg.at("rel_tol").get<double>();
    opts.seed = cfg.at("seed").get<std::uint64_t>();
    const auto init = pv::factor::parse_nmf_init(cfg.at("init").get<std::string>());
    if (!init) throw pv::Error("unknown init: " + cfg.at("init").get<std::string>());
    opts.init = *init;

    const pv::counts::CountMatrix x = pv::counts::read_counts(in);
    const pv::factor::NmfModel model =
        pv::factor::nmf_fit(raw ? x.to_sparse() : pv::counts::row_normalize(x), opts);

    pv::factor::ModelInfo info;
    info.scheme = x.scheme();
    info.num_buckets = x.num_buckets();
    info.zobrist_seed = x.meta().zobrist_seed;
    info.row_normalized = !raw;
    pv::factor::save_model(out, model, info);
    std::cout << "nmf: objective " << pv::format_double(model.objective_trace.back())
              << " after " << model.iterations_run << " iterations -> " << out << '\n';
    emit_manifest("nmf", cfg, {in}, {out});
}

void stage_predict(const json& cfg) {
    const std::string model_path = cfg.at("model").get<std::string>();
    const std::string data_path = cfg.at("data").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();

    const pv::factor::LoadedModel loaded = pv::factor::load_model(model_path);
    if (loaded.is_pca())
        throw pv::Error("prediction needs an NMF model; " + model_path + " holds a PCA model");

    pv::data::FilteredDataset ds = load_dataset(data_path);
    if (loaded.info.scheme == pv::counts::RowScheme::PieceBucket) {
        const auto tables = pv::init_tables(loaded.info.zobrist_seed);
        ds = pv::data::annotate_buckets(std::move(ds), tables, loaded.info.num_buckets);
    }

    const double fraction = cfg.at("test_fraction").get<double>();
    const pv::predict::EvalOptions eval_opts{cfg.at("mask_legal").get<bool>()};
    pv::predict::EvalResult row;
    if (fraction > 0) {
        const auto seed = cfg.at("split_seed").get<std::uint64_t>();
        const auto mode = cfg.at("by_move").get<bool>() ? pv::data::SplitMode::ByMove
                                                        : pv::data::SplitMode::ByGame;
        auto [train, test] = pv::data::split_train_test(ds, fraction, seed, mode);
        row = pv::predict::evaluate_accuracy(test, loaded.nmf(), loaded.info, eval_opts);
        row.train_records = train.records.size();
        row.split_seed = seed;
    } else {
        row = pv::predict::evaluate_accuracy(ds, loaded.nmf(), loaded.info, eval_opts);
    }

    pv::predict::write_eval_csv(out, {row});
    std::cout << "predict: accuracy " << pv::format_double(row.accuracy) << " on "
              << row.test_records << " records (empty-bucket rate "
              << pv::format_double(row.empty_bucket_rate) << ", baseline "
              << pv::format_double(row.random_baseline) << ") -> " << out << '\n';
    emit_manifest("predict", cfg, {model_path, data_path}, {out});
}

void stage_sweep(const json& cfg) {
    const std::string data_path = cfg.at("data").get<std::string>();
    const std::string out = cfg.at("out").get<std::string>();

    pv::predict::SweepOptions opts;
    opts.d = cfg.at("d").get<int>();
    opts.bucket_counts = cfg.at("buckets").get<std::vector<std::uint32_t>>();
    opts.split_seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
    opts.test_fraction = cfg.at("test_fraction").get<double>();
    opts.nmf.max_iters = cfg.at("max_iters").get<int>();
    opts.nmf.rel_tol = cfg.at("rel_tol").get<double>();
    opts.nmf.seed = cfg.at("nmf_seed").get<std::uint64_t>();
    const auto init = pv::factor::parse_nmf_init(cfg.at("init").get<std::string>());
    if (!init) throw pv::Error("unknown init: " + cfg.at("init").get<std::string>());
    opts.nmf.init = *init;
    opts.raw_counts = cfg.at("raw_counts").get<bool>();
    opts.mask_legal = cfg.at("mask_legal").get<bool>();

    const pv::data::FilteredDataset ds = load_dataset(data_path);
    const auto rows = pv::predict::bucket_sweep(ds, opts);
    pv::predict::write_eval_csv(out, rows);
    for (const auto& r : rows)
        std::cout << "sweep: B=" << r.num_buckets << " seed=" << r.split_seed << " accuracy "
                  << pv::format_double(r.accuracy) << " empty-bucket rate "
                  << pv::format_double(r.empty_bucket_rate) << '\n';
    std::cout << "sweep: " << rows.size() << " rows -> " << out << '\n';
    emit_manifest("sweep", cfg, {data_path}, {out});
}

// --- report rendering ---

void print_top_moves(std::ostream& os, const std::vector<std::vector<pv::factor::TopMove>>& tops) {
    for (std::size_t c = 0; c < tops.size(); ++c) {
        os << "component " << c + 1 << ":";
        for (const auto& t : tops[c])
            os << "  " << pv::factor::move_name(t.move) << " (" << pv::format_double(t.weight)
               << ")";
        os << '\n';
    }
}

struct AccuracySummary {
    std::uint32_t buckets = 0;
    double mean_accuracy = 0;
    double mean_empty_rate = 0;
    double baseline = 0;
    int runs = 0;
};

std::vector<AccuracySummary> summarize_eval_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pv::Error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("num_buckets,", 0) != 0)
        throw pv::Error(path + ": not an evaluation CSV");
    std::map<std::uint32_t, AccuracySummary> agg;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = pv::split(line, ',');
        if (f.size() != 10)
            throw pv::Error(path + ":" + std::to_string(line_no) + ": expected 10 columns");
        const auto b = static_cast<std::uint32_t>(std::stoul(f[0]));
        auto& s = agg[b];
        s.buckets = b;
        s.mean_accuracy += std::stod(f[5]);
        s.mean_empty_rate += std::stod(f[6]);
        s.baseline = std::stod(f[7]);
        ++s.runs;
    }
    std::vector<AccuracySummary> out;
    for (auto& [b, s] : agg) {
        s.mean_accuracy /= s.runs;
        s.mean_empty_rate /= s.runs;
        out.push_back(s);
    }
    return out;
}

void print_accuracy_table(std::ostream& os, const std::vector<AccuracySummary>& rows,
                          bool bars) {
    double max_acc = 0;
    for (const auto& r : rows) max_acc = std::max(max_acc, r.mean_accuracy);
    os << "buckets  runs  mean_accuracy  mean_empty_rate  vs_baseline\n";
    for (const auto& r : rows) {
        const double lift = r.baseline > 0 ? r.mean_accuracy / r.baseline : 0;
        os << r.buckets << "  " << r.runs << "  " << pv::format_double(r.mean_accuracy) << "  "
           << pv::format_double(r.mean_empty_rate) << "  " << pv::format_double(lift) << "x";
        if (bars && max_acc > 0) {
            const int len = static_cast<int>(40.0 * r.mean_accuracy / max_acc + 0.5);
            os << "  |";
            for (int i = 0; i < len; ++i) os << '#';
        }
        os << '\n';
    }
}

void stage_report(const json& cfg) {
    std::vector<std::string> inputs, outputs;

    if (!cfg.at("model").is_null()) {
        const std::string model_path = cfg.at("model").get<std::string>();
        inputs.push_back(model_path);
        const pv::factor::LoadedModel loaded = pv::factor::load_model(model_path);
        const int k = cfg.at("top_moves").get<int>();
        const auto tops = loaded.is_pca()
                              ? pv::factor::top_moves_per_component(loaded.pca(), k)
                              : pv::factor::top_moves_per_component(loaded.nmf(), k);
        if (!cfg.at("top_out").is_null()) {
            const std::string p = cfg.at("top_out").get<std::string>();
            pv::factor::write_top_moves_csv(p, tops);
            outputs.push_back(p);
        } else {
            print_top_moves(std::cout, tops);
        }
        if (!cfg.at("scores_out").is_null()) {
            const std::string p = cfg.at("scores_out").get<std::string>();
            const auto scores =
                loaded.is_pca()
                    ? pv::factor::component_scores(loaded.pca(), loaded.info.scheme,
                                                   loaded.info.num_buckets)
                    : pv::factor::component_scores(loaded.nmf(), loaded.info.scheme,
                                                   loaded.info.num_buckets);
            pv::factor::write_scores_csv(p, scores);
            outputs.push_back(p);
        }
    }

    if (!cfg.at("accuracy_in").is_null()) {
        const std::string apath = cfg.at("accuracy_in").get<std::string>();
        inputs.push_back(apath);
        const auto rows = summarize_eval_csv(apath);
        if (!cfg.at("accuracy_out").is_null()) {
            const std::string p = cfg.at("accuracy_out").get<std::string>();
            std::ofstream o(p);
            if (!o) throw pv::Error("cannot open for writing: " + p);
            print_accuracy_table(o, rows, cfg.at("bars").get<bool>());
            outputs.push_back(p);
        } else {
            print_accuracy_table(std::cout, rows, cfg.at("bars").get<bool>());
        }
    }

    for (const auto& p : outputs) std::cout << "report: wrote " << p << '\n';
    emit_manifest("report", cfg, inputs, outputs);
}

void execute_stage(const std::string& sub, const json& cfg) {
    if (sub == "selfplay") return stage_selfplay(cfg);
    if (sub == "ingest") return stage_ingest(cfg);
    if (sub == "counts") return stage_counts(cfg);
    if (sub == "pca") return stage_pca(cfg);
    if (sub == "nmf") return stage_nmf(cfg);
    if (sub == "predict") return stage_predict(cfg);
    if (sub == "sweep") return stage_sweep(cfg);
    if (sub == "report") return stage_report(cfg);
    throw pv::ManifestError("unknown stage: " + sub);
}

void stage_rerun(const std::string& manifest_path) {
    const pv::Manifest m = pv::read_manifest(manifest_path);
    pv::verify_manifest_inputs(m);
    std::cout << "rerun: " << m.subcommand << " from " << manifest_path << '\n';
    execute_stage(m.subcommand, m.config);
}

json opt_str(const std::string& s) { return s.empty() ? json(nullptr) : json(s); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piece-vector pipeline: selfplay data -> count matrices -> "
                 "PCA/NMF embeddings -> move prediction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pv::kVersion);

    // ---- selfplay ----
    auto* sp = app.add_subcommand("selfplay", "play engine-vs-engine games to a move log");
    std::string sp_white = "builtin:random", sp_black = "builtin:random";
    std::string sp_out, sp_source = "selfplay";
    std::optional<int> sp_movetime, sp_depth;
    std::vector<std::string> sp_wopts, sp_bopts, sp_wargs, sp_bargs;
    std::uint32_t sp_games = 10, sp_max_plies = 600;
    std::uint64_t sp_seed = 0;
    int sp_jobs = 1, sp_handshake = 5000, sp_response = 10000;
    sp->add_option("--white", sp_white, "white engine: path or builtin:random");
    sp->add_option("--black", sp_black, "black engine: path or builtin:random");
    auto* sp_mt = sp->add_option("--movetime", sp_movetime, "go movetime (ms) for both engines");
    sp->add_option("--depth", sp_depth, "go depth for both engines")->excludes(sp_mt);
    sp->add_option("--white-option", sp_wopts, "white setoption name=value")->take_all();
    sp->add_option("--black-option", sp_bopts, "black setoption name=value")->take_all();
    sp->add_option("--white-arg", sp_wargs, "extra argv for the white engine")->take_all();
    sp->add_option("--black-arg", sp_bargs, "extra argv for the black engine")->take_all();
    sp->add_option("--games", sp_games, "number of games");
    sp->add_option("--max-plies", sp_max_plies, "per-game ply cap (draw when hit)");
    sp->add_option("--seed", sp_seed, "base seed; per-game seeds derive from it");
    sp->add_option("--jobs", sp_jobs, "parallel games (output independent of this)");
    sp->add_option("--handshake-timeout", sp_handshake, "uci handshake timeout (ms)");
    sp->add_option("--response-timeout", sp_response, "bestmove/readyok timeout (ms)");
    sp->add_option("--source", sp_source, "provenance string for the log header");
    sp->add_option("--out", sp_out, "output move log")->required()->envname("PIECEVEC_OUT");

    // ---- ingest ----
    auto* ig = app.add_subcommand("ingest", "filter games to white wins (mlog or pgn input)");
    std::string ig_in, ig_out;
    std::optional<std::uint32_t> ig_buckets;
    std::uint64_t ig_zobrist = pv::kDefaultZobristSeed;
    ig->add_option("--in", ig_in, "input .mlog or .pgn")->required()->envname("PIECEVEC_IN");
    ig->add_option("--out", ig_out, "output filtered .mlog")->required()->envname("PIECEVEC_OUT");
    ig->add_option("--buckets", ig_buckets, "annotate bucket ids (power of two)");
    ig->add_option("--zobrist-seed", ig_zobrist, "hash seed for bucket annotation");

    // ---- counts ----
    auto* ct = app.add_subcommand("counts", "build a move-count matrix from a dataset");
    std::string ct_in, ct_out, ct_scheme = "per-piece";
    std::uint32_t ct_buckets = 1;
    std::uint64_t ct_zobrist = pv::kDefaultZobristSeed;
    ct->add_option("--in", ct_in, "input .mlog or .pgn")->required()->envname("PIECEVEC_IN");
    ct->add_option("--out", ct_out, "output .counts")->required()->envname("PIECEVEC_OUT");
    ct->add_option("--scheme", ct_scheme, "row scheme")
        ->check(CLI::IsMember({"per-piece", "per-type", "piece-bucket"}));
    ct->add_option("--buckets", ct_buckets, "bucket count for piece-bucket rows");
    ct->add_option("--zobrist-seed", ct_zobrist, "hash seed for bucket annotation");

    // ---- pca ----
    auto* pc = app.add_subcommand("pca", "fit a PCA embedding of a count matrix");
    std::string pc_in, pc_out, pc_variance;
    int pc_d = 10;
    bool pc_raw = false;
    pc->add_option("--in", pc_in, "input .counts")->required()->envname("PIECEVEC_IN");
    pc->add_option("--out", pc_out, "output model (.pvm)")->required()->envname("PIECEVEC_OUT");
    pc->add_option("--d", pc_d, "number of components");
    pc->add_flag("--raw", pc_raw, "skip column standardization");
    pc->add_option("--variance-out", pc_variance, "write explained-variance CSV here");

    // ---- nmf ----
    auto* nm = app.add_subcommand("nmf", "fit an NMF embedding of a count matrix");
    std::string nm_in, nm_out, nm_init = "nndsvda";
    int nm_d = 10, nm_iters = 500;
    double nm_tol = 1e-6;
    std::uint64_t nm_seed = 0;
    bool nm_raw = false;
    nm->add_option("--in", nm_in, "input .counts")->required()->envname("PIECEVEC_IN");
    nm->add_option("--out", nm_out, "output model (.pvm)")->required()->envname("PIECEVEC_OUT");
    nm->add_option("--d", nm_d, "number of components");
    nm->add_option("--max-iters", nm_iters, "multiplicative-update iteration cap");
    nm->add_option("--rel-tol", nm_tol, "stop when relative objective improvement dips below");
    nm->add_option("--seed", nm_seed, "init seed");
    nm->add_option("--init", nm_init, "initialization")
        ->check(CLI::IsMember({"random", "nndsvda"}));
    nm->add_flag("--raw", nm_raw, "fit raw counts instead of row-normalized");

    // ---- predict ----
    auto* pr = app.add_subcommand("predict", "evaluate a model's move predictions");
    std::string pr_model, pr_data, pr_out;
    double pr_fraction = 0.0;
    std::uint64_t pr_split_seed = 1;
    bool pr_by_move = false, pr_mask = false;
    pr->add_option("--model", pr_model, "piece-bucket NMF model (.pvm)")
        ->required()
        ->envname("PIECEVEC_MODEL");
    pr->add_option("--data", pr_data, "dataset (.mlog or .pgn)")
        ->required()
        ->envname("PIECEVEC_DATA");
    pr->add_option("--out", pr_out, "output CSV")->required()->envname("PIECEVEC_OUT");
    pr->add_option("--test-fraction", pr_fraction,
                   "if > 0, score only a held-out split of this size");
    pr->add_option("--split-seed", pr_split_seed, "seed for the held-out split");
    pr->add_flag("--by-move", pr_by_move, "split by move instead of by game");
    pr->add_flag("--mask-legal", pr_mask, "restrict the argmax to legal moves");

    // ---- sweep ----
    auto* sw = app.add_subcommand("sweep", "accuracy across bucket counts and split seeds");
    std::string sw_data, sw_out, sw_init = "random";
    std::vector<std::uint32_t> sw_buckets = {1, 16, 256};
    std::vector<std::uint64_t> sw_seeds = {1};
    int sw_d = 10, sw_iters = 200;
    double sw_fraction = 0.2, sw_tol = 1e-6;
    std::uint64_t sw_nmf_seed = 0;
    bool sw_raw = false, sw_mask = false;
    sw->add_option("--data", sw_data, "dataset (.mlog or .pgn)")
        ->required()
        ->envname("PIECEVEC_DATA");
    sw->add_option("--out", sw_out, "output CSV")->required()->envname("PIECEVEC_OUT");
    sw->add_option("--buckets", sw_buckets, "bucket counts, comma-separated")->delimiter(',');
    sw->add_option("--seeds", sw_seeds, "split seeds, comma-separated")->delimiter(',');
    sw->add_option("--d", sw_d, "number of NMF components");
    sw->add_option("--test-fraction", sw_fraction, "held-out fraction per split");
    sw->add_option("--max-iters", sw_iters, "NMF iteration cap per fit");
    sw->add_option("--rel-tol", sw_tol, "NMF relative-improvement stop");
    sw->add_option("--nmf-seed", sw_nmf_seed, "base NMF seed; per-run seeds derive from it");
    sw->add_option("--init", sw_init, "NMF initialization")
        ->check(CLI::IsMember({"random", "nndsvda"}));
    sw->add_flag("--raw-counts", sw_raw, "fit raw counts instead of row-normalized");
    sw->add_flag("--mask-legal", sw_mask, "restrict the argmax to legal moves");

    // ---- report ----
    auto* rp = app.add_subcommand("report", "render model and accuracy reports");
    std::string rp_model, rp_top_out, rp_scores_out, rp_acc_in, rp_acc_out;
    int rp_top = 5;
    bool rp_bars = false;
    rp->add_option("--model", rp_model, "model to describe (.pvm)")->envname("PIECEVEC_MODEL");
    rp->add_option("--top-moves", rp_top, "moves per component");
    rp->add_option("--top-out", rp_top_out, "write the top-moves table as CSV here");
    rp->add_option("--scores-out", rp_scores_out, "write per-row component scores CSV here");
    rp->add_option("--accuracy-in", rp_acc_in, "sweep/predict CSV to summarize");
    rp->add_option("--accuracy-out", rp_acc_out, "write the accuracy summary here");
    rp->add_flag("--bars", rp_bars, "append a plain-text bar chart");

    // ---- rerun ----
    auto* rr = app.add_subcommand("rerun", "re-execute a stage from its manifest");
    std::string rr_manifest;
    rr->add_option("manifest", rr_manifest, "path to a .manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string active = app.get_subcommands().front()->get_name();
    try {
        if (app.got_subcommand(sp)) {
            if (!sp_movetime && !sp_depth) sp_movetime = 10;  // small default limit
            json cfg{{"subcommand", "selfplay"},
                     {"white", engine_to_json(sp_white, sp_movetime, sp_depth, sp_wopts,
                                              sp_wargs, sp_handshake, sp_response)},
                     {"black", engine_to_json(sp_black, sp_movetime, sp_depth, sp_bopts,
                                              sp_bargs, sp_handshake, sp_response)},
                     {"games", sp_games},
                     {"max_plies", sp_max_plies},
                     {"seed", sp_seed},
                     {"jobs", sp_jobs},
                     {"source", sp_source},
                     {"out", sp_out}};
            stage_selfplay(cfg);
        } else if (app.got_subcommand(ig)) {
            json cfg{{"subcommand", "ingest"},
                     {"in", ig_in},
                     {"out", ig_out},
                     {"buckets", ig_buckets ? json(*ig_buckets) : json(nullptr)},
                     {"zobrist_seed", ig_zobrist}};
            stage_ingest(cfg);
        } else if (app.got_subcommand(ct)) {
            json cfg{{"subcommand", "counts"}, {"in", ct_in},
                     {"out", ct_out},          {"scheme", ct_scheme},
                     {"buckets", ct_buckets},  {"zobrist_seed", ct_zobrist}};
            stage_counts(cfg);
        } else if (app.got_subcommand(pc)) {
            json cfg{{"subcommand", "pca"}, {"in", pc_in},   {"out", pc_out},
                     {"d", pc_d},           {"raw", pc_raw}, {"variance_out", opt_str(pc_variance)}};
            stage_pca(cfg);
        } else if (app.got_subcommand(nm)) {
            json cfg{{"subcommand", "nmf"},   {"in", nm_in},       {"out", nm_out},
                     {"d", nm_d},             {"max_iters", nm_iters}, {"rel_tol", nm_tol},
                     {"seed", nm_seed},       {"init", nm_init},   {"raw", nm_raw}};
            stage_nmf(cfg);
        } else if (app.got_subcommand(pr)) {
            json cfg{{"subcommand", "predict"},
                     {"model", pr_model},
                     {"data", pr_data},
                     {"out", pr_out},
                     {"test_fraction", pr_fraction},
                     {"split_seed", pr_split_seed},
                     {"by_move", pr_by_move},
                     {"mask_legal", pr_mask}};
            stage_predict(cfg);
        } else if (app.got_subcommand(sw)) {
            json cfg{{"subcommand", "sweep"},
                     {"data", sw_data},
                     {"out", sw_out},
                     {"buckets", sw_buckets},
                     {"seeds", sw_seeds},
                     {"d", sw_d},
                     {"test_fraction", sw_fraction},
                     {"max_iters", sw_iters},
                     {"rel_tol", sw_tol},
                     {"nmf_seed", sw_nmf_seed},
                     {"init", sw_init},
                     {"raw_counts", sw_raw},
                     {"mask_legal", sw_mask}};
            stage_sweep(cfg);
        } else if (app.got_subcommand(rp)) {
            if (rp_model.empty() && rp_acc_in.empty())
                throw UsageError{"report needs --model and/or --accuracy-in"};
            json cfg{{"subcommand", "report"},
                     {"model", opt_str(rp_model)},
                     {"top_moves", rp_top},
                     {"top_out", opt_str(rp_top_out)},
                     {"scores_out", opt_str(rp_scores_out)},
                     {"accuracy_in", opt_str(rp_acc_in)},
                     {"accuracy_out", opt_str(rp_acc_out)},
                     {"bars", rp_bars}};
            stage_report(cfg);
        } else if (app.got_subcommand(rr)) {
            stage_rerun(rr_manifest);
        }
    } catch (const UsageError& e) {
        std::cerr << "piecevec " << active << ": " << e.msg << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "piecevec " << active << ": error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
