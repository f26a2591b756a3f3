#include "rsq/simulate.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rsq/disorder.hpp"
#include "rsq/version.hpp"

namespace rsq {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Fixed chunking makes the reduction independent of the worker count: each
// chunk is accumulated serially in configuration order and chunks are merged
// strictly in ascending index.
constexpr std::uint64_t kChunk = 16;

struct Partial {
    EntropyAccumulator acc;
    std::uint64_t singlets = 0;
    std::uint64_t trios = 0;
};

BlockLadder ladder_of(const RunConfig& cfg) {
    return BlockLadder{cfg.block_sizes, cfg.block_anchor, cfg.sites, cfg.block_anchors};
}

Partial compute_chunk(const RunConfig& cfg, const BlockLadder& ladder, std::uint64_t chunk_index) {
    Partial part{EntropyAccumulator(cfg.q_values, cfg.block_sizes, cfg.model.two_s)};
    const std::uint64_t begin = chunk_index * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(begin + kChunk, cfg.configurations);
    RunOptions opts;
    opts.kappa_left = cfg.kappa_left;
    opts.kappa_right = cfg.kappa_right;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
        const std::vector<double> couplings = sample_couplings(cfg.disorder, cfg.sites, idx);
        const RunResult run = run_configuration(cfg.model, couplings, opts);
        part.acc.add(count_crossings(run.events, ladder));
        part.singlets += run.singlet_count;
        part.trios += run.trio_count;
    }
    return part;
}

std::string checkpoint_path(const RunConfig& cfg) {
    return (fs::path(cfg.out_dir) / "checkpoint.json").string();
}

void write_checkpoint(const RunConfig& cfg, const EntropyAccumulator& acc,
                      std::uint64_t chunks_done, std::uint64_t singlets, std::uint64_t trios) {
    ordered_json j;
    j["version"] = kVersion;
    j["config_hash"] = config_hash(cfg);
    j["chunk"] = kChunk;
    j["chunks_done"] = chunks_done;
    j["singlet_events"] = singlets;
    j["trio_events"] = trios;
    ordered_json cells = ordered_json::array();
    for (const EntropyAccumulator::Cell& c : acc.cells())
        cells.push_back({{"n", c.count}, {"mean", c.mean}, {"m2", c.m2}});
    j["cells"] = std::move(cells);

    const fs::path path = checkpoint_path(cfg);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("checkpoint: cannot write " + tmp.string());
        os << j.dump();
    }
    fs::rename(tmp, path);
}

/// Returns chunks already merged, restoring acc and the event counters.
std::uint64_t load_checkpoint(const RunConfig& cfg, EntropyAccumulator& acc,
                              std::uint64_t& singlets, std::uint64_t& trios) {
    const fs::path path = checkpoint_path(cfg);
    std::ifstream is(path);
    if (!is) return 0;
    ordered_json j;
    try {
        is >> j;
    } catch (const std::exception&) {
        return 0; // unreadable checkpoint: start over
    }
    if (j.value("config_hash", std::uint64_t{0}) != config_hash(cfg)) return 0;
    if (j.value("chunk", std::uint64_t{0}) != kChunk) return 0;
    std::vector<EntropyAccumulator::Cell> cells;
    for (const auto& c : j.at("cells")) {
        EntropyAccumulator::Cell cell;
        cell.count = c.at("n").get<std::uint64_t>();
        cell.mean = c.at("mean").get<double>();
        cell.m2 = c.at("m2").get<double>();
        cells.push_back(cell);
    }
    acc.restore_cells(cells);
    singlets = j.at("singlet_events").get<std::uint64_t>();
    trios = j.at("trio_events").get<std::uint64_t>();
    return j.at("chunks_done").get<std::uint64_t>();
}

std::string format_g12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace

double EnsembleResult::trio_fraction() const {
    const std::uint64_t total = singlet_events + trio_events;
    return total == 0 ? 0.0 : static_cast<double>(trio_events) / static_cast<double>(total);
}

EnsembleResult run_ensemble(const RunConfig& cfg, std::uint64_t stop_after_configurations) {
    const auto t0 = std::chrono::steady_clock::now();
    const BlockLadder ladder = ladder_of(cfg);
    validate(ladder);

    const std::uint64_t n_chunks = (cfg.configurations + kChunk - 1) / kChunk;
    std::uint64_t stop_chunk = n_chunks;
    if (stop_after_configurations > 0)
        stop_chunk = std::min(n_chunks, (stop_after_configurations + kChunk - 1) / kChunk);

    EntropyAccumulator reduced(cfg.q_values, cfg.block_sizes, cfg.model.two_s);
    std::uint64_t singlets = 0, trios = 0;
    std::uint64_t start_chunk = 0;
    if (cfg.checkpoint_every > 0)
        start_chunk = load_checkpoint(cfg, reduced, singlets, trios);
    const std::uint64_t resumed = std::min<std::uint64_t>(start_chunk * kChunk, cfg.configurations);

    unsigned workers = cfg.workers == 0 ? std::thread::hardware_concurrency() : cfg.workers;
    if (workers == 0) workers = 1;

    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint64_t, Partial> ready;
    std::atomic<std::uint64_t> next_chunk{start_chunk};
    std::atomic<bool> failed{false};
    std::exception_ptr error;

    auto worker_fn = [&]() {
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::uint64_t k = next_chunk.fetch_add(1);
                if (k >= stop_chunk) return;
                Partial part = compute_chunk(cfg, ladder, k);
                std::lock_guard lock(mu);
                ready.emplace(k, std::move(part));
                cv.notify_all();
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!error) error = std::current_exception();
            failed.store(true);
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker_fn);

    std::uint64_t next_checkpoint =
        cfg.checkpoint_every > 0 ? resumed + cfg.checkpoint_every : std::uint64_t(-1);
    for (std::uint64_t k = start_chunk; k < stop_chunk; ++k) {
        Partial part{EntropyAccumulator(cfg.q_values, cfg.block_sizes, cfg.model.two_s)};
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return ready.count(k) != 0 || failed.load(); });
            if (failed.load()) break;
            part = std::move(ready.at(k));
            ready.erase(k);
        }
        reduced.merge(part.acc);
        singlets += part.singlets;
        trios += part.trios;
        const std::uint64_t configs_done = std::min<std::uint64_t>((k + 1) * kChunk, cfg.configurations);
        if (configs_done >= next_checkpoint || (cfg.checkpoint_every > 0 && k + 1 == stop_chunk)) {
            write_checkpoint(cfg, reduced, k + 1, singlets, trios);
            while (next_checkpoint <= configs_done) next_checkpoint += cfg.checkpoint_every;
        }
    }

    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    EnsembleResult out;
    out.table = reduced.table();
    out.singlet_events = singlets;
    out.trio_events = trios;
    out.configurations = reduced.configurations();
    out.resumed_configurations = resumed;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

double estimate_runtime_seconds(const RunConfig& cfg) {
    const BlockLadder ladder = ladder_of(cfg);
    validate(ladder);
    const auto t0 = std::chrono::steady_clock::now();
    compute_chunk(cfg, ladder, 0); // first chunk, timed and discarded
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double per_config = dt / std::min<std::uint64_t>(kChunk, cfg.configurations);
    unsigned workers = cfg.workers == 0 ? std::thread::hardware_concurrency() : cfg.workers;
    if (workers == 0) workers = 1;
    return per_config * cfg.configurations / workers;
}

void write_meta_json(const std::string& path, const RunConfig& cfg, const EnsembleResult& result) {
    ordered_json j;
    j["version"] = kVersion;
    j["config"] = ordered_json::parse(config_echo(cfg));
    j["results"] = {{"configurations", result.configurations},
                    {"singlet_events", result.singlet_events},
                    {"trio_events", result.trio_events},
                    {"trio_fraction", result.trio_fraction()},
                    {"wall_seconds", result.wall_seconds},
                    {"resumed_configurations", result.resumed_configurations}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("meta: cannot write " + path);
    os << j.dump(2) << '\n';
}

EnsembleResult simulate_to_files(const RunConfig& cfg, std::uint64_t stop_after_configurations) {
    fs::create_directories(cfg.out_dir);
    const EnsembleResult result = run_ensemble(cfg, stop_after_configurations);
    const fs::path dir(cfg.out_dir);
    {
        std::ofstream os(dir / "entropy.csv", std::ios::binary);
        if (!os) throw std::runtime_error("simulate: cannot write entropy.csv");
        write_entropy_csv(os, result.table);
    }
    write_meta_json((dir / "meta.json").string(), cfg, result);
    return result;
}

namespace {

AnalyzeOptions merge_options(const AnalyzeOptions& base, const ordered_json* meta_scaling) {
    AnalyzeOptions opts = base;
    if (meta_scaling != nullptr) {
        if (std::isnan(opts.q_window_min) && meta_scaling->contains("qwin_min"))
            opts.q_window_min = meta_scaling->at("qwin_min").get<double>();
        if (std::isnan(opts.q_window_max) && meta_scaling->contains("qwin_max"))
            opts.q_window_max = meta_scaling->at("qwin_max").get<double>();
        if (opts.fit_block_min == 0.0 && meta_scaling->contains("fit_lmin"))
            opts.fit_block_min = meta_scaling->at("fit_lmin").get<double>();
        if (opts.fit_block_max == 0.0 && meta_scaling->contains("fit_lmax"))
            opts.fit_block_max = meta_scaling->at("fit_lmax").get<double>();
    }
    return opts;
}

} // namespace

ScalingFit analyze_files(const AnalyzeRequest& req) {
    std::ifstream is(req.entropy_csv);
    if (!is) throw std::runtime_error("analyze: cannot open " + req.entropy_csv);
    const EntropyTable table = read_entropy_csv(is);

    fs::path meta_path = req.meta_json.empty()
                             ? fs::path(req.entropy_csv).parent_path() / "meta.json"
                             : fs::path(req.meta_json);
    std::optional<ModelKind> model = req.model;
    double trio_fraction = std::numeric_limits<double>::quiet_NaN();
    const ordered_json* meta_scaling = nullptr;
    ordered_json meta;
    if (fs::exists(meta_path)) {
        std::ifstream ms(meta_path);
        ms >> meta;
        if (!model.has_value()) {
            const auto& c = meta.at("config");
            model = parse_model(c.at("model").get<std::string>(), c.at("two_s").get<int>());
        }
        if (meta.contains("results") && meta["results"].contains("trio_fraction"))
            trio_fraction = meta["results"]["trio_fraction"].get<double>();
        if (meta.contains("config") && meta["config"].contains("scaling"))
            meta_scaling = &meta["config"]["scaling"];
    }
    if (!model.has_value())
        throw std::runtime_error("analyze: no meta.json next to the CSV; pass the model explicitly");

    const AnalyzeOptions opts = merge_options(req.opts, meta_scaling);
    const ScalingFit fit = analyze_table(table, *model, opts, trio_fraction);

    const std::string out = req.fit_json_out.empty()
                                ? (fs::path(req.entropy_csv).parent_path() / "fit.json").string()
                                : req.fit_json_out;
    write_fit_json(out, fit);
    return fit;
}

void write_fit_json(const std::string& path, const ScalingFit& fit) {
    ordered_json j;
    j["model"] = fit.model_name;
    j["two_s"] = fit.two_s;
    ordered_json points = ordered_json::array();
    for (const GammaPoint& p : fit.gamma_points)
        points.push_back({{"q", p.q}, {"gamma", p.gamma}, {"stderr", p.gamma_stderr}});
    j["gamma_points"] = std::move(points);
    j["u"] = fit.quadratic.u;
    j["v"] = fit.quadratic.v;
    j["w"] = fit.quadratic.w;
    j["q_ext"] = fit.q_ext;
    j["delta_q_ext"] = fit.delta_q_ext;
    j["c_eff"] = fit.c_eff;
    j["q_ext_linear_pred"] = fit.q_ext_linear_pred;
    if (std::isnan(fit.trio_fraction))
        j["trio_fraction"] = nullptr;
    else
        j["trio_fraction"] = fit.trio_fraction;
    j["chi2_reduced"] = fit.quadratic.chi2_reduced;
    j["dgamma"] = fit.dgamma;
    j["q_window"] = {fit.q_window.first, fit.q_window.second};
    j["scan_interval"] = {fit.scan_interval.first, fit.scan_interval.second};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("fit: cannot write " + path);
    os << j.dump(2) << '\n';
}

std::vector<SweepRow> read_fit_rows(const std::vector<std::string>& fit_paths_or_dirs) {
    std::vector<SweepRow> rows;
    for (const std::string& entry : fit_paths_or_dirs) {
        fs::path path(entry);
        if (fs::is_directory(path)) path /= "fit.json";
        std::ifstream is(path);
        if (!is) throw std::runtime_error("sweep: cannot open " + path.string());
        ordered_json j;
        is >> j;
        SweepRow row;
        row.model_name = j.at("model").get<std::string>();
        row.c_eff = j.at("c_eff").get<double>();
        row.q_ext = j.at("q_ext").get<double>();
        row.delta_q_ext = j.at("delta_q_ext").get<double>();
        rows.push_back(row);
    }
    return rows;
}

double write_sweep_csv(const std::string& out_csv, const std::vector<SweepRow>& rows) {
    const double k = fit_inverse_ceff_slope(rows);
    std::ofstream os(out_csv, std::ios::binary);
    if (!os) throw std::runtime_error("sweep: cannot write " + out_csv);
    os << "c_eff,q_ext,delta_q_ext,model\n";
    for (const SweepRow& r : rows)
        os << format_g12(r.c_eff) << ',' << format_g12(r.q_ext) << ',' << format_g12(r.delta_q_ext)
           << ',' << r.model_name << '\n';
    return k;
}

} // namespace rsq
