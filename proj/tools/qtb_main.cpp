#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "qtb/cli_io.hpp"
#include "qtb/errors.hpp"
#include "qtb/harness.hpp"
#include "qtb/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string spec_path, out_dir;
    std::string format = "csv";
    int threads = 0;
    bool threads_set = false;
    uint64_t seed = 0;
    bool seed_set = false;
    bool stable = false, strict = false;
};

std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + p.string());
    std::printf("wrote %s\n", p.string().c_str());
}

fs::path artifact_path(const CommonArgs& a, const std::string& command, const std::string& mode,
                       const std::string& suffix) {
    std::string name = command + "_" + mode + suffix;
    if (!a.stable) name += "_" + utc_timestamp();
    name += "." + a.format;
    return fs::path(a.out_dir) / name;
}

qtb::SpecFile prepare_spec(const CommonArgs& a) {
    qtb::SpecFile sf = qtb::load_spec_file(a.spec_path);
    qtb::apply_env_overrides(sf);
    if (a.threads_set) sf.sweep.threads = a.threads;
    if (a.seed_set) sf.sweep.base_seed = a.seed;
    return sf;
}

void report_skips(const std::vector<qtb::SkipEntry>& skips, bool strict) {
    for (const auto& s : skips)
        std::fprintf(stderr, "warning: %s: %s\n", s.decoder.c_str(), s.reason.c_str());
    if (strict && !skips.empty())
        throw qtb::GuideMissingError("decoder skipped under --strict: " + skips[0].decoder);
}

void emit_records_file(const CommonArgs& a, const std::string& command, const std::string& mode,
                       const std::string& suffix, std::vector<qtb::SweepPointRecord>& records) {
    if (a.stable)
        for (auto& r : records) r.runtime_s = 0.0;
    const std::string content =
        a.format == "json" ? qtb::records_to_json(records) : qtb::records_to_csv(records);
    write_file(artifact_path(a, command, mode, suffix), content);
}

void emit_table_file(const CommonArgs& a, const std::string& command, const std::string& mode,
                     const std::string& suffix, const qtb::Table& t) {
    write_file(artifact_path(a, command, mode, suffix),
               a.format == "json" ? t.to_json() : t.to_csv());
}

std::vector<std::string> active_decoders(const qtb::SweepSpec& sweep,
                                         const std::vector<qtb::SkipEntry>& skips) {
    std::vector<std::string> names;
    for (auto kind : sweep.decoders) {
        const std::string n = qtb::decoder_name(kind);
        bool skipped = false;
        for (const auto& s : skips)
            if (s.decoder == n) skipped = true;
        if (!skipped) names.push_back(n);
    }
    return names;
}

void cmd_sweep(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    qtb::SweepResult res = qtb::run_sweep(sf.sweep);
    report_skips(res.skips, a.strict);
    emit_records_file(a, "sweep", qtb::mode_name(sf.sweep.mode), "", res.records);
}

void cmd_pareto(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    qtb::SweepResult res = qtb::run_sweep(sf.sweep);
    report_skips(res.skips, a.strict);
    if (a.stable)
        for (auto& r : res.records) r.runtime_s = 0.0;
    const std::vector<double> xs = sf.sweep.grid.points();
    const double ref = sf.reference_set ? sf.reference : xs[0];
    const int d0 = sf.sweep.distances.at(0);

    std::vector<qtb::ParetoRow> rows;
    for (const auto& name : active_decoders(sf.sweep, res.skips)) {
        const qtb::SweepPointRecord* hit = nullptr;
        for (const auto& r : res.records)
            if (r.decoder == name && r.distance == d0 && r.sweep_value == ref) hit = &r;
        if (!hit)
            throw qtb::ConfigError("pareto: reference point " + qtb::fmt_g17(ref) +
                                   " missing for decoder " + name);
        rows.push_back({name, hit->runtime_s, hit->ler, false});
    }
    qtb::pareto_label(rows);

    qtb::Table t;
    t.columns = {"decoder", "runtime_s", "ler", "pareto"};
    for (const auto& r : rows)
        t.rows.push_back({qtb::Cell(r.decoder), qtb::Cell(r.runtime_s), qtb::Cell(r.ler),
                          qtb::Cell(int(r.pareto))});
    emit_table_file(a, "pareto", qtb::mode_name(sf.sweep.mode), "", t);
}

void cmd_crossing_bootstrap(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    if (sf.sweep.distances.size() < 2)
        throw qtb::ConfigError("crossing-bootstrap needs at least 2 distances");
    qtb::SweepResult res = qtb::run_sweep(sf.sweep);
    report_skips(res.skips, a.strict);
    const std::vector<double> xs = sf.sweep.grid.points();

    qtb::Table t;
    t.columns = {"decoder", "d_small",     "d_large",        "median", "q05",
                 "q95",     "valid_count", "total_resamples"};
    uint64_t tag = qtb::rng::mix(sf.sweep.base_seed, 0x63726f7373ull);
    for (const auto& name : active_decoders(sf.sweep, res.skips)) {
        for (size_t i = 0; i < sf.sweep.distances.size(); ++i) {
            for (size_t j = i + 1; j < sf.sweep.distances.size(); ++j) {
                const int da = sf.sweep.distances[i], db = sf.sweep.distances[j];
                const auto ca = qtb::curve_estimates(res.records, name, da);
                const auto cb = qtb::curve_estimates(res.records, name, db);
                const uint64_t seed =
                    qtb::rng::mix(qtb::rng::mix(tag, std::hash<std::string>{}(name)),
                                  uint64_t(da) * 256 + uint64_t(db));
                const qtb::CrossingSummary cs =
                    qtb::bootstrap_crossings(xs, ca, cb, sf.resamples, seed);
                t.rows.push_back({qtb::Cell(name), qtb::Cell(da), qtb::Cell(db),
                                  qtb::Cell(cs.median), qtb::Cell(cs.q05), qtb::Cell(cs.q95),
                                  qtb::Cell(cs.valid_count), qtb::Cell(cs.total_resamples)});
            }
        }
    }
    emit_table_file(a, "crossing-bootstrap", qtb::mode_name(sf.sweep.mode), "", t);
}

void cmd_distance_gain(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    if (sf.sweep.distances.size() < 2)
        throw qtb::ConfigError("distance-gain needs at least 2 distances");
    qtb::SweepResult res = qtb::run_sweep(sf.sweep);
    report_skips(res.skips, a.strict);
    const std::vector<double> xs = sf.sweep.grid.points();

    qtb::Table t;
    t.columns = {"decoder",   "d_small",   "d_large", "sweep_var",
                 "sweep_value", "ler_small", "ler_large", "ratio"};
    const std::string var = qtb::sweep_var_name(sf.sweep.mode);
    for (const auto& name : active_decoders(sf.sweep, res.skips)) {
        for (size_t i = 0; i < sf.sweep.distances.size(); ++i) {
            for (size_t j = i + 1; j < sf.sweep.distances.size(); ++j) {
                const int da = sf.sweep.distances[i], db = sf.sweep.distances[j];
                const auto ca = qtb::curve_estimates(res.records, name, da);
                const auto cb = qtb::curve_estimates(res.records, name, db);
                const auto ratios = qtb::distance_gain(ca, cb);
                for (size_t k = 0; k < ratios.size(); ++k)
                    t.rows.push_back({qtb::Cell(name), qtb::Cell(da), qtb::Cell(db),
                                      qtb::Cell(var), qtb::Cell(xs[k]), qtb::Cell(ca[k].ler),
                                      qtb::Cell(cb[k].ler), qtb::Cell(ratios[k])});
            }
        }
    }
    emit_table_file(a, "distance-gain", qtb::mode_name(sf.sweep.mode), "", t);
}

void cmd_ablation(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    if (sf.component.empty())
        throw qtb::ConfigError("ablation requires a component key in the spec file");
    qtb::AblationResult res = qtb::run_ablation(sf.sweep, sf.component, sf.levels);
    report_skips(res.skips, a.strict);
    emit_records_file(a, "ablation", qtb::mode_name(sf.sweep.mode), "", res.records);

    qtb::Table t;
    t.columns = {"decoder", "distance", "component", "slope"};
    for (const auto& s : res.slopes)
        t.rows.push_back(
            {qtb::Cell(s.decoder), qtb::Cell(s.distance), qtb::Cell(sf.component),
             qtb::Cell(s.slope)});
    emit_table_file(a, "ablation", qtb::mode_name(sf.sweep.mode), "_slopes", t);
}

void cmd_rank_stability(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    if (sf.sweep.decoders.size() < 2)
        throw qtb::ConfigError("rank-stability needs at least 2 decoders");
    qtb::SweepResult res = qtb::run_sweep(sf.sweep);
    report_skips(res.skips, a.strict);
    const std::vector<double> xs = sf.sweep.grid.points();
    const std::string var = qtb::sweep_var_name(sf.sweep.mode);

    qtb::Table t;
    t.columns = {"decoder", "distance", "sweep_var", "sweep_value", "q05", "q50", "q95"};
    for (int d : sf.sweep.distances) {
        std::vector<std::string> names;
        std::vector<std::vector<qtb::PointEstimate>> curves;
        for (const auto& name : active_decoders(sf.sweep, res.skips)) {
            auto c = qtb::curve_estimates(res.records, name, d);
            if (!c.empty()) {
                names.push_back(name);
                curves.push_back(std::move(c));
            }
        }
        if (names.size() < 2)
            throw qtb::EmptyDataError("rank-stability: fewer than 2 decoders yielded records");
        const uint64_t seed =
            qtb::rng::mix(qtb::rng::mix(sf.sweep.base_seed, 0x72616e6bull), uint64_t(d));
        const auto bands = qtb::rank_stability(names, curves, sf.resamples, seed);
        for (size_t di = 0; di < names.size(); ++di)
            for (size_t k = 0; k < xs.size(); ++k)
                t.rows.push_back({qtb::Cell(names[di]), qtb::Cell(d), qtb::Cell(var),
                                  qtb::Cell(xs[k]), qtb::Cell(bands[di][k].q05),
                                  qtb::Cell(bands[di][k].q50), qtb::Cell(bands[di][k].q95)});
    }
    emit_table_file(a, "rank-stability", qtb::mode_name(sf.sweep.mode), "", t);
}

void cmd_effect_size(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    if (sf.sweep.decoders.size() < 2)
        throw qtb::ConfigError("effect-size needs at least 2 decoders");
    qtb::SweepResult res = qtb::run_sweep(sf.sweep);
    report_skips(res.skips, a.strict);

    qtb::Table t;
    t.columns = {"decoder_a", "decoder_b", "distance", "mean_delta", "ci_low", "ci_high"};
    for (int d : sf.sweep.distances) {
        const auto names = active_decoders(sf.sweep, res.skips);
        for (size_t i = 0; i < names.size(); ++i) {
            for (size_t j = i + 1; j < names.size(); ++j) {
                const auto ca = qtb::curve_estimates(res.records, names[i], d);
                const auto cb = qtb::curve_estimates(res.records, names[j], d);
                if (ca.empty() || cb.empty()) continue;
                const uint64_t seed = qtb::rng::mix(
                    qtb::rng::mix(qtb::rng::mix(sf.sweep.base_seed, 0xeffec7ull), uint64_t(d)),
                    uint64_t(i) * 64 + uint64_t(j));
                const qtb::EffectSize es = qtb::effect_size(ca, cb, sf.resamples, seed);
                t.rows.push_back({qtb::Cell(names[i]), qtb::Cell(names[j]), qtb::Cell(d),
                                  qtb::Cell(es.mean_delta), qtb::Cell(es.ci_low),
                                  qtb::Cell(es.ci_high)});
            }
        }
    }
    emit_table_file(a, "effect-size", qtb::mode_name(sf.sweep.mode), "", t);
}

void cmd_fidelity(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    std::vector<qtb::SkipEntry> skips;
    for (auto kind : sf.sweep.decoders)
        if (kind == qtb::DecoderKind::guided_mwpm && sf.sweep.guide == nullptr)
            skips.push_back({qtb::decoder_name(kind), "no guide table resolved; decoder skipped"});
    report_skips(skips, a.strict);

    int k = sf.sweep.threads;
    if (k < 2) {
        const unsigned hc = std::thread::hardware_concurrency();
        k = hc >= 2 ? int(hc) : 2;
    }
    qtb::FidelityReport rep = qtb::run_fidelity_study(sf.sweep, 1, k);
    if (a.stable) {
        rep.t_serial = rep.t_parallel = 0.0;
        rep.speedup = rep.throughput = 0.0;
    }

    qtb::Table t;
    t.columns = {"t_serial_s",     "t_parallel_s",  "speedup",        "throughput_trials_per_s",
                 "mean_abs_delta", "max_abs_delta", "pearson",        "serial_threads",
                 "parallel_threads", "total_trials"};
    t.rows.push_back({qtb::Cell(rep.t_serial), qtb::Cell(rep.t_parallel), qtb::Cell(rep.speedup),
                      qtb::Cell(rep.throughput), qtb::Cell(rep.mean_abs), qtb::Cell(rep.max_abs),
                      qtb::Cell(rep.pearson), qtb::Cell(rep.serial_threads),
                      qtb::Cell(rep.parallel_threads), qtb::Cell(rep.total_trials)});
    emit_table_file(a, "fidelity", qtb::mode_name(sf.sweep.mode), "", t);
}

void cmd_dense_window(const CommonArgs& a) {
    qtb::SpecFile sf = prepare_spec(a);
    qtb::DenseWindowResult res = qtb::run_dense_window(sf.sweep);
    report_skips(res.skips, a.strict);
    emit_records_file(a, "dense-window", qtb::mode_name(sf.sweep.mode), "_records", res.records);

    qtb::Table t;
    t.columns = {"decoder", "d_small", "d_large", "crossing"};
    for (const auto& c : res.crossings)
        t.rows.push_back(
            {qtb::Cell(c.decoder), qtb::Cell(c.d_small), qtb::Cell(c.d_large), qtb::Cell(c.value)});
    emit_table_file(a, "dense-window", qtb::mode_name(sf.sweep.mode), "_crossings", t);
}

void cmd_dump_layout(int distance, const std::string& out_dir) {
    const qtb::CodeLayout layout = qtb::build_code(distance);
    const fs::path p = fs::path(out_dir) / ("layout_d" + std::to_string(distance) + ".json");
    write_file(p, qtb::layout_to_json(layout));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"surface-code decoder benchmark runner"};
    app.require_subcommand(1);

    CommonArgs args;
    int dump_distance = 3;
    std::string dump_out;

    std::vector<std::pair<CLI::App*, std::function<void()>>> handlers;
    auto add_analysis = [&](const std::string& name, const std::string& desc,
                            std::function<void(const CommonArgs&)> fn) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--spec", args.spec_path, "sweep spec file")->required();
        sub->add_option("--out", args.out_dir, "output directory")->required();
        sub->add_option("--format", args.format, "artifact format")
            ->check(CLI::IsMember({"csv", "json"}));
        CLI::Option* th = sub->add_option("--threads", args.threads, "worker thread count");
        CLI::Option* sd = sub->add_option("--seed", args.seed, "base seed");
        sub->add_flag("--stable", args.stable, "fixed artifact names, zeroed timings");
        sub->add_flag("--strict", args.strict, "escalate skipped decoders to an error");
        handlers.emplace_back(sub, [&args, th, sd, fn] {
            args.threads_set = th->count() > 0;
            args.seed_set = sd->count() > 0;
            fn(args);
        });
    };

    add_analysis("sweep", "Monte Carlo sweep records", cmd_sweep);
    add_analysis("pareto", "runtime/LER dominance at a reference point", cmd_pareto);
    add_analysis("crossing-bootstrap", "bootstrap crossing quantiles per distance pair",
                 cmd_crossing_bootstrap);
    add_analysis("distance-gain", "LER ratio between distances", cmd_distance_gain);
    add_analysis("ablation", "one-channel sensitivity sweep with OLS slope", cmd_ablation);
    add_analysis("rank-stability", "bootstrap rank bands per decoder", cmd_rank_stability);
    add_analysis("effect-size", "mean pairwise LER difference with bootstrap CI",
                 cmd_effect_size);
    add_analysis("fidelity", "serial vs threaded agreement and speedup", cmd_fidelity);
    add_analysis("dense-window", "dense sweep plus crossing table", cmd_dense_window);

    CLI::App* dump = app.add_subcommand("dump-layout", "write a code layout as JSON");
    dump->add_option("--distance", dump_distance, "code distance")->required();
    dump->add_option("--out", dump_out, "output directory")->required();
    handlers.emplace_back(dump, [&] { cmd_dump_layout(dump_distance, dump_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        for (auto& [sub, fn] : handlers)
            if (sub->parsed()) fn();
        return 0;
    } catch (const qtb::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qtb::EmptyDataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const qtb::GuideMissingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
