#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qtb/cli_io.hpp"
#include "qtb/errors.hpp"

using qtb::SweepPointRecord;

namespace {

SweepPointRecord sample_record() {
    SweepPointRecord r;
    r.mode = "gkp";
    r.decoder = "guided-mwpm";
    r.distance = 5;
    r.sweep_var = "sigma";
    r.sweep_value = 0.1 + 0.2;  // deliberately not a round double
    r.trials = 20000;
    r.failures = 137;
    r.ler = 137.0 / 20000.0;
    r.ci_low = 0.0057938271604938276;
    r.ci_high = 0.0081104938271604946;
    r.mean_defects = 3.1415926535897931;
    r.mean_correction_weight = 2.7182818284590451;
    r.decoder_failure_rate = 0.0001;
    r.runtime_s = 1.5e-3;
    r.base_seed = 18446744073709551615ull;
    return r;
}

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / "qtb_cli_io_test";
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("seventeen digit formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-17, 1e300, -0.0, 123456789.123456789}) {
        std::string s = qtb::fmt_g17(v);
        REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    }
    REQUIRE(qtb::fmt_g17(std::nan("")) == "NaN");
    REQUIRE(qtb::fmt_g17(0.5) == "0.5");
}

TEST_CASE("record csv round-trips bit-exactly") {
    std::vector<SweepPointRecord> recs{sample_record(), sample_record()};
    recs[1].decoder = "uf";
    recs[1].ler = std::nan("");
    recs[1].runtime_s = 0.0;
    std::string csv = qtb::records_to_csv(recs);
    std::vector<SweepPointRecord> back = qtb::parse_records_csv(csv);
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        REQUIRE(back[i].mode == recs[i].mode);
        REQUIRE(back[i].decoder == recs[i].decoder);
        REQUIRE(back[i].distance == recs[i].distance);
        REQUIRE(back[i].sweep_var == recs[i].sweep_var);
        REQUIRE(back[i].sweep_value == recs[i].sweep_value);
        REQUIRE(back[i].trials == recs[i].trials);
        REQUIRE(back[i].failures == recs[i].failures);
        REQUIRE(back[i].ci_low == recs[i].ci_low);
        REQUIRE(back[i].ci_high == recs[i].ci_high);
        REQUIRE(back[i].mean_defects == recs[i].mean_defects);
        REQUIRE(back[i].mean_correction_weight == recs[i].mean_correction_weight);
        REQUIRE(back[i].decoder_failure_rate == recs[i].decoder_failure_rate);
        REQUIRE(back[i].runtime_s == recs[i].runtime_s);
        REQUIRE(back[i].base_seed == recs[i].base_seed);
    }
    REQUIRE(back[0].ler == recs[0].ler);
    REQUIRE(std::isnan(back[1].ler));
    // serialization is itself deterministic
    REQUIRE(csv == qtb::records_to_csv(recs));

    REQUIRE_THROWS_AS(qtb::records_to_csv({}), qtb::EmptyDataError);
    REQUIRE_THROWS_AS(qtb::parse_records_csv("bogus header\n1,2,3\n"), qtb::ConfigError);
    std::string broken = csv.substr(0, csv.find('\n') + 1) + "a,b,c\n";
    REQUIRE_THROWS_AS(qtb::parse_records_csv(broken), qtb::ConfigError);
}

TEST_CASE("record json lists every field") {
    std::string j = qtb::records_to_json({sample_record()});
    for (const char* key :
         {"\"mode\"", "\"decoder\"", "\"distance\"", "\"sweep_var\"", "\"sweep_value\"",
          "\"trials\"", "\"failures\"", "\"ler\"", "\"ci_low\"", "\"ci_high\"",
          "\"mean_defects\"", "\"mean_correction_weight\"", "\"decoder_failure_rate\"",
          "\"runtime_s\"", "\"base_seed\""})
        REQUIRE(j.find(key) != std::string::npos);
    REQUIRE_THROWS_AS(qtb::records_to_json({}), qtb::EmptyDataError);
}

TEST_CASE("pareto labels keep the dominance frontier") {
    std::vector<qtb::ParetoRow> rows{
        {"mwpm", 1.95e-4, 0.0083, false},
        {"uf", 6.1e-5, 0.0091, false},
        {"bp", 8.8e-5, 0.0218, false},
        {"guided-mwpm", 2.1e-4, 0.0080, false},
    };
    qtb::pareto_label(rows);
    REQUIRE(rows[0].pareto);        // fastest among the low-ler pair
    REQUIRE(rows[1].pareto);        // fastest overall
    REQUIRE_FALSE(rows[2].pareto);  // dominated by uf on both axes
    REQUIRE(rows[3].pareto);        // lowest ler
}

TEST_CASE("pareto handles duplicates and single rows") {
    std::vector<qtb::ParetoRow> rows{{"a", 1.0, 0.1, false}, {"b", 1.0, 0.1, false}};
    qtb::pareto_label(rows);
    REQUIRE(rows[0].pareto);
    REQUIRE(rows[1].pareto);
    std::vector<qtb::ParetoRow> one{{"solo", 2.0, 0.5, false}};
    qtb::pareto_label(one);
    REQUIRE(one[0].pareto);
    std::vector<qtb::ParetoRow> chain{{"a", 1.0, 0.3, false}, {"b", 2.0, 0.2, false},
                                      {"c", 3.0, 0.1, false}, {"d", 3.0, 0.3, false}};
    qtb::pareto_label(chain);
    REQUIRE(chain[0].pareto);
    REQUIRE(chain[1].pareto);
    REQUIRE(chain[2].pareto);
    REQUIRE_FALSE(chain[3].pareto);
}

TEST_CASE("shared grid merge keeps exact intersections") {
    auto mk = [](int d, double x) {
        SweepPointRecord r = sample_record();
        r.distance = d;
        r.sweep_value = x;
        return r;
    };
    std::vector<SweepPointRecord> t1{mk(3, 0.1), mk(3, 0.2), mk(5, 0.1)};
    std::vector<SweepPointRecord> t2{mk(3, 0.1), mk(3, 0.2), mk(5, 0.1)};
    qtb::SharedGrid g = qtb::merge_shared_grid({t1, t2});
    REQUIRE(g.keys.size() == 3);
    const std::vector<long long> none{0, 0};
    REQUIRE(g.dropped == none);

    std::vector<SweepPointRecord> t3{mk(3, 0.2), mk(5, 0.3)};
    g = qtb::merge_shared_grid({t1, t3});
    REQUIRE(g.keys.size() == 1);
    REQUIRE(g.keys[0].first == 3);
    REQUIRE(g.keys[0].second == 0.2);
    const std::vector<long long> two_one{2, 1};
    REQUIRE(g.dropped == two_one);

    std::vector<SweepPointRecord> t4{mk(7, 0.9)};
    REQUIRE_THROWS_AS(qtb::merge_shared_grid({t1, t4}), qtb::EmptyDataError);
    REQUIRE_THROWS_AS(qtb::merge_shared_grid({t1}), qtb::ConfigError);
}

TEST_CASE("generic tables render csv and json") {
    qtb::Table t;
    t.columns = {"name", "count", "value"};
    t.rows.push_back({qtb::Cell("alpha"), qtb::Cell(3), qtb::Cell(0.5)});
    t.rows.push_back({qtb::Cell("beta"), qtb::Cell(7ll), qtb::Cell(std::nan(""))});
    std::string csv = t.to_csv();
    REQUIRE(csv == "name,count,value\nalpha,3,0.5\nbeta,7,NaN\n");
    std::string j = t.to_json();
    REQUIRE(j.find("\"name\":\"alpha\"") != std::string::npos);
    REQUIRE(j.find("\"count\":7") != std::string::npos);
    REQUIRE(j.find("\"value\":NaN") != std::string::npos);

    qtb::Table empty;
    empty.columns = {"a"};
    REQUIRE_THROWS_AS(empty.to_csv(), qtb::EmptyDataError);
    REQUIRE_THROWS_AS(empty.to_json(), qtb::EmptyDataError);
}

TEST_CASE("spec text parses every key") {
    const char* text =
        "# benchmark configuration\n"
        "mode = gkp\n"
        "decoders = mwpm, uf, bp, guided-mwpm\n"
        "distances = 3, 5, 7\n"
        "grid.start = 0.1   # inline comment\n"
        "grid.stop = 0.3\n"
        "grid.step = 0.05\n"
        "trials = 5000\n"
        "seed = 424242\n"
        "threads = 3\n"
        "noise.sigma = 0.2\n"
        "noise.p_gate = 0.004\n"
        "noise.p_meas = 0.011\n"
        "noise.p_idle = 0.006\n"
        "noise.p_loss = 0.007\n"
        "component = idle\n"
        "levels = 0.0, 0.005, 0.01\n"
        "resamples = 500\n"
        "reference = 0.15\n";
    qtb::SpecFile sf = qtb::parse_spec_text(text);
    REQUIRE(sf.sweep.mode == qtb::Mode::gkp);
    REQUIRE(sf.sweep.decoders.size() == 4);
    REQUIRE(sf.sweep.decoders[3] == qtb::DecoderKind::guided_mwpm);
    const std::vector<int> dists{3, 5, 7};
    REQUIRE(sf.sweep.distances == dists);
    REQUIRE(sf.sweep.grid.start == 0.1);
    REQUIRE(sf.sweep.grid.stop == 0.3);
    REQUIRE(sf.sweep.grid.step == 0.05);
    REQUIRE(sf.sweep.trials == 5000);
    REQUIRE(sf.sweep.base_seed == 424242);
    REQUIRE(sf.sweep.threads == 3);
    REQUIRE(sf.sweep.noise.sigma == 0.2);
    REQUIRE(sf.sweep.noise.p_gate == 0.004);
    REQUIRE(sf.sweep.noise.p_meas == 0.011);
    REQUIRE(sf.sweep.noise.p_idle == 0.006);
    REQUIRE(sf.sweep.noise.p_loss == 0.007);
    REQUIRE(sf.component == "idle");
    const std::vector<double> lv{0.0, 0.005, 0.01};
    REQUIRE(sf.levels == lv);
    REQUIRE(sf.resamples == 500);
    REQUIRE(sf.reference == 0.15);
    REQUIRE(sf.reference_set);
    REQUIRE_FALSE(sf.has_guide);
}

TEST_CASE("spec text rejects malformed input with line numbers") {
    REQUIRE_THROWS_AS(qtb::parse_spec_text("bogus_key = 1\n"), qtb::ConfigError);
    REQUIRE_THROWS_AS(qtb::parse_spec_text("mode = banana\n"), qtb::ConfigError);
    REQUIRE_THROWS_AS(qtb::parse_spec_text("trials = x\n"), qtb::ConfigError);
    REQUIRE_THROWS_AS(qtb::parse_spec_text("decoders = mwpm, nope\n"), qtb::ConfigError);
    REQUIRE_THROWS_AS(qtb::parse_spec_text("no equals sign\n"), qtb::ConfigError);
    REQUIRE_THROWS_AS(qtb::parse_spec_text("trials =\n"), qtb::ConfigError);
    try {
        qtb::parse_spec_text("mode = pauli\nbogus_key = 1\n");
        REQUIRE(false);
    } catch (const qtb::ConfigError& e) {
        REQUIRE(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("spec files resolve guide tables relative to their directory") {
    auto dir = temp_dir();
    {
        std::ofstream g(dir / "guide.json");
        g << R"({"0-1": 2.0, "3-B": 0.5})";
    }
    {
        std::ofstream s(dir / "spec.txt");
        s << "mode = pauli\ndecoders = guided-mwpm\ndistances = 3\n"
             "grid.start = 0.05\ngrid.stop = 0.05\ngrid.step = 0.01\n"
             "trials = 10\nnoise.p = 0.05\nguide_table = guide.json\n";
    }
    qtb::SpecFile sf = qtb::load_spec_file((dir / "spec.txt").string());
    REQUIRE(sf.has_guide);
    REQUIRE(sf.sweep.guide != nullptr);
    REQUIRE(sf.sweep.guide->pair_factor(0, 1) == 2.0);
    REQUIRE(sf.sweep.guide->boundary_factor(3) == 0.5);

    {
        std::ofstream s(dir / "spec_bad.txt");
        s << "mode = pauli\ndecoders = mwpm\ndistances = 3\n"
             "grid.start = 0.05\ngrid.stop = 0.05\ngrid.step = 0.01\n"
             "trials = 10\nguide_table = missing.json\n";
    }
    REQUIRE_THROWS_AS(qtb::load_spec_file((dir / "spec_bad.txt").string()), qtb::ConfigError);
    REQUIRE_THROWS_AS(qtb::load_spec_file((dir / "never_written.txt").string()),
                      qtb::ConfigError);
}

TEST_CASE("spec files can carry a per-qubit loss map") {
    auto dir = temp_dir();
    {
        std::ofstream f(dir / "loss.json");
        f << "[0.001, 0.002, 0.003, 0.001, 0.002, 0.003, 0.001, 0.002, 0.003]";
    }
    {
        std::ofstream s(dir / "spec_loss.txt");
        s << "mode = gkp\ndecoders = mwpm\ndistances = 3\n"
             "grid.start = 0.2\ngrid.stop = 0.2\ngrid.step = 0.1\n"
             "trials = 10\nnoise.sigma = 0.2\nloss_map = loss.json\n";
    }
    qtb::SpecFile sf = qtb::load_spec_file((dir / "spec_loss.txt").string());
    REQUIRE(sf.sweep.noise.loss_map.size() == 9);
    REQUIRE(sf.sweep.noise.loss_map[2] == 0.003);
}

TEST_CASE("environment variables override spec values") {
    qtb::SpecFile sf;
    sf.sweep.base_seed = 1;
    sf.sweep.threads = 1;
    setenv("QTB_SEED", "999", 1);
    setenv("QTB_THREADS", "6", 1);
    qtb::apply_env_overrides(sf);
    REQUIRE(sf.sweep.base_seed == 999);
    REQUIRE(sf.sweep.threads == 6);
    setenv("QTB_THREADS", "-2", 1);
    REQUIRE_THROWS_AS(qtb::apply_env_overrides(sf), qtb::ConfigError);
    setenv("QTB_SEED", "junk", 1);
    REQUIRE_THROWS_AS(qtb::apply_env_overrides(sf), qtb::ConfigError);
    unsetenv("QTB_SEED");
    unsetenv("QTB_THREADS");
    uint64_t before = sf.sweep.base_seed;
    qtb::apply_env_overrides(sf);
    REQUIRE(sf.sweep.base_seed == before);
}

TEST_CASE("schema version constant is wired") {
    REQUIRE(qtb::k_schema_version == 1);
    REQUIRE(std::string(qtb::k_record_header).rfind("mode,decoder,distance", 0) == 0);
}
