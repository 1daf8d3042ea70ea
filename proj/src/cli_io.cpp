#include "qtb/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "qtb/errors.hpp"

namespace qtb {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) throw ConfigError(what + ": empty number");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ConfigError(what + ": bad number \"" + t + "\"");
    return v;
}

long long parse_ll(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) throw ConfigError(what + ": empty integer");
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw ConfigError(what + ": bad integer \"" + t + "\"");
    return v;
}

uint64_t parse_u64(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) throw ConfigError(what + ": empty integer");
    if (t[0] == '-') throw ConfigError(what + ": must be nonnegative");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw ConfigError(what + ": bad integer \"" + t + "\"");
    return v;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split(s, ','))
        if (!trim(part).empty()) out.push_back(parse_double(part, what));
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

} // namespace

std::string fmt_g17(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* const k_record_header =
    "mode,decoder,distance,sweep_var,sweep_value,trials,failures,ler,ci_low,ci_high,"
    "mean_defects,mean_correction_weight,decoder_failure_rate,runtime_s,base_seed";

std::string records_to_csv(const std::vector<SweepPointRecord>& records) {
    if (records.empty()) throw EmptyDataError("no records to emit");
    std::string out = k_record_header;
    out += '\n';
    for (const auto& r : records) {
        out += r.mode;
        out += ',';
        out += r.decoder;
        out += ',';
        out += std::to_string(r.distance);
        out += ',';
        out += r.sweep_var;
        out += ',';
        out += fmt_g17(r.sweep_value);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += std::to_string(r.failures);
        out += ',';
        out += fmt_g17(r.ler);
        out += ',';
        out += fmt_g17(r.ci_low);
        out += ',';
        out += fmt_g17(r.ci_high);
        out += ',';
        out += fmt_g17(r.mean_defects);
        out += ',';
        out += fmt_g17(r.mean_correction_weight);
        out += ',';
        out += fmt_g17(r.decoder_failure_rate);
        out += ',';
        out += fmt_g17(r.runtime_s);
        out += ',';
        out += std::to_string(r.base_seed);
        out += '\n';
    }
    return out;
}

std::string records_to_json(const std::vector<SweepPointRecord>& records) {
    if (records.empty()) throw EmptyDataError("no records to emit");
    std::string out = "[\n";
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out += "  {\"mode\":\"" + r.mode + "\",\"decoder\":\"" + r.decoder +
               "\",\"distance\":" + std::to_string(r.distance) + ",\"sweep_var\":\"" +
               r.sweep_var + "\",\"sweep_value\":" + fmt_g17(r.sweep_value) +
               ",\"trials\":" + std::to_string(r.trials) +
               ",\"failures\":" + std::to_string(r.failures) + ",\"ler\":" + fmt_g17(r.ler) +
               ",\"ci_low\":" + fmt_g17(r.ci_low) + ",\"ci_high\":" + fmt_g17(r.ci_high) +
               ",\"mean_defects\":" + fmt_g17(r.mean_defects) +
               ",\"mean_correction_weight\":" + fmt_g17(r.mean_correction_weight) +
               ",\"decoder_failure_rate\":" + fmt_g17(r.decoder_failure_rate) +
               ",\"runtime_s\":" + fmt_g17(r.runtime_s) +
               ",\"base_seed\":" + std::to_string(r.base_seed) + "}";
        out += (i + 1 < records.size()) ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

std::vector<SweepPointRecord> parse_records_csv(const std::string& text) {
    std::vector<std::string> lines;
    for (auto& l : split(text, '\n')) {
        std::string t = l;
        if (!t.empty() && t.back() == '\r') t.pop_back();
        if (!t.empty()) lines.push_back(t);
    }
    if (lines.empty()) throw EmptyDataError("empty record file");
    if (lines[0] != k_record_header)
        throw ConfigError("record file header does not match the expected schema");
    std::vector<SweepPointRecord> out;
    for (size_t li = 1; li < lines.size(); ++li) {
        const auto f = split(lines[li], ',');
        if (f.size() != 15)
            throw ConfigError("record row " + std::to_string(li) + ": expected 15 fields");
        SweepPointRecord r;
        r.mode = f[0];
        r.decoder = f[1];
        r.distance = int(parse_ll(f[2], "distance"));
        r.sweep_var = f[3];
        r.sweep_value = parse_double(f[4], "sweep_value");
        r.trials = parse_ll(f[5], "trials");
        r.failures = parse_ll(f[6], "failures");
        r.ler = parse_double(f[7], "ler");
        r.ci_low = parse_double(f[8], "ci_low");
        r.ci_high = parse_double(f[9], "ci_high");
        r.mean_defects = parse_double(f[10], "mean_defects");
        r.mean_correction_weight = parse_double(f[11], "mean_correction_weight");
        r.decoder_failure_rate = parse_double(f[12], "decoder_failure_rate");
        r.runtime_s = parse_double(f[13], "runtime_s");
        r.base_seed = parse_u64(f[14], "base_seed");
        out.push_back(std::move(r));
    }
    return out;
}

void pareto_label(std::vector<ParetoRow>& rows) {
    for (auto& a : rows) {
        a.pareto = true;
        for (const auto& b : rows) {
            if (&a == &b) continue;
            const bool le = b.runtime_s <= a.runtime_s && b.ler <= a.ler;
            const bool lt = b.runtime_s < a.runtime_s || b.ler < a.ler;
            if (le && lt) {
                a.pareto = false;
                break;
            }
        }
    }
}

SharedGrid merge_shared_grid(const std::vector<std::vector<SweepPointRecord>>& tables) {
    if (tables.size() < 2) throw ConfigError("merge requires at least 2 tables");
    auto key_set = [](const std::vector<SweepPointRecord>& t) {
        std::set<std::pair<int, double>> s;
        for (const auto& r : t) s.insert({r.distance, r.sweep_value});
        return s;
    };
    std::set<std::pair<int, double>> shared = key_set(tables[0]);
    for (size_t i = 1; i < tables.size(); ++i) {
        const auto other = key_set(tables[i]);
        std::set<std::pair<int, double>> next;
        std::set_intersection(shared.begin(), shared.end(), other.begin(), other.end(),
                              std::inserter(next, next.begin()));
        shared = std::move(next);
    }
    SharedGrid out;
    out.keys.assign(shared.begin(), shared.end());
    for (const auto& t : tables) {
        long long dropped = 0;
        for (const auto& r : t)
            if (!shared.count({r.distance, r.sweep_value})) ++dropped;
        out.dropped.push_back(dropped);
    }
    if (out.keys.empty()) throw EmptyDataError("tables share no grid points");
    return out;
}

std::string Cell::render() const {
    switch (kind) {
        case Kind::text: return s;
        case Kind::real: return fmt_g17(d);
        case Kind::integer: return std::to_string(i);
        case Kind::unsigned_integer: return std::to_string(u);
    }
    return {};
}

std::string Table::to_csv() const {
    if (rows.empty()) throw EmptyDataError("no rows to emit");
    std::string out;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i].render();
        }
        out += '\n';
    }
    return out;
}

std::string Table::to_json() const {
    if (rows.empty()) throw EmptyDataError("no rows to emit");
    std::string out = "[\n";
    for (size_t ri = 0; ri < rows.size(); ++ri) {
        out += "  {";
        for (size_t i = 0; i < rows[ri].size(); ++i) {
            if (i) out += ',';
            out += '"' + columns[i] + "\":";
            const Cell& c = rows[ri][i];
            if (c.kind == Cell::Kind::text) out += '"' + c.s + '"';
            else out += c.render();
        }
        out += '}';
        out += (ri + 1 < rows.size()) ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

SpecFile parse_spec_text(const std::string& text) {
    SpecFile sf;
    int lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("spec line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("spec line " + std::to_string(lineno) + ": empty key or value");

        try {
        if (key == "mode") {
            if (val == "pauli") sf.sweep.mode = Mode::pauli;
            else if (val == "gkp") sf.sweep.mode = Mode::gkp;
            else throw ConfigError("unknown mode: " + val);
        } else if (key == "decoders") {
            sf.sweep.decoders.clear();
            for (const auto& part : split(val, ',')) {
                const std::string name = trim(part);
                if (name.empty()) continue;
                auto kind = decoder_from_name(name);
                if (!kind) throw ConfigError("unknown decoder name: " + name);
                sf.sweep.decoders.push_back(*kind);
            }
            if (sf.sweep.decoders.empty()) throw ConfigError("decoders: empty list");
        } else if (key == "distances") {
            sf.sweep.distances.clear();
            for (const auto& part : split(val, ','))
                if (!trim(part).empty())
                    sf.sweep.distances.push_back(int(parse_ll(part, "distances")));
            if (sf.sweep.distances.empty()) throw ConfigError("distances: empty list");
        } else if (key == "grid.start") {
            sf.sweep.grid.start = parse_double(val, key);
        } else if (key == "grid.stop") {
            sf.sweep.grid.stop = parse_double(val, key);
        } else if (key == "grid.step") {
            sf.sweep.grid.step = parse_double(val, key);
        } else if (key == "trials") {
            sf.sweep.trials = parse_ll(val, key);
        } else if (key == "seed") {
            sf.sweep.base_seed = parse_u64(val, key);
        } else if (key == "threads") {
            sf.sweep.threads = int(parse_ll(val, key));
        } else if (key == "noise.p") {
            sf.sweep.noise.p = parse_double(val, key);
        } else if (key == "noise.sigma") {
            sf.sweep.noise.sigma = parse_double(val, key);
        } else if (key == "noise.p_gate") {
            sf.sweep.noise.p_gate = parse_double(val, key);
        } else if (key == "noise.p_meas") {
            sf.sweep.noise.p_meas = parse_double(val, key);
        } else if (key == "noise.p_idle") {
            sf.sweep.noise.p_idle = parse_double(val, key);
        } else if (key == "noise.p_loss") {
            sf.sweep.noise.p_loss = parse_double(val, key);
        } else if (key == "loss_map") {
            sf.loss_map_path = val;
        } else if (key == "guide_table") {
            sf.guide_table_path = val;
        } else if (key == "component") {
            sf.component = val;
        } else if (key == "levels") {
            sf.levels = parse_double_list(val, key);
        } else if (key == "resamples") {
            sf.resamples = parse_ll(val, key);
            if (sf.resamples < 1) throw ConfigError("resamples must be >= 1");
        } else if (key == "reference") {
            sf.reference = parse_double(val, key);
            sf.reference_set = true;
        } else {
            throw ConfigError("unknown spec key: " + key);
        }
        } catch (const ConfigError& e) {
            throw ConfigError("spec line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return sf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SpecFile load_spec_file(const std::string& path) {
    SpecFile sf = parse_spec_text(read_text_file(path));
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q.string() : (base / q).string();
    };
    if (!sf.loss_map_path.empty()) {
        const std::string text = read_text_file(resolve(sf.loss_map_path));
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("loss_map: ") + e.what());
        }
        if (!j.is_array()) throw ConfigError("loss_map: expected a JSON array");
        sf.sweep.noise.loss_map.clear();
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError("loss_map: entries must be numbers");
            sf.sweep.noise.loss_map.push_back(v.get<double>());
        }
    }
    if (!sf.guide_table_path.empty()) {
        try {
            sf.guide_storage = load_guide_table(resolve(sf.guide_table_path));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("guide_table: ") + e.what());
        }
        sf.has_guide = true;
        sf.sweep.guide = &sf.guide_storage;
    }
    return sf;
}

void apply_env_overrides(SpecFile& sf) {
    if (const char* s = std::getenv("QTB_SEED"))
        sf.sweep.base_seed = parse_u64(s, "QTB_SEED");
    if (const char* s = std::getenv("QTB_THREADS")) {
        const long long t = parse_ll(s, "QTB_THREADS");
        if (t < 0) throw ConfigError("QTB_THREADS must be >= 0");
        sf.sweep.threads = int(t);
    }
}

} // namespace qtb
