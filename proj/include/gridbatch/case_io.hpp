#pragma once

// =============================================================================
// gridbatch - case and scenario file formats
//
// Supported case inputs:
//   * MATPOWER subset: baseMVA plus the bus/gen/branch matrices. Reactive
//     limits, areas and cost tables are read and ignored.
//   * Native JSON: {base_mva, buses[], branches[], generators[]} with field
//     names matching the structs in grid.hpp. Round-trips exactly.
// Scenario inputs:
//   * CSV, one row per task, columns "bus:<id>:p" / "bus:<id>:q" (MW / MVAr).
//   * Outage list: one branch index per line, '#' comments.
// =============================================================================

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridbatch/core.hpp"
#include "gridbatch/grid.hpp"

namespace gridbatch {

namespace detail {

struct MpTable {
    std::vector<std::vector<real_t>> rows;
    long line = 0;  // where the table starts, for diagnostics
};

inline real_t parse_number(std::string_view tok, long line) {
    real_t v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw ParseError("malformed numeric field '" + std::string(tok) + "'", line);
    return v;
}

/// Tokenizer for the MATPOWER subset: strips '%' comments, splits the
/// remaining text into number/punctuation/identifier tokens per line.
struct MpScanner {
    struct Tok {
        std::string text;
        long line;
    };
    std::vector<Tok> toks;
    size_t pos = 0;

    explicit MpScanner(const std::string& text) {
        long line = 1;
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) {
                toks.push_back({cur, line});
                cur.clear();
            }
        };
        for (size_t i = 0; i < text.size(); ++i) {
            const char ch = text[i];
            if (ch == '%') {  // comment to end of line
                flush();
                while (i < text.size() && text[i] != '\n') ++i;
                ++line;
                continue;
            }
            if (ch == '\n') {
                flush();
                ++line;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
                flush();
                continue;
            }
            if (ch == '[' || ch == ']' || ch == ';' || ch == '=') {
                flush();
                toks.push_back({std::string(1, ch), line});
                continue;
            }
            cur += ch;
        }
        flush();
    }

    bool done() const { return pos >= toks.size(); }
    const Tok& peek() const { return toks[pos]; }
    const Tok& next() { return toks[pos++]; }
};

inline bool is_field(const std::string& tok, std::string_view name) {
    // matches "name" or "<var>.name"
    if (tok == name) return true;
    const auto dot = tok.rfind('.');
    return dot != std::string::npos && std::string_view(tok).substr(dot + 1) == name;
}

inline MpTable parse_matrix(MpScanner& sc) {
    MpTable table;
    if (sc.done() || sc.next().text != "=")
        throw ParseError("expected '=' after table name", sc.done() ? -1 : sc.peek().line);
    if (sc.done() || sc.peek().text != "[")
        throw ParseError("expected '[' to open table", sc.done() ? -1 : sc.peek().line);
    table.line = sc.next().line;
    std::vector<real_t> row;
    while (!sc.done()) {
        const auto& t = sc.next();
        if (t.text == "]") {
            if (!row.empty()) table.rows.push_back(std::move(row));
            return table;
        }
        if (t.text == ";") {
            if (!row.empty()) table.rows.push_back(std::move(row));
            row.clear();
            continue;
        }
        row.push_back(parse_number(t.text, t.line));
    }
    throw ParseError("unterminated table", table.line);
}

inline BusKind bus_kind_from_matpower(int type, long line) {
    switch (type) {
        case 1: return BusKind::pq;
        case 2: return BusKind::pv;
        case 3: return BusKind::slack;
        default:
            throw ParseError("unsupported bus type " + std::to_string(type) +
                                 " (isolated buses are rejected)",
                             line);
    }
}

}  // namespace detail

// -----------------------------------------------------------------------------
// MATPOWER subset parser.
// -----------------------------------------------------------------------------

inline GridCase parse_matpower_case(const std::string& text) {
    detail::MpScanner sc(text);
    std::optional<real_t> base_mva;
    std::optional<detail::MpTable> bus_t, gen_t, branch_t;

    while (!sc.done()) {
        const auto tok = sc.next();
        if (detail::is_field(tok.text, "baseMVA")) {
            if (sc.done() || sc.next().text != "=")
                throw ParseError("expected '=' after baseMVA", tok.line);
            if (sc.done()) throw ParseError("missing baseMVA value", tok.line);
            const auto v = sc.next();
            base_mva = detail::parse_number(v.text, v.line);
            if (!sc.done() && sc.peek().text == ";") sc.next();
        } else if (detail::is_field(tok.text, "bus")) {
            bus_t = detail::parse_matrix(sc);
        } else if (detail::is_field(tok.text, "gen")) {
            gen_t = detail::parse_matrix(sc);
        } else if (detail::is_field(tok.text, "branch")) {
            branch_t = detail::parse_matrix(sc);
        }
        // anything else (function header, gencost, version, ...) is skipped
    }
    if (!base_mva) throw ParseError("missing baseMVA");
    if (!bus_t) throw ParseError("missing bus table");
    if (!branch_t) throw ParseError("missing branch table");

    GridCase gc;
    gc.base_mva = *base_mva;

    for (const auto& row : bus_t->rows) {
        if (row.size() < 10)
            throw ParseError("bus row needs >= 10 columns, got " + std::to_string(row.size()),
                             bus_t->line);
        Bus b;
        b.id = static_cast<int>(row[0]);
        b.kind = detail::bus_kind_from_matpower(static_cast<int>(row[1]), bus_t->line);
        b.p_load = row[2];
        b.q_load = row[3];
        b.gs = row[4];
        b.bs = row[5];
        b.vm_init = row[7];
        b.va_init = row[8];
        b.base_kv = row[9];
        gc.buses.push_back(b);
    }

    if (gen_t) {
        for (const auto& row : gen_t->rows) {
            if (row.size() < 8)
                throw ParseError("gen row needs >= 8 columns, got " + std::to_string(row.size()),
                                 gen_t->line);
            Generator g;
            g.bus = static_cast<int>(row[0]);
            g.p_set = row[1];
            g.vm_set = row[5];
            g.in_service = row[7] > 0.0;
            gc.generators.push_back(g);
        }
    }

    for (const auto& row : branch_t->rows) {
        if (row.size() < 11)
            throw ParseError("branch row needs >= 11 columns, got " + std::to_string(row.size()),
                             branch_t->line);
        Branch br;
        br.from_bus = static_cast<int>(row[0]);
        br.to_bus = static_cast<int>(row[1]);
        br.r = row[2];
        br.x = row[3];
        br.b_charge = row[4];
        br.rate_mva = row[5];
        br.tap = row[8] == 0.0 ? 1.0 : row[8];  // MATPOWER: 0 means no transformer
        br.shift = row[9];
        br.in_service = row[10] > 0.0;
        gc.branches.push_back(br);
    }

    // Bus typing rule: file type 3 is slack; otherwise an in-service generator
    // makes a bus PV and a type-2 bus without one demotes to PQ.
    std::map<int, bool> has_gen;
    for (const auto& g : gc.generators)
        if (g.in_service) has_gen[g.bus] = true;
    for (auto& b : gc.buses) {
        if (b.kind == BusKind::slack) continue;
        b.kind = has_gen.count(b.id) ? BusKind::pv : BusKind::pq;
    }

    finalize_case(gc);
    return gc;
}

// -----------------------------------------------------------------------------
// Native JSON case format.
// -----------------------------------------------------------------------------

inline GridCase parse_json_case(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    auto kind_of = [](const std::string& s) {
        if (s == "slack") return BusKind::slack;
        if (s == "pv") return BusKind::pv;
        if (s == "pq") return BusKind::pq;
        throw ParseError("unknown bus kind '" + s + "'");
    };
    try {
        GridCase gc;
        gc.base_mva = j.at("base_mva").get<real_t>();
        for (const auto& bj : j.at("buses")) {
            Bus b;
            b.id = bj.at("id").get<int>();
            b.kind = kind_of(bj.at("kind").get<std::string>());
            b.p_load = bj.value("p_load", 0.0);
            b.q_load = bj.value("q_load", 0.0);
            b.gs = bj.value("gs", 0.0);
            b.bs = bj.value("bs", 0.0);
            b.base_kv = bj.value("base_kv", 0.0);
            b.vm_init = bj.value("vm_init", 1.0);
            b.va_init = bj.value("va_init", 0.0);
            gc.buses.push_back(b);
        }
        for (const auto& rj : j.value("branches", nlohmann::json::array())) {
            Branch br;
            br.from_bus = rj.at("from_bus").get<int>();
            br.to_bus = rj.at("to_bus").get<int>();
            br.r = rj.value("r", 0.0);
            br.x = rj.at("x").get<real_t>();
            br.b_charge = rj.value("b_charge", 0.0);
            br.tap = rj.value("tap", 1.0);
            br.shift = rj.value("shift", 0.0);
            br.in_service = rj.value("in_service", true);
            br.rate_mva = rj.value("rate_mva", 0.0);
            gc.branches.push_back(br);
        }
        for (const auto& gj : j.value("generators", nlohmann::json::array())) {
            Generator g;
            g.bus = gj.at("bus").get<int>();
            g.p_set = gj.value("p_set", 0.0);
            g.vm_set = gj.value("vm_set", 1.0);
            g.in_service = gj.value("in_service", true);
            gc.generators.push_back(g);
        }
        finalize_case(gc);
        return gc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad case JSON: ") + e.what());
    }
}

inline std::string serialize_json_case(const GridCase& gc) {
    nlohmann::json j;
    j["base_mva"] = gc.base_mva;
    auto kind_name = [](BusKind k) {
        switch (k) {
            case BusKind::slack: return "slack";
            case BusKind::pv: return "pv";
            default: return "pq";
        }
    };
    j["buses"] = nlohmann::json::array();
    for (const Bus& b : gc.buses)
        j["buses"].push_back({{"id", b.id},
                              {"kind", kind_name(b.kind)},
                              {"p_load", b.p_load},
                              {"q_load", b.q_load},
                              {"gs", b.gs},
                              {"bs", b.bs},
                              {"base_kv", b.base_kv},
                              {"vm_init", b.vm_init},
                              {"va_init", b.va_init}});
    j["branches"] = nlohmann::json::array();
    for (const Branch& br : gc.branches)
        j["branches"].push_back({{"from_bus", br.from_bus},
                                 {"to_bus", br.to_bus},
                                 {"r", br.r},
                                 {"x", br.x},
                                 {"b_charge", br.b_charge},
                                 {"tap", br.tap},
                                 {"shift", br.shift},
                                 {"in_service", br.in_service},
                                 {"rate_mva", br.rate_mva}});
    j["generators"] = nlohmann::json::array();
    for (const Generator& g : gc.generators)
        j["generators"].push_back({{"bus", g.bus},
                                   {"p_set", g.p_set},
                                   {"vm_set", g.vm_set},
                                   {"in_service", g.in_service}});
    return j.dump(2);
}

/// Dispatch on content: JSON object vs MATPOWER text.
inline GridCase parse_case(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '{' ? parse_json_case(text) : parse_matpower_case(text);
    }
    throw ParseError("empty case file");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline GridCase load_case(const std::string& path) { return parse_case(read_file(path)); }

// -----------------------------------------------------------------------------
// Scenario CSV: header "bus:<id>:p,bus:<id>:q,...", one row per task, values
// replace the named bus loads (MW / MVAr). Unnamed buses keep case loads.
// -----------------------------------------------------------------------------

inline ScenarioTable parse_scenario_csv(const std::string& text, const GridCase& gc) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    };

    if (!std::getline(in, line)) throw ParseError("empty scenario file");
    ++lineno;
    const auto header = split(line);
    struct Col {
        index_t bus;
        bool is_p;
    };
    std::vector<Col> cols;
    for (const auto& h : header) {
        if (h.size() < 7 || h.rfind("bus:", 0) != 0)
            throw ParseError("bad scenario column '" + h + "'", lineno);
        const auto second = h.find(':', 4);
        if (second == std::string::npos) throw ParseError("bad scenario column '" + h + "'", lineno);
        const std::string id_str = h.substr(4, second - 4);
        const std::string field = h.substr(second + 1);
        if (field != "p" && field != "q")
            throw ParseError("scenario column must end in :p or :q, got '" + h + "'", lineno);
        int id = 0;
        auto [p, ec] = std::from_chars(id_str.data(), id_str.data() + id_str.size(), id);
        if (ec != std::errc() || p != id_str.data() + id_str.size())
            throw ParseError("bad bus id in column '" + h + "'", lineno);
        cols.push_back({gc.internal_bus(id), field == "p"});
    }

    std::vector<std::vector<real_t>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;
        const auto cells = split(line);
        if (cells.size() != cols.size())
            throw ParseError("scenario row has " + std::to_string(cells.size()) +
                                 " cells, header has " + std::to_string(cols.size()),
                             lineno);
        std::vector<real_t> vals;
        vals.reserve(cells.size());
        for (const auto& c : cells) vals.push_back(detail::parse_number(c, lineno));
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ParseError("scenario file has no task rows");

    const index_t n = gc.n_bus();
    const auto n_tasks = static_cast<index_t>(rows.size());
    ScenarioTable sc;
    sc.n_tasks = n_tasks;
    sc.n_sets = n_tasks;
    sc.p_mw.resize(static_cast<size_t>(n) * n_tasks);
    sc.q_mvar.resize(static_cast<size_t>(n) * n_tasks);
    for (index_t t = 0; t < n_tasks; ++t) {
        for (index_t i = 0; i < n; ++i) {
            sc.p_mw[static_cast<size_t>(i) * n_tasks + t] = gc.buses[i].p_load;
            sc.q_mvar[static_cast<size_t>(i) * n_tasks + t] = gc.buses[i].q_load;
        }
        for (size_t c = 0; c < cols.size(); ++c) {
            auto& dst = cols[c].is_p ? sc.p_mw : sc.q_mvar;
            dst[static_cast<size_t>(cols[c].bus) * n_tasks + t] = rows[t][c];
        }
    }
    return sc;
}

/// Outage list: one 0-based branch index per line; '#' starts a comment.
inline std::vector<index_t> parse_outage_list(const std::string& text, const GridCase& gc) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    std::vector<index_t> out;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            const real_t v = detail::parse_number(tok, lineno);
            const auto idx = static_cast<index_t>(v);
            if (idx < 0 || idx >= gc.n_branch() || static_cast<real_t>(idx) != v)
                throw ParseError("branch index out of range: " + tok, lineno);
            out.push_back(idx);
        }
    }
    if (out.empty()) throw ParseError("outage list is empty");
    return out;
}

}  // namespace gridbatch
