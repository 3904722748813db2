#include "pflow/caseio.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

// ---------------------------------------------------------------------------
// MATPOWER-style text subset
// ---------------------------------------------------------------------------

struct NumericMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;  // source line of each row
    bool present = false;
};

struct Scanner {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }

    void skip_to_eol() {
        while (!eof() && text[pos] != '\n') ++pos;
    }

    // Skips spaces, tabs, carriage returns and % comments; newlines are
    // consumed only when allow_newline is set.
    void skip_blank(bool allow_newline) {
        while (!eof()) {
            char c = peek();
            if (c == '%') {
                skip_to_eol();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
                advance();
            } else if (c == '\n' && allow_newline) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string read_identifier() {
        std::string out;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                out.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return out;
    }
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw ParseError("parse error at line " + std::to_string(line) + ": " + msg);
}

double read_number(Scanner& s) {
    const int line = s.line;
    std::size_t start = s.pos;
    while (!s.eof()) {
        char c = s.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
            c == '.' || c == 'e' || c == 'E') {
            s.advance();
        } else {
            break;
        }
    }
    std::string_view tok = s.text.substr(start, s.pos - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
        parse_fail(line, "non-numeric token '" + std::string(tok) + "'");
    return value;
}

NumericMatrix read_matrix(Scanner& s) {
    NumericMatrix m;
    m.present = true;
    s.skip_blank(true);
    if (s.eof() || s.peek() != '[') parse_fail(s.line, "expected '[' to start matrix");
    s.advance();

    std::vector<double> row;
    int row_line = s.line;
    auto end_row = [&] {
        if (!row.empty()) {
            m.rows.push_back(std::move(row));
            m.row_lines.push_back(row_line);
            row.clear();
        }
    };
    while (true) {
        s.skip_blank(false);
        if (s.eof()) parse_fail(s.line, "unterminated matrix");
        char c = s.peek();
        if (c == ']') {
            s.advance();
            end_row();
            break;
        }
        if (c == ';' || c == '\n') {
            s.advance();
            end_row();
            row_line = s.line;
            continue;
        }
        if (c == '.' && s.text.substr(s.pos, 3) == "...") {
            s.skip_to_eol();  // MATLAB line continuation
            continue;
        }
        if (row.empty()) row_line = s.line;
        row.push_back(read_number(s));
    }
    return m;
}

void skip_statement(Scanner& s) {
    // Consumes the remainder of an assignment we do not interpret: balanced
    // brackets, quoted strings, up to ';' or end of line at depth zero.
    int depth = 0;
    while (!s.eof()) {
        char c = s.peek();
        if (c == '%') {
            s.skip_to_eol();
            continue;
        }
        if (c == '\'') {
            s.advance();
            while (!s.eof() && s.peek() != '\'' && s.peek() != '\n') s.advance();
            if (!s.eof()) s.advance();
            continue;
        }
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
        if (depth == 0 && (c == ';' || c == '\n')) {
            s.advance();
            return;
        }
        s.advance();
    }
}

void require_columns(const NumericMatrix& m, std::size_t need, const char* what) {
    std::size_t width = m.rows.empty() ? 0 : m.rows.front().size();
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        if (m.rows[r].size() != width)
            parse_fail(m.row_lines[r], std::string(what) + " matrix has ragged rows");
    }
    if (!m.rows.empty() && width < need)
        parse_fail(m.row_lines.front(), std::string(what) + " matrix needs at least " +
                                            std::to_string(need) + " columns, got " +
                                            std::to_string(width));
}

int to_int(double v, int line, const char* what) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
        parse_fail(line, std::string(what) + " must be an integer, got " +
                             std::to_string(v));
    return static_cast<int>(r);
}

}  // namespace

Case parse_matpower_case(std::string_view text) {
    Scanner s{text};
    Case c;
    c.base_mva = 0.0;
    bool have_base = false;
    NumericMatrix bus, gen, branch;

    while (true) {
        s.skip_blank(true);
        if (s.eof()) break;
        char ch = s.peek();
        if (!std::isalpha(static_cast<unsigned char>(ch)) && ch != '_') {
            s.advance();
            continue;
        }
        const int stmt_line = s.line;
        std::string ident = s.read_identifier();
        if (ident == "function") {
            // function mpc = casename
            s.skip_blank(false);
            s.read_identifier();
            s.skip_blank(false);
            if (!s.eof() && s.peek() == '=') {
                s.advance();
                s.skip_blank(false);
                c.name = s.read_identifier();
            }
            s.skip_to_eol();
            continue;
        }
        s.skip_blank(false);
        if (s.eof() || s.peek() != '=') {
            s.skip_to_eol();
            continue;
        }
        s.advance();  // '='

        if (ident == "mpc.baseMVA") {
            s.skip_blank(true);
            c.base_mva = read_number(s);
            have_base = true;
        } else if (ident == "mpc.bus") {
            bus = read_matrix(s);
        } else if (ident == "mpc.gen") {
            gen = read_matrix(s);
        } else if (ident == "mpc.branch") {
            branch = read_matrix(s);
        } else {
            skip_statement(s);
            continue;
        }
        (void)stmt_line;
    }

    if (!have_base) throw ParseError("missing mpc.baseMVA assignment");
    if (!bus.present) throw ParseError("missing mpc.bus matrix");
    if (!gen.present) throw ParseError("missing mpc.gen matrix");
    if (!branch.present) throw ParseError("missing mpc.branch matrix");

    require_columns(bus, 9, "bus");
    require_columns(gen, 8, "gen");
    require_columns(branch, 11, "branch");

    for (std::size_t r = 0; r < bus.rows.size(); ++r) {
        const auto& row = bus.rows[r];
        const int line = bus.row_lines[r];
        Bus b;
        b.id = to_int(row[0], line, "bus id");
        switch (to_int(row[1], line, "bus type")) {
            case 1: b.btype = BusType::PQ; break;
            case 2: b.btype = BusType::PV; break;
            case 3: b.btype = BusType::Slack; break;
            default:
                parse_fail(line, "unknown bus type code " +
                                     std::to_string(to_int(row[1], line, "bus type")));
        }
        b.pd = row[2];
        b.qd = row[3];
        b.gs = row[4];
        b.bs = row[5];
        b.vm = row[7];
        b.va = row[8];
        c.buses.push_back(b);
    }
    for (std::size_t r = 0; r < gen.rows.size(); ++r) {
        const auto& row = gen.rows[r];
        const int line = gen.row_lines[r];
        Gen g;
        g.bus = to_int(row[0], line, "gen bus");
        g.pg = row[1];
        g.qg = row[2];
        g.vg = row[5];
        g.in_service = row[7] > 0.0;
        c.gens.push_back(g);
    }
    for (std::size_t r = 0; r < branch.rows.size(); ++r) {
        const auto& row = branch.rows[r];
        const int line = branch.row_lines[r];
        Branch b;
        b.from_bus = to_int(row[0], line, "branch from bus");
        b.to_bus = to_int(row[1], line, "branch to bus");
        b.r = row[2];
        b.x = row[3];
        b.b = row[4];
        b.tap = row[8] == 0.0 ? 1.0 : row[8];  // 0 means no transformer
        b.shift = row[9];
        b.in_service = row[10] > 0.0;
        c.branches.push_back(b);
    }

    check_case_invariants(c);
    return c;
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
    throw ParseError("schema violation at " + path + ": " + msg);
}

double get_number(const json& obj, const char* key, const std::string& path,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) schema_fail(path + "." + key, "missing required field");
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) schema_fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) schema_fail(path + "." + key, "missing required field");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) schema_fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& path,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) schema_fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

const json& get_array(const json& obj, const char* key) {
    if (!obj.contains(key)) schema_fail(std::string("$.") + key, "missing required field");
    const auto& v = obj.at(key);
    if (!v.is_array()) schema_fail(std::string("$.") + key, "expected an array");
    return v;
}

}  // namespace

Case parse_json_case(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) schema_fail("$", "expected a JSON object");

    Case c;
    if (root.contains("name")) {
        if (!root.at("name").is_string()) schema_fail("$.name", "expected a string");
        c.name = root.at("name").get<std::string>();
    }
    c.base_mva = get_number(root, "base_mva", "$", 0.0, /*required=*/true);

    std::size_t i = 0;
    for (const auto& jb : get_array(root, "buses")) {
        std::string path = "$.buses[" + std::to_string(i++) + "]";
        if (!jb.is_object()) schema_fail(path, "expected an object");
        Bus b;
        b.id = get_int(jb, "id", path);
        if (!jb.contains("btype") || !jb.at("btype").is_string())
            schema_fail(path + ".btype", "expected a string");
        std::string t = jb.at("btype").get<std::string>();
        if (t == "PQ") b.btype = BusType::PQ;
        else if (t == "PV") b.btype = BusType::PV;
        else if (t == "SLACK") b.btype = BusType::Slack;
        else schema_fail(path + ".btype", "unknown bus type '" + t + "'");
        b.pd = get_number(jb, "pd", path, 0.0);
        b.qd = get_number(jb, "qd", path, 0.0);
        b.gs = get_number(jb, "gs", path, 0.0);
        b.bs = get_number(jb, "bs", path, 0.0);
        b.vm = get_number(jb, "vm", path, 1.0);
        b.va = get_number(jb, "va", path, 0.0);
        c.buses.push_back(b);
    }
    i = 0;
    for (const auto& jg : get_array(root, "gens")) {
        std::string path = "$.gens[" + std::to_string(i++) + "]";
        if (!jg.is_object()) schema_fail(path, "expected an object");
        Gen g;
        g.bus = get_int(jg, "bus", path);
        g.pg = get_number(jg, "pg", path, 0.0);
        g.qg = get_number(jg, "qg", path, 0.0);
        g.vg = get_number(jg, "vg", path, 1.0);
        g.in_service = get_bool(jg, "in_service", path, true);
        c.gens.push_back(g);
    }
    i = 0;
    for (const auto& jb : get_array(root, "branches")) {
        std::string path = "$.branches[" + std::to_string(i++) + "]";
        if (!jb.is_object()) schema_fail(path, "expected an object");
        Branch b;
        b.from_bus = get_int(jb, "from_bus", path);
        b.to_bus = get_int(jb, "to_bus", path);
        b.r = get_number(jb, "r", path, 0.0, /*required=*/true);
        b.x = get_number(jb, "x", path, 0.0, /*required=*/true);
        b.b = get_number(jb, "b", path, 0.0);
        b.tap = get_number(jb, "tap", path, 1.0);
        if (b.tap == 0.0) b.tap = 1.0;
        b.shift = get_number(jb, "shift", path, 0.0);
        b.in_service = get_bool(jb, "in_service", path, true);
        c.branches.push_back(b);
    }

    check_case_invariants(c);
    return c;
}

std::string serialize_case_json(const Case& c) {
    json root;
    if (!c.name.empty()) root["name"] = c.name;
    root["base_mva"] = c.base_mva;

    root["buses"] = json::array();
    for (const auto& b : c.buses) {
        const char* t = b.btype == BusType::PQ ? "PQ"
                        : b.btype == BusType::PV ? "PV"
                                                 : "SLACK";
        root["buses"].push_back(json{{"id", b.id},
                                     {"btype", t},
                                     {"pd", b.pd},
                                     {"qd", b.qd},
                                     {"gs", b.gs},
                                     {"bs", b.bs},
                                     {"vm", b.vm},
                                     {"va", b.va}});
    }
    root["gens"] = json::array();
    for (const auto& g : c.gens) {
        root["gens"].push_back(json{{"bus", g.bus},
                                    {"pg", g.pg},
                                    {"qg", g.qg},
                                    {"vg", g.vg},
                                    {"in_service", g.in_service}});
    }
    root["branches"] = json::array();
    for (const auto& b : c.branches) {
        root["branches"].push_back(json{{"from_bus", b.from_bus},
                                        {"to_bus", b.to_bus},
                                        {"r", b.r},
                                        {"x", b.x},
                                        {"b", b.b},
                                        {"tap", b.tap},
                                        {"shift", b.shift},
                                        {"in_service", b.in_service}});
    }
    return root.dump(2) + "\n";
}

Case load_case_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open case file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::filesystem::path p(path);
    std::string ext = p.extension().string();
    bool is_json;
    if (ext == ".json") {
        is_json = true;
    } else if (ext == ".m") {
        is_json = false;
    } else {
        auto first = text.find_first_not_of(" \t\r\n");
        is_json = first != std::string::npos && text[first] == '{';
    }

    Case c = is_json ? parse_json_case(text) : parse_matpower_case(text);
    if (c.name.empty()) c.name = p.stem().string();
    return c;
}

}  // namespace pflow
