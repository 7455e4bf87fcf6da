#include "sl4/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sl4/builtins.hpp"
#include "sl4/error.hpp"

namespace sl4 {

// ------------------------------------------------------------------ parser

namespace {

class TomlParser {
public:
    TomlParser(const std::string& text, std::string source) : s_(text), source_(std::move(source)) {}

    TomlTable run() {
        TomlTable root;
        root.line = 1;
        TomlTable* current = &root;
        std::set<std::string> headers;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                const int line = line_;
                ++pos_;
                skip_ws();
                std::vector<std::string> path{key()};
                skip_ws();
                while (peek() == '.') {
                    ++pos_;
                    skip_ws();
                    path.push_back(key());
                    skip_ws();
                }
                expect(']');
                end_of_line();
                std::string joined;
                for (const auto& p : path) joined += (joined.empty() ? "" : ".") + p;
                if (!headers.insert(joined).second) error(line, "duplicate table [" + joined + "]");
                current = &root;
                for (const auto& p : path) {
                    if (current->values.count(p)) error(line, "table [" + joined + "] collides with key '" + p + "'");
                    TomlTable& next = current->tables[p];
                    if (next.line == 0) next.line = line;
                    current = &next;
                }
                continue;
            }
            const int line = line_;
            const std::string k = key();
            skip_ws();
            expect('=');
            skip_ws();
            TomlValue v = value();
            end_of_line();
            if (current->values.count(k) || current->tables.count(k)) error(line, "duplicate key '" + k + "'");
            current->values.emplace(k, std::move(v));
        }
        return root;
    }

private:
    const std::string& s_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;

    [[noreturn]] void error(int line, const std::string& msg) const {
        fail(ErrorKind::Config, source_ + ":" + std::to_string(line) + ": " + msg);
    }
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }
    void newline() {
        if (peek() == '\r') ++pos_;
        if (peek() == '\n') {
            ++pos_;
            ++line_;
        }
    }
    void skip_blank_lines() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\r' || peek() == '\n') newline();
            else break;
        }
    }
    /// Whitespace, comments and newlines inside arrays.
    void skip_space_multiline() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\r' || peek() == '\n') newline();
            else break;
        }
    }
    void expect(char c) {
        if (peek() != c) error(line_, std::string("expected '") + c + "'");
        ++pos_;
    }
    void end_of_line() {
        skip_ws();
        skip_comment();
        if (!eof() && peek() != '\n' && peek() != '\r') error(line_, "unexpected text after value");
        newline();
    }
    std::string key() {
        if (peek() == '"') return quoted();
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            k += s_[pos_++];
        if (k.empty()) error(line_, "expected a key");
        return k;
    }
    std::string quoted() {
        expect('"');
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') error(line_, "unterminated string");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) error(line_, "unterminated string");
            const char e = s_[pos_++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: error(line_, std::string("unsupported escape \\") + e);
            }
        }
        return out;
    }
    TomlValue value() {
        TomlValue v;
        v.line = line_;
        const char c = peek();
        if (c == '"') {
            v.type = TomlValue::Type::String;
            v.str = quoted();
            return v;
        }
        if (c == '[') {
            v.type = TomlValue::Type::Array;
            ++pos_;
            skip_space_multiline();
            while (peek() != ']') {
                v.array.push_back(value());
                skip_space_multiline();
                if (peek() == ',') {
                    ++pos_;
                    skip_space_multiline();
                } else if (peek() != ']') {
                    error(line_, "expected ',' or ']' in array");
                }
            }
            ++pos_;
            return v;
        }
        std::string tok;
        while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
               peek() != '#')
            tok += s_[pos_++];
        if (tok == "true" || tok == "false") {
            v.type = TomlValue::Type::Bool;
            v.boolean = tok == "true";
            return v;
        }
        if (tok == "inf" || tok == "+inf") v.num = INFINITY;
        else if (tok == "-inf") v.num = -INFINITY;
        else if (tok == "nan" || tok == "+nan" || tok == "-nan") v.num = NAN;
        else {
            std::string clean;
            for (char ch : tok)
                if (ch != '_') clean += ch;
            std::istringstream is(clean);
            is.imbue(std::locale::classic());
            double x = 0.0;
            if (clean.empty() || !(is >> x) || is.peek() != EOF) error(v.line, "malformed value '" + tok + "'");
            v.num = x;
        }
        v.type = TomlValue::Type::Number;
        return v;
    }
};

// ------------------------------------------------------------------ schema

class Schema {
public:
    explicit Schema(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void error(int line, const std::string& key, const std::string& msg) const {
        fail(ErrorKind::Config, source_ + ":" + std::to_string(line) + ": key '" + key + "': " + msg);
    }

    void allow(const TomlTable& t, const std::string& where, std::initializer_list<const char*> keys,
               std::initializer_list<const char*> tables) const {
        const std::set<std::string> k(keys.begin(), keys.end()), tb(tables.begin(), tables.end());
        for (const auto& [name, v] : t.values)
            if (!k.count(name)) error(v.line, qualify(where, name), "unknown key");
        for (const auto& [name, sub] : t.tables)
            if (!tb.count(name)) error(sub.line, qualify(where, name), "unknown table");
    }

    static std::string qualify(const std::string& where, const std::string& name) {
        return where.empty() ? name : where + "." + name;
    }

    double number(const TomlValue& v, const std::string& key, bool allow_inf_string = false) const {
        if (v.type == TomlValue::Type::Number) return v.num;
        if (allow_inf_string && v.type == TomlValue::Type::String) {
            if (v.str == "inf" || v.str == "+inf") return INFINITY;
            if (v.str == "-inf") return -INFINITY;
        }
        error(v.line, key, "expected a number");
    }
    const std::string& string(const TomlValue& v, const std::string& key) const {
        if (v.type != TomlValue::Type::String) error(v.line, key, "expected a string");
        return v.str;
    }
    const std::vector<TomlValue>& array(const TomlValue& v, const std::string& key, std::size_t n) const {
        if (v.type != TomlValue::Type::Array) error(v.line, key, "expected an array");
        if (v.array.size() != n) error(v.line, key, "expected " + std::to_string(n) + " entries");
        return v.array;
    }
    /// Number, or [re, im].
    cplx complex(const TomlValue& v, const std::string& key) const {
        if (v.type == TomlValue::Type::Number) return v.num;
        if (v.type == TomlValue::Type::Array && v.array.size() == 2 &&
            v.array[0].type == TomlValue::Type::Number && v.array[1].type == TomlValue::Type::Number)
            return {v.array[0].num, v.array[1].num};
        error(v.line, key, "expected a number or [re, im]");
    }
    /// 2x2 matrix, row-major: [[a, b], [c, d]].
    Mat2c matrix(const TomlValue& v, const std::string& key) const {
        const auto& rows = array(v, key, 2);
        Mat2c m;
        for (int i = 0; i < 2; ++i) {
            const auto& r = array(rows[i], key, 2);
            for (int j = 0; j < 2; ++j) m(i, j) = complex(r[j], key);
        }
        return m;
    }
    Coefficient coefficient(const TomlValue& v, const std::string& key) const {
        if (v.type == TomlValue::Type::Number) return Coefficient(v.num);
        try {
            return Coefficient::parse(string(v, key));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            error(v.line, key, e.what());
        }
    }

    ConditionFunction condition(const TomlTable& bc, const std::string& key, const std::string& where) const {
        const TomlValue& v = bc.values.at(key);
        const std::string qk = qualify(where, key);
        const auto& entries = array(v, qk, 4);
        const bool exprs = entries[0].type == TomlValue::Type::String;
        if (exprs) {
            std::vector<Expression> e;
            for (const auto& x : entries) {
                try {
                    e.push_back(Expression::parse(string(x, qk)));
                } catch (const Error& err) {
                    if (err.kind() == ErrorKind::Config) throw;
                    error(x.line, qk, err.what());
                }
            }
            if (bc.values.count("anchor") || bc.values.count("lambda"))
                error(v.line, qk, "closed-form psi takes no anchor or lambda");
            std::string label = "(" + e[0].text() + ", " + e[1].text() + ", " + e[2].text() + ", " + e[3].text() + ")";
            return ConditionFunction::closed(
                [e](double x) { return QuasiVector::from_derivatives(e[0](x), e[1](x), e[2](x), e[3](x)); }, label);
        }
        cplx z[4];
        for (int i = 0; i < 4; ++i) z[i] = complex(entries[i], qk);
        const auto anchor = bc.values.find("anchor");
        if (anchor == bc.values.end()) error(v.line, qk, "sampled psi needs an anchor point");
        const double x0 = number(anchor->second, qualify(where, "anchor"));
        double lam = 0.0;
        if (const auto l = bc.values.find("lambda"); l != bc.values.end())
            lam = number(l->second, qualify(where, "lambda"));
        return ConditionFunction::anchored(x0, QuasiVector::from_derivatives(z[0], z[1], z[2], z[3]), lam, key);
    }

    BoundaryForm bc(const TomlTable& t, const std::string& where) const {
        const auto type_it = t.values.find("type");
        if (type_it == t.values.end()) error(t.line, qualify(where, "type"), "missing");
        const std::string& type = string(type_it->second, qualify(where, "type"));
        const int line = type_it->second.line;
        try {
            if (type == "dirichlet" || type == "hinged" || type == "natural") {
                allow(t, where, {"type"}, {});
                return type == "dirichlet" ? dirichlet_pair() : type == "hinged" ? hinged_pair() : natural_pair();
            }
            if (type == "pair") {
                allow(t, where, {"type", "A1", "A2"}, {});
                for (const char* k : {"A1", "A2"})
                    if (!t.values.count(k)) error(t.line, qualify(where, k), "missing");
                return validate_pair(matrix(t.values.at("A1"), qualify(where, "A1")),
                                     matrix(t.values.at("A2"), qualify(where, "A2")));
            }
            if (type == "weyl") {
                allow(t, where, {"type", "WR"}, {});
                if (!t.values.count("WR")) error(t.line, qualify(where, "WR"), "missing");
                const std::string k = qualify(where, "WR");
                const auto& e = array(t.values.at("WR"), k, 3);
                Mat2d W;
                W << number(e[0], k), number(e[1], k), number(e[1], k), number(e[2], k);
                if (!W.allFinite()) error(t.values.at("WR").line, k, "entries must be finite");
                return WeylForm{W};
            }
            if (type == "lagrange") {
                allow(t, where, {"type", "psi", "psi2", "anchor", "lambda"}, {});
                if (!t.values.count("psi")) error(t.line, qualify(where, "psi"), "missing");
                LagrangeCondition lc;
                lc.functions.push_back(condition(t, "psi", where));
                if (t.values.count("psi2")) lc.functions.push_back(condition(t, "psi2", where));
                return lc;
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            error(line, qualify(where, "type"), e.what());
        }
        error(line, qualify(where, "type"), "expected \"dirichlet\", \"hinged\", \"natural\", \"pair\", \"weyl\" or \"lagrange\"");
    }

private:
    std::string source_;
};

std::optional<EndpointClass> parse_class(const Schema& sc, const TomlValue& v, const std::string& key) {
    const std::string& c = sc.string(v, key);
    if (c == "auto") return std::nullopt;
    if (c == "regular") return EndpointClass{EndpointKind::Regular, 1.0};
    if (c == "lim2") return EndpointClass{EndpointKind::Lim2, 1.0};
    if (c == "lim3") return EndpointClass{EndpointKind::Lim3, 1.0};
    if (c == "lim4") return EndpointClass{EndpointKind::Lim4, 1.0};
    sc.error(v.line, key, "expected \"auto\", \"regular\", \"lim2\", \"lim3\" or \"lim4\"");
}

}  // namespace

TomlTable parse_toml(const std::string& text, const std::string& source) { return TomlParser(text, source).run(); }

ProblemSpec problem_from_toml(const TomlTable& root, const std::string& source) {
    const Schema sc(source);
    sc.allow(root, "", {"name", "p", "s", "q", "w", "interval", "essential_spectrum_floor"}, {"left", "right"});
    ProblemSpec p;
    p.name = source;
    if (auto it = root.values.find("name"); it != root.values.end()) p.name = sc.string(it->second, "name");

    Coefficient* coeffs[] = {&p.coefficients.p, &p.coefficients.s, &p.coefficients.q, &p.coefficients.w};
    const char* names[] = {"p", "s", "q", "w"};
    for (int i = 0; i < 4; ++i)
        if (auto it = root.values.find(names[i]); it != root.values.end())
            *coeffs[i] = sc.coefficient(it->second, names[i]);

    const auto iv = root.values.find("interval");
    if (iv == root.values.end()) sc.error(root.line, "interval", "missing");
    const auto& ends = sc.array(iv->second, "interval", 2);
    p.interval = {sc.number(ends[0], "interval", true), sc.number(ends[1], "interval", true)};
    if (std::isnan(p.interval.a) || std::isnan(p.interval.b) || !(p.interval.a < p.interval.b))
        sc.error(iv->second.line, "interval", "needs a < b");

    if (auto it = root.values.find("essential_spectrum_floor"); it != root.values.end())
        p.essential_spectrum_floor = sc.number(it->second, "essential_spectrum_floor");

    for (Side side : {Side::Left, Side::Right}) {
        const std::string where = side_name(side);
        const auto t = root.tables.find(where);
        if (t == root.tables.end()) continue;
        sc.allow(t->second, where, {"class"}, {"bc"});
        auto& cls = side == Side::Left ? p.left_class : p.right_class;
        auto& bc = side == Side::Left ? p.left_bc : p.right_bc;
        if (auto c = t->second.values.find("class"); c != t->second.values.end())
            cls = parse_class(sc, c->second, where + ".class");
        if (auto b = t->second.tables.find("bc"); b != t->second.tables.end()) bc = sc.bc(b->second, where + ".bc");
    }
    try {
        p.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Config, source + ": " + e.what());
    }
    return p;
}

ProblemSpec parse_problem_text(const std::string& text, const std::string& source) {
    return problem_from_toml(parse_toml(text, source), source);
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Config, "cannot read problem file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_problem_text(os.str(), path);
}

// ------------------------------------------------------------------ run options

KRange parse_k_range(const std::string& text) {
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = -1;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || v < 0) fail(ErrorKind::Config, "bad --k range '" + text + "'");
        return v;
    };
    const auto dots = text.find("..");
    KRange r;
    if (dots == std::string::npos) {
        r.lo = r.hi = to_int(text);
    } else {
        r.lo = to_int(text.substr(0, dots));
        r.hi = to_int(text.substr(dots + 2));
    }
    if (r.lo > r.hi) fail(ErrorKind::Config, "bad --k range '" + text + "': lo > hi");
    return r;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

double parse_real(const std::string& s, const std::string& spec) {
    std::size_t used = 0;
    double v = NAN;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) fail(ErrorKind::Config, "bad number '" + s + "' in schedule '" + spec + "'");
    return v;
}

std::map<std::string, double> parse_params(const std::string& body, const std::string& spec,
                                           std::initializer_list<const char*> required) {
    std::map<std::string, double> out;
    for (const auto& item : split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Config, "expected name=value in schedule '" + spec + "'");
        const std::string k = item.substr(0, eq);
        bool known = false;
        for (const char* r : required) known = known || k == r;
        if (!known) fail(ErrorKind::Config, "unknown parameter '" + k + "' in schedule '" + spec + "'");
        if (!out.emplace(k, parse_real(item.substr(eq + 1), spec)).second)
            fail(ErrorKind::Config, "duplicate parameter '" + k + "' in schedule '" + spec + "'");
    }
    for (const char* r : required)
        if (!out.count(r)) fail(ErrorKind::Config, std::string("missing parameter '") + r + "' in schedule '" + spec + "'");
    return out;
}

bool side_is_truncated(const ProblemSpec& problem, Side side) {
    const auto& c = problem.endpoint_class(side);
    if (c) return c->kind != EndpointKind::Regular;
    return !(problem.interval.finite(side) && check_regular(problem, side));
}

}  // namespace

TruncationSchedule parse_schedule(const std::string& spec, const ProblemSpec& problem) {
    std::string rest = spec;
    std::optional<Side> side;
    if (rest.rfind("left:", 0) == 0) {
        side = Side::Left;
        rest = rest.substr(5);
    } else if (rest.rfind("right:", 0) == 0) {
        side = Side::Right;
        rest = rest.substr(6);
    }
    if (!side) {
        const bool l = side_is_truncated(problem, Side::Left), r = side_is_truncated(problem, Side::Right);
        if (l == r) fail(ErrorKind::Config, "schedule '" + spec + "' needs a left: or right: prefix");
        side = l ? Side::Left : Side::Right;
    }
    const auto colon = rest.find(':');
    if (colon == std::string::npos) fail(ErrorKind::Config, "bad schedule '" + spec + "'");
    const std::string rule = rest.substr(0, colon), body = rest.substr(colon + 1);
    TruncationSchedule s;
    if (rule == "geometric") {
        const auto p = parse_params(body, spec, {"first", "factor", "count"});
        const double cnt = p.at("count");
        if (cnt != std::floor(cnt) || cnt < 1 || cnt > 1e6) fail(ErrorKind::Config, "bad count in schedule '" + spec + "'");
        if (!problem.interval.finite(*side))
            fail(ErrorKind::Config, "geometric schedule needs a finite endpoint: '" + spec + "'");
        s = TruncationSchedule::geometric(*side, problem.interval.end(*side), p.at("first"), p.at("factor"),
                                          static_cast<int>(cnt));
    } else if (rule == "linear") {
        const auto p = parse_params(body, spec, {"start", "stop", "step"});
        s = TruncationSchedule::linear(*side, p.at("start"), p.at("stop"), p.at("step"));
    } else if (rule == "list") {
        std::vector<double> pts;
        for (const auto& x : split(body, ',')) pts.push_back(parse_real(x, spec));
        s = TruncationSchedule::explicit_points(*side, std::move(pts));
    } else {
        fail(ErrorKind::Config, "unknown schedule rule '" + rule + "' in '" + spec + "'");
    }
    s.validate(problem.interval);
    return s;
}

TruncationSchedule default_schedule(const ProblemSpec& problem, Side side) {
    const Interval& iv = problem.interval;
    if (iv.finite(Side::Left) && iv.finite(Side::Right)) {
        return TruncationSchedule::geometric(side, iv.end(side), 0.1 * (iv.b - iv.a), std::sqrt(0.1), 10);
    }
    if (iv.finite(side)) {
        const double L = 1.0;
        return TruncationSchedule::geometric(side, iv.end(side), 0.1 * L, std::sqrt(0.1), 10);
    }
    const Side other = side == Side::Left ? Side::Right : Side::Left;
    const double base = iv.finite(other) ? iv.end(other) : 0.0;
    if (side == Side::Right) return TruncationSchedule::linear(side, base + 3.0, base + 10.0, 1.0);
    return TruncationSchedule::linear(side, base - 3.0, base - 10.0, 1.0);
}

ProblemSpec resolve_problem(const RunConfig& cfg) {
    if (cfg.problem_path.empty() == cfg.builtin.empty())
        fail(ErrorKind::Config, "give exactly one of --problem and --builtin");
    if (!cfg.builtin.empty()) return builtin_problem(cfg.builtin);
    return load_problem_file(cfg.problem_path);
}

}  // namespace sl4
