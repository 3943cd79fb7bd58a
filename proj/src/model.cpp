#include "psym/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "psym/calculus.hpp"
#include "psym/errors.hpp"

namespace psym {

std::vector<SymbolId> ModelDef::coordinates() const {
    std::vector<SymbolId> out = states;
    out.insert(out.end(), params.begin(), params.end());
    return out;
}

std::size_t ModelDef::state_index(SymbolId s) const {
    auto it = std::find(states.begin(), states.end(), s);
    if (it == states.end()) throw Error("modelspec", "not a state: " + table->name(s));
    return std::size_t(it - states.begin());
}

std::size_t ModelDef::param_index(SymbolId p) const {
    auto it = std::find(params.begin(), params.end(), p);
    if (it == params.end()) throw Error("modelspec", "not a parameter: " + table->name(p));
    return std::size_t(it - params.begin());
}

bool ModelDef::is_state(SymbolId s) const { return std::find(states.begin(), states.end(), s) != states.end(); }
bool ModelDef::is_param(SymbolId s) const { return std::find(params.begin(), params.end(), s) != params.end(); }
bool ModelDef::is_input(SymbolId s) const { return std::find(inputs.begin(), inputs.end(), s) != inputs.end(); }

SymbolId ModelDef::symbol(std::string_view n) const {
    auto s = table->find(n);
    if (!s) throw Error("modelspec", "unknown symbol: " + std::string(n));
    return *s;
}

namespace {

std::vector<std::string> names(const SymbolTable& t, const std::vector<SymbolId>& ids) {
    std::vector<std::string> out;
    for (auto s : ids) out.push_back(t.name(s));
    return out;
}

}  // namespace

bool operator==(const ModelDef& a, const ModelDef& b) {
    if (a.name != b.name) return false;
    if (names(*a.table, a.states) != names(*b.table, b.states)) return false;
    if (names(*a.table, a.params) != names(*b.table, b.params)) return false;
    if (names(*a.table, a.inputs) != names(*b.table, b.inputs)) return false;
    // same declarations give the same ids
    if (a.states != b.states || a.params != b.params || a.inputs != b.inputs) return false;
    if (a.outputs.size() != b.outputs.size()) return false;
    for (std::size_t i = 0; i < a.outputs.size(); ++i)
        if (a.outputs[i].name != b.outputs[i].name || !(a.outputs[i].expr == b.outputs[i].expr)) return false;
    for (auto s : a.states)
        if (!(a.rhs(s) == b.rhs(s))) return false;
    return true;
}

namespace {

enum class Tok { Ident, Number, Op, End };

struct Token {
    Tok kind;
    std::string text;
    int col;
};

const std::set<std::string, std::less<>> kReserved = {"t", "model", "states", "params", "inputs", "output"};

std::vector<Token> lex(std::string_view line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char ch = line[i];
        if (ch == '#') break;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        const int col = int(i) + 1;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t j = i;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            if (j < line.size() && line[j] == '.') {
                ++j;
                while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            }
            if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
                if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
                    while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
                    j = k;
                }
            }
            std::string text(line.substr(i, j - i));
            if (text == ".") throw ParseError("unexpected character '.'", lineno, col, text);
            out.push_back({Tok::Number, std::move(text), col});
            i = j;
        } else if (std::string_view("+-*/^()=,").find(ch) != std::string_view::npos) {
            out.push_back({Tok::Op, std::string(1, ch), col});
            ++i;
        } else {
            std::string bad(1, ch);
            // keep multi-byte characters together in the message
            std::size_t j = i + 1;
            while (j < line.size() && (static_cast<unsigned char>(line[j]) & 0xC0) == 0x80) bad += line[j++];
            throw ParseError("unexpected character '" + bad + "'", lineno, col, bad);
        }
    }
    out.push_back({Tok::End, "", int(line.size()) + 1});
    return out;
}

Rational parse_number(const std::string& text) {
    std::string mant = text, exp;
    auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        mant = text.substr(0, e);
        exp = text.substr(e + 1);
    }
    mpz_class num = 0, den = 1;
    for (char ch : mant) {
        if (ch == '.') continue;
        num = num * 10 + (ch - '0');
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos)
        for (std::size_t k = dot + 1; k < mant.size(); ++k) den *= 10;
    if (!exp.empty()) {
        const long p = std::stol(exp);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(p < 0 ? -p : p));
        if (p < 0)
            den *= scale;
        else
            num *= scale;
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

class ExprParser {
public:
    ExprParser(const std::vector<Token>& toks, std::size_t pos, int line, const SymbolTable& table)
        : toks_(toks), pos_(pos), line_(line), table_(table) {}

    RationalFunction parse_all() {
        RationalFunction e = expr();
        if (peek().kind != Tok::End) fail("unexpected token '" + peek().text + "'", peek());
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool at_op(char c) const { return peek().kind == Tok::Op && peek().text[0] == c; }

    [[noreturn]] void fail(const std::string& what, const Token& t) const {
        throw ParseError(what, line_, t.col, t.kind == Tok::End ? "<end of line>" : t.text);
    }

    RationalFunction expr() {
        RationalFunction acc = term();
        while (at_op('+') || at_op('-')) {
            const bool minus = next().text[0] == '-';
            RationalFunction rhs = term();
            if (minus)
                acc -= rhs;
            else
                acc += rhs;
        }
        return acc;
    }

    RationalFunction term() {
        RationalFunction acc = unary();
        while (at_op('*') || at_op('/')) {
            const Token& op = next();
            const Token& at = peek();
            RationalFunction rhs = unary();
            if (op.text[0] == '*') {
                acc *= rhs;
            } else {
                if (rhs.is_zero()) fail("division by zero", at);
                acc /= rhs;
            }
        }
        return acc;
    }

    RationalFunction unary() {
        if (at_op('-')) {
            next();
            return -unary();
        }
        if (at_op('+')) {
            next();
            return unary();
        }
        return power();
    }

    RationalFunction power() {
        RationalFunction base = primary();
        if (!at_op('^')) return base;
        next();
        bool neg = false;
        bool paren = false;
        if (at_op('(')) {
            next();
            paren = true;
        }
        if (at_op('-')) {
            next();
            neg = true;
        }
        const Token& t = peek();
        if (t.kind == Tok::Ident) fail("non-rational construct: symbolic exponent '" + t.text + "'", t);
        if (t.kind != Tok::Number) fail("expected integer exponent", t);
        if (t.text.find_first_of(".eE") != std::string::npos)
            fail("non-rational construct: non-integer exponent '" + t.text + "'", t);
        next();
        if (paren) {
            if (!at_op(')')) fail("expected ')'", peek());
            next();
        }
        if (t.text.size() > 6) fail("exponent too large '" + t.text + "'", t);
        int e = std::stoi(t.text);
        if (neg) e = -e;
        if (e < 0 && base.is_zero()) fail("division by zero", t);
        if (at_op('^')) fail("chained exponent; use parentheses", peek());
        return base.pow(e);
    }

    RationalFunction primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            next();
            return RationalFunction(parse_number(t.text));
        }
        if (t.kind == Tok::Ident) {
            next();
            if (at_op('(')) fail("non-rational construct: function call '" + t.text + "'", t);
            if (t.text == "t") fail("time symbol 't' may not appear in expressions", t);
            auto id = table_.find(t.text);
            if (!id || table_.kind(*id) == SymbolKind::Time)
                fail("undeclared symbol '" + t.text + "'", t);
            return RationalFunction::var(*id);
        }
        if (at_op('(')) {
            next();
            RationalFunction e = expr();
            if (!at_op(')')) fail("expected ')'", peek());
            next();
            return e;
        }
        fail(t.kind == Tok::End ? "unexpected end of expression" : "unexpected token '" + t.text + "'", t);
    }

    const std::vector<Token>& toks_;
    std::size_t pos_;
    int line_;
    const SymbolTable& table_;
};

struct Line {
    int number;
    std::vector<Token> toks;
};

struct Decl {
    std::string name;
    int line;
    int col;
};

}  // namespace

RationalFunction parse_expression(std::string_view text, const SymbolTable& table) {
    auto toks = lex(text, 1);
    return ExprParser(toks, 0, 1, table).parse_all();
}

ModelDef parse_model(std::string_view text) {
    std::vector<Line> lines;
    {
        int n = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view raw = text.substr(start, end - start);
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            ++n;
            auto toks = lex(raw, n);
            if (toks.front().kind != Tok::End) lines.push_back({n, std::move(toks)});
            start = end + 1;
        }
    }

    std::string model_name;
    int model_line = 0;
    std::vector<Decl> states, params, inputs;
    std::set<std::string> declared;
    std::vector<const Line*> equations;

    for (const auto& ln : lines) {
        const auto& toks = ln.toks;
        const Token& head = toks.front();
        if (head.kind == Tok::Ident && head.text == "model") {
            if (model_line) throw ParseError("duplicate model declaration", ln.number, head.col, head.text);
            if (toks[1].kind != Tok::Ident)
                throw ParseError("expected model name", ln.number, toks[1].col, toks[1].text);
            if (toks[2].kind != Tok::End)
                throw ParseError("unexpected token '" + toks[2].text + "'", ln.number, toks[2].col, toks[2].text);
            model_name = toks[1].text;
            model_line = ln.number;
        } else if (head.kind == Tok::Ident && (head.text == "states" || head.text == "params" || head.text == "inputs")) {
            auto& dst = head.text == "states" ? states : head.text == "params" ? params : inputs;
            std::size_t i = 1;
            while (true) {
                const Token& id = toks[i];
                if (id.kind != Tok::Ident)
                    throw ParseError("expected identifier", ln.number, id.col, id.kind == Tok::End ? "<end of line>" : id.text);
                if (kReserved.count(id.text))
                    throw ParseError("reserved name '" + id.text + "'", ln.number, id.col, id.text);
                if (!declared.insert(id.text).second)
                    throw ParseError("duplicate declaration '" + id.text + "'", ln.number, id.col, id.text);
                dst.push_back({id.text, ln.number, id.col});
                ++i;
                if (toks[i].kind == Tok::End) break;
                if (!(toks[i].kind == Tok::Op && toks[i].text == ","))
                    throw ParseError("expected ','", ln.number, toks[i].col, toks[i].text);
                ++i;
            }
        } else {
            equations.push_back(&ln);
        }
    }

    if (!model_line) throw ParseError("missing 'model <name>' line", 0, 0, "");
    if (states.empty()) throw ParseError("no states declared", model_line, 1, "model");

    ModelDef m;
    m.name = model_name;
    m.table = std::make_shared<SymbolTable>();
    m.time = m.table->add("t", SymbolKind::Time);
    for (const auto& d : states) m.states.push_back(m.table->add(d.name, SymbolKind::State));
    for (const auto& d : params) m.params.push_back(m.table->add(d.name, SymbolKind::Param));
    for (const auto& d : inputs) m.inputs.push_back(m.table->add(d.name, SymbolKind::Input));

    std::set<std::string> output_names;
    for (const Line* ln : equations) {
        const auto& toks = ln->toks;
        const Token& head = toks.front();
        if (head.kind == Tok::Ident && head.text == "output") {
            const Token& name = toks[1];
            if (name.kind != Tok::Ident)
                throw ParseError("expected output name", ln->number, name.col, name.text);
            if (!(toks[2].kind == Tok::Op && toks[2].text == "="))
                throw ParseError("expected '='", ln->number, toks[2].col, toks[2].text);
            if (declared.count(name.text) || kReserved.count(name.text))
                throw ParseError("output name '" + name.text + "' clashes with a declared symbol", ln->number, name.col,
                                 name.text);
            if (!output_names.insert(name.text).second)
                throw ParseError("duplicate output '" + name.text + "'", ln->number, name.col, name.text);
            RationalFunction e = ExprParser(toks, 3, ln->number, *m.table).parse_all();
            m.outputs.push_back({name.text, std::move(e)});
            continue;
        }
        const bool shaped = head.kind == Tok::Ident && head.text.size() > 1 && head.text[0] == 'd' &&
                            toks[1].kind == Tok::Op && toks[1].text == "/" && toks[2].kind == Tok::Ident &&
                            toks[2].text == "dt";
        if (!shaped) {
            std::string what = head.kind == Tok::Ident ? "unknown statement '" + head.text + "'"
                                                       : "unexpected token '" + head.text + "'";
            throw ParseError(what, ln->number, head.col, head.text);
        }
        if (!(toks[3].kind == Tok::Op && toks[3].text == "="))
            throw ParseError("expected '='", ln->number, toks[3].col, toks[3].text);
        const std::string sname = head.text.substr(1);
        auto sid = m.table->find(sname);
        if (!sid || m.table->kind(*sid) != SymbolKind::State)
            throw ParseError("undeclared state '" + sname + "'", ln->number, head.col + 1, sname);
        if (m.dynamics.count(*sid))
            throw ParseError("duplicate dynamics for '" + sname + "'", ln->number, head.col, head.text);
        m.dynamics.emplace(*sid, ExprParser(toks, 4, ln->number, *m.table).parse_all());
    }

    for (std::size_t i = 0; i < m.states.size(); ++i)
        if (!m.dynamics.count(m.states[i]))
            throw ParseError("missing dynamics for state '" + states[i].name + "'", states[i].line, states[i].col,
                             states[i].name);
    if (m.outputs.empty()) throw ParseError("no output declared", model_line, 1, "model");
    return m;
}

std::string print_model(const ModelDef& m) {
    const SymbolTable& t = *m.table;
    std::ostringstream os;
    auto list = [&](const char* kw, const std::vector<SymbolId>& ids) {
        if (ids.empty()) return;
        os << kw << ' ';
        for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? ", " : "") << t.name(ids[i]);
        os << '\n';
    };
    os << "model " << m.name << '\n';
    list("states", m.states);
    list("params", m.params);
    list("inputs", m.inputs);
    for (auto s : m.states) os << 'd' << t.name(s) << "/dt = " << to_string(m.rhs(s), t) << '\n';
    for (const auto& o : m.outputs) os << "output " << o.name << " = " << to_string(o.expr, t) << '\n';
    return os.str();
}

nlohmann::ordered_json export_model(const ModelDef& m) {
    const SymbolTable& t = *m.table;
    nlohmann::ordered_json doc;
    doc["name"] = m.name;
    doc["states"] = names(t, m.states);
    doc["params"] = names(t, m.params);
    doc["inputs"] = names(t, m.inputs);
    doc["dynamics"] = nlohmann::ordered_json::object();
    for (auto s : m.states) doc["dynamics"][t.name(s)] = to_string(m.rhs(s), t);
    doc["outputs"] = nlohmann::ordered_json::object();
    for (const auto& o : m.outputs) doc["outputs"][o.name] = to_string(o.expr, t);
    return doc;
}

ModelDef import_model(const nlohmann::ordered_json& doc) {
    try {
        std::ostringstream os;
        os << "model " << doc.at("name").get<std::string>() << '\n';
        auto list = [&](const char* kw, const char* key) {
            if (!doc.contains(key) || doc.at(key).empty()) return;
            os << kw << ' ';
            bool first = true;
            for (const auto& v : doc.at(key)) {
                os << (first ? "" : ", ") << v.get<std::string>();
                first = false;
            }
            os << '\n';
        };
        list("states", "states");
        list("params", "params");
        list("inputs", "inputs");
        for (const auto& [k, v] : doc.at("dynamics").items()) os << 'd' << k << "/dt = " << v.get<std::string>() << '\n';
        for (const auto& [k, v] : doc.at("outputs").items()) os << "output " << k << " = " << v.get<std::string>() << '\n';
        return parse_model(os.str());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what(), 0, 0, "");
    }
}

ModelDef load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("modelspec", "cannot read model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const bool json_like = path.size() > 5 && path.substr(path.size() - 5) == ".json";
    if (json_like) {
        nlohmann::ordered_json doc;
        try {
            doc = nlohmann::ordered_json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed model document: ") + e.what(), 0, 0, "");
        }
        return import_model(doc);
    }
    return parse_model(text);
}

const std::vector<FixtureInfo>& fixture_list() {
    static const std::vector<FixtureInfo> list = {
        {FixtureId::Decay, "decay", "decay.psm"},
        {FixtureId::Linear, "linear", "linear.psm"},
        {FixtureId::Glucose, "glucose", "glucose.psm"},
        {FixtureId::Sei, "sei", "sei.psm"},
    };
    return list;
}

std::optional<FixtureId> fixture_from_key(std::string_view key) {
    for (const auto& f : fixture_list())
        if (f.key == key) return f.id;
    return std::nullopt;
}

ModelDef load_fixture(FixtureId id) { return parse_model(fixture_text(id)); }

}  // namespace psym
