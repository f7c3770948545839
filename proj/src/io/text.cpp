#include "gnfo/io/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace gnfo {

namespace {

enum class Tok { ident, lparen, rparen, comma, dot, colon, semicolon, slash, arrow, turnstile, bar, amp, bang, eq, neq, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '@'; }

std::vector<Token> lex(const std::string& s)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        Token t{Tok::end, "", line, col};
        if (ident_char(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            t.kind = Tok::ident;
            t.text = s.substr(i, j - i);
            advance(j - i);
            out.push_back(t);
            continue;
        }
        auto two = s.substr(i, 2);
        std::size_t len = 1;
        if (two == "->") t.kind = Tok::arrow, len = 2;
        else if (two == ":-") t.kind = Tok::turnstile, len = 2;
        else if (two == "!=") t.kind = Tok::neq, len = 2;
        else if (c == '(') t.kind = Tok::lparen;
        else if (c == ')') t.kind = Tok::rparen;
        else if (c == ',') t.kind = Tok::comma;
        else if (c == '.') t.kind = Tok::dot;
        else if (c == ':') t.kind = Tok::colon;
        else if (c == ';') t.kind = Tok::semicolon;
        else if (c == '/') t.kind = Tok::slash;
        else if (c == '|') t.kind = Tok::bar;
        else if (c == '&') t.kind = Tok::amp;
        else if (c == '!') t.kind = Tok::bang;
        else if (c == '=') t.kind = Tok::eq;
        else throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        t.text = s.substr(i, len);
        advance(len);
        out.push_back(t);
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_word(const std::string& w) const { return at(Tok::ident) && peek().text == w; }
    bool done() const { return at(Tok::end); }
    bool ahead(Tok k) const
    {
        for (std::size_t i = pos_; i < toks_.size(); ++i)
            if (toks_[i].kind == k) return true;
        return false;
    }

    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool accept(Tok k)
    {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }

    Token expect(Tok k, const char* what)
    {
        if (!at(k)) fail(std::string("expected ") + what);
        return take();
    }

    std::string ident(const char* what = "identifier") { return expect(Tok::ident, what).text; }

    [[noreturn]] void fail(const std::string& msg) const
    {
        const Token& t = peek();
        throw ParseError(msg + (t.kind == Tok::end ? " at end of input" : " near '" + t.text + "'"), t.line, t.column);
    }

    // Value names, including compound ones such as p(a,b).
    std::string value_name()
    {
        std::string s = ident("value");
        if (at(Tok::lparen) && peek(1).kind != Tok::rparen) {
            take();
            s += "(";
            s += value_name();
            while (accept(Tok::comma)) s += "," + value_name();
            expect(Tok::rparen, "')'");
            s += ")";
        }
        return s;
    }

    Term term()
    {
        std::string n = ident("term");
        if (constants.count(n) || n == kTopConstant) return Term::cst(n);
        return Term::var(n);
    }

    Atom atom()
    {
        Atom a{ident("relation"), {}};
        expect(Tok::lparen, "'('");
        if (accept(Tok::rparen)) {
            a.args.push_back(Term::cst(kTopConstant));
            return a;
        }
        a.args.push_back(term());
        while (accept(Tok::comma)) a.args.push_back(term());
        expect(Tok::rparen, "')'");
        return a;
    }

    std::vector<Atom> atoms()
    {
        std::vector<Atom> out{atom()};
        while (accept(Tok::comma)) out.push_back(atom());
        return out;
    }

    void const_decl()
    {
        do constants.insert(ident("constant"));
        while (accept(Tok::comma));
        expect(Tok::dot, "'.'");
    }

    void rel_decl(Signature& sig)
    {
        do {
            std::string r = ident("relation");
            expect(Tok::slash, "'/'");
            Token n = expect(Tok::ident, "arity");
            int arity = 0;
            try {
                arity = std::stoi(n.text);
            } catch (const std::exception&) {
                throw ParseError("bad arity '" + n.text + "'", n.line, n.column);
            }
            try {
                sig.add_relation(r, arity);
            } catch (const Error& e) {
                throw ParseError(e.what(), n.line, n.column);
            }
        } while (accept(Tok::comma));
        expect(Tok::dot, "'.'");
    }

    // Head of a TGD: `exists z,w: atoms` or atoms.
    std::vector<Atom> tgd_head()
    {
        if (at_word("exists")) {
            take();
            do ident("variable");
            while (accept(Tok::comma));
            expect(Tok::colon, "':'");
        }
        return atoms();
    }

    NamedQuery query()
    {
        NamedQuery q;
        Atom head = atom();
        q.name = head.relation;
        std::vector<std::string> free;
        for (const Term& t : head.args) {
            if (t.kind == Term::Kind::constant && t.name == kTopConstant && head.args.size() == 1) continue;
            if (!t.is_var()) fail("query head arguments must be variables");
            free.push_back(t.name);
        }
        expect(Tok::turnstile, "':-'");
        auto body = atoms();
        accept(Tok::dot);
        q.query = ConjunctiveQuery::make(free, body);
        try {
            q.query.validate();
        } catch (const Error& e) {
            fail(e.what());
        }
        return q;
    }

    // Formula grammar, loosest first: ->, |, &, unary.
    FormulaPtr formula()
    {
        auto lhs = disjunction();
        if (accept(Tok::arrow)) return f_implies(lhs, formula());
        return lhs;
    }

    FormulaPtr disjunction()
    {
        std::vector<FormulaPtr> kids{conjunction()};
        while (accept(Tok::bar)) kids.push_back(conjunction());
        return kids.size() == 1 ? kids[0] : f_or(kids);
    }

    FormulaPtr conjunction()
    {
        std::vector<FormulaPtr> kids{unary()};
        while (accept(Tok::amp)) kids.push_back(unary());
        return kids.size() == 1 ? kids[0] : f_and(kids);
    }

    FormulaPtr unary()
    {
        if (accept(Tok::bang)) return f_not(unary());
        if (accept(Tok::lparen)) {
            auto f = formula();
            expect(Tok::rparen, "')'");
            return f;
        }
        if (at_word("exists") || at_word("forall")) {
            bool ex = take().text == "exists";
            std::vector<std::string> vs{ident("variable")};
            while (accept(Tok::comma)) vs.push_back(ident("variable"));
            expect(Tok::dot, "'.'");
            auto body = formula();
            return ex ? f_exists(vs, body) : f_forall(vs, body);
        }
        if (at_word("true") && peek(1).kind != Tok::lparen) {
            take();
            return f_true();
        }
        if (at_word("false") && peek(1).kind != Tok::lparen) {
            take();
            return f_or({});
        }
        if (at(Tok::ident) && peek(1).kind == Tok::lparen) return f_atom(atom());
        Term l = term();
        if (accept(Tok::eq)) return f_eq(l, term());
        if (accept(Tok::neq)) return f_not(f_eq(l, term()));
        fail("expected atom or equality");
    }

    std::set<std::string> constants;

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

Value parse_value(const std::string& n, const std::set<std::string>& constants)
{
    if (n == kTopConstant || constants.count(n)) return Value::constant(n);
    if (n.size() > 2 && n.rfind("_n", 0) == 0 &&
        std::all_of(n.begin() + 2, n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return Value::null(std::stol(n.substr(2)));
    return Value::element(n);
}

template <class F>
auto wrap(const Token& at, F&& f)
{
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), at.line, at.column);
    }
}

std::string const_line(const std::set<std::string>& cs)
{
    if (cs.empty()) return "";
    std::string s = "const ";
    bool first = true;
    for (const auto& c : cs) {
        if (c == kTopConstant) continue;
        s += (first ? "" : ", ") + c;
        first = false;
    }
    return first ? "" : s + ".\n";
}

std::string rel_line(const std::string& word, const Signature& sig)
{
    if (sig.relations.empty()) return "";
    std::string s = word + " ";
    for (std::size_t i = 0; i < sig.relations.size(); ++i)
        s += (i ? ", " : "") + sig.relations[i].first + "/" + std::to_string(sig.relations[i].second);
    return s + ".\n";
}

}  // namespace

Theory parse_theory(const std::string& text)
{
    Parser p(text);
    Theory th;
    // Once a `rel` line has been seen, relations must be declared.
    bool strict = false;
    auto declare = [&](const std::vector<Atom>& atoms) {
        for (const Atom& a : atoms)
            if (strict && !th.signature.has_relation(a.relation)) throw Error("undeclared relation " + a.relation);
        declare_atoms(th.signature, atoms);
    };
    while (!p.done()) {
        if (p.at_word("rel")) {
            p.take();
            p.rel_decl(th.signature);
            strict = true;
        } else if (p.at_word("const")) {
            p.take();
            p.const_decl();
        } else if (p.at_word("tgd")) {
            const Token start = p.peek();
            p.take();
            auto body = p.atoms();
            p.expect(Tok::arrow, "'->'");
            std::vector<std::vector<Atom>> heads{p.tgd_head()};
            while (p.accept(Tok::bar)) heads.push_back(p.tgd_head());
            p.expect(Tok::dot, "'.'");
            wrap(start, [&] {
                if (heads.size() == 1) {
                    Tgd t{body, heads[0]};
                    t.validate();
                    th.tgds.push_back(t);
                } else {
                    DisjunctiveTgd d{body, heads};
                    d.validate();
                    th.disjunctive.push_back(d);
                }
                declare(body);
                for (const auto& h : heads) declare(h);
                return 0;
            });
        } else if (p.at_word("query")) {
            const Token start = p.peek();
            p.take();
            auto q = p.query();
            wrap(start, [&] {
                declare(q.query.atoms);
                return 0;
            });
            th.queries.push_back(std::move(q));
        } else {
            p.fail("expected rel, const, tgd or query");
        }
    }
    for (const auto& c : p.constants) th.signature.add_constant(c);
    return th;
}

Instance parse_instance(const std::string& text)
{
    Parser p(text);
    Instance I;
    std::vector<std::pair<std::string, std::string>> interp;
    struct RawFact {
        std::string rel;
        std::vector<std::string> args;
        int line, column;
    };
    std::vector<RawFact> raw;
    while (!p.done()) {
        if (p.at_word("const") && p.peek(1).kind == Tok::ident) {
            p.take();
            do {
                std::string c = p.ident("constant");
                p.constants.insert(c);
                std::string v = c;
                if (p.accept(Tok::eq)) v = p.value_name();
                interp.emplace_back(c, v);
            } while (p.accept(Tok::comma));
            p.expect(Tok::dot, "'.'");
            continue;
        }
        const auto start = p.peek(0);
        std::string rel = p.ident("relation");
        p.expect(Tok::lparen, "'('");
        std::vector<std::string> args;
        if (!p.accept(Tok::rparen)) {
            args.push_back(p.value_name());
            while (p.accept(Tok::comma)) args.push_back(p.value_name());
            p.expect(Tok::rparen, "')'");
        }
        p.expect(Tok::dot, "'.'");
        if (args.empty()) args.push_back(kTopConstant);
        raw.push_back({rel, args, start.line, start.column});
    }
    for (const auto& [c, v] : interp) {
        I.declare_constant(c);
        I.interpret_constant(c, c == v ? Value::constant(c) : parse_value(v, p.constants));
    }
    for (const auto& r : raw) {
        Fact f{r.rel, {}};
        for (const auto& a : r.args) f.args.push_back(parse_value(a, p.constants));
        try {
            I.add(f);
        } catch (const Error& e) {
            throw ParseError(std::string(e.what()) + " in " + to_string(f), r.line, r.column);
        }
    }
    return I;
}

NamedQuery parse_query(const std::string& text)
{
    Parser p(text);
    while (p.at_word("const")) {
        p.take();
        p.const_decl();
    }
    if (p.at_word("query")) p.take();
    if (!p.ahead(Tok::turnstile)) {
        // A bare body; its variables are the answer variables.
        auto body = p.atoms();
        p.accept(Tok::dot);
        if (!p.done()) p.fail("trailing input after query");
        return {body.size() == 1 ? body[0].relation : "Q", ConjunctiveQuery::make(vars_of(body), body)};
    }
    auto q = p.query();
    if (!p.done()) p.fail("trailing input after query");
    return q;
}

DatalogProgram parse_datalog(const std::string& text)
{
    Parser p(text);
    DatalogProgram P;
    std::vector<Token> starts;
    while (!p.done()) {
        if (p.at_word("edb") && p.peek(1).kind == Tok::ident) {
            p.take();
            p.rel_decl(P.edb);
        } else if (p.at_word("idb") && p.peek(1).kind == Tok::ident) {
            p.take();
            p.rel_decl(P.idb);
        } else if (p.at_word("const") && p.peek(1).kind == Tok::ident) {
            p.take();
            p.const_decl();
        } else if (p.at_word("goal") && p.peek(1).kind == Tok::ident) {
            p.take();
            P.goal = p.ident("goal relation");
            p.expect(Tok::dot, "'.'");
        } else {
            starts.push_back(p.peek());
            DatalogRule r{p.atom(), {}};
            p.expect(Tok::turnstile, "':-'");
            r.body = p.atoms();
            p.expect(Tok::dot, "'.'");
            P.rules.push_back(std::move(r));
        }
    }
    const Token& end = p.peek();
    if (P.goal.empty()) throw ParseError("missing goal declaration", end.line, end.column);
    for (std::size_t i = 0; i < P.rules.size(); ++i) {
        const DatalogRule& r = P.rules[i];
        if (P.edb.has_relation(r.head.relation))
            throw ParseError("edb relation " + r.head.relation + " occurs in a rule head", starts[i].line,
                             starts[i].column);
        try {
            P.idb.add_relation(r.head.relation, static_cast<int>(r.head.args.size()));
            for (const Atom& a : r.body)
                if (!P.idb.has_relation(a.relation) && !P.edb.has_relation(a.relation))
                    P.edb.add_relation(a.relation, static_cast<int>(a.args.size()));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), starts[i].line, starts[i].column);
        }
    }
    // Relations used in bodies before their defining rule were guessed as EDB.
    Signature edb;
    for (const auto& [r, a] : P.edb.relations)
        if (!P.idb.has_relation(r)) edb.add_relation(r, a);
    P.edb = edb;
    if (!P.idb.has_relation(P.goal)) P.idb.add_relation(P.goal, 1);
    try {
        P.validate();
    } catch (const Error& e) {
        throw ParseError(e.what(), end.line, end.column);
    }
    return P;
}

FormulaPtr parse_formula(const std::string& text)
{
    Parser p(text);
    if (p.at_word("const") && p.peek(1).kind == Tok::ident) {
        p.take();
        p.const_decl();
    }
    auto f = p.formula();
    p.accept(Tok::dot);
    if (!p.done()) p.fail("trailing input after formula");
    return f;
}

std::string print_theory(const Theory& t)
{
    std::string s = rel_line("rel", t.signature);
    std::set<std::string> cs(t.signature.constants.begin(), t.signature.constants.end());
    for (const Tgd& r : t.tgds) {
        auto a = constants_of(r.body), b = constants_of(r.head);
        cs.insert(a.begin(), a.end());
        cs.insert(b.begin(), b.end());
    }
    s += const_line(cs);
    for (const Tgd& r : t.tgds) s += "tgd " + to_string(r) + ".\n";
    for (const DisjunctiveTgd& r : t.disjunctive) s += "tgd " + to_string(r) + ".\n";
    for (const NamedQuery& q : t.queries) s += "query " + to_string(q.query, q.name) + ".\n";
    return s;
}

std::string print_instance(const Instance& I)
{
    std::string s;
    std::set<std::string> declared;
    for (const auto& [c, v] : I.constants) {
        declared.insert(c);
        s += "const " + c;
        if (!(v.kind == ValueKind::constant && v.name == c)) s += " = " + v.name;
        s += ".\n";
    }
    std::set<std::string> extra;
    for (const Fact& f : I.facts)
        for (const Value& v : f.args)
            if (v.kind == ValueKind::constant && v.name != kTopConstant && !declared.count(v.name)) extra.insert(v.name);
    s += const_line(extra);
    for (const Fact& f : I.facts) {
        if (f.args.size() == 1 && f.args[0].kind == ValueKind::constant && f.args[0].name == kTopConstant)
            s += f.relation + "().\n";
        else
            s += to_string(f) + ".\n";
    }
    return s;
}

std::string print_query(const NamedQuery& q)
{
    return const_line(constants_of(q.query.atoms)) + to_string(q.query, q.name) + ".\n";
}

std::string print_datalog(const DatalogProgram& P)
{
    std::string s = rel_line("edb", P.edb) + rel_line("idb", P.idb);
    std::set<std::string> cs;
    for (const DatalogRule& r : P.rules) {
        auto a = constants_of(r.body), b = constants_of({r.head});
        cs.insert(a.begin(), a.end());
        cs.insert(b.begin(), b.end());
    }
    s += const_line(cs);
    s += "goal " + P.goal + ".\n";
    for (const DatalogRule& r : P.rules) s += to_string(r) + "\n";
    return s;
}

std::string print_formula(const FormulaPtr& f) { return const_line(formula_constants(f)) + to_string(f) + "\n"; }

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gnfo
