#include "gnfo/logic/formula.hpp"

#include <algorithm>
#include <functional>

namespace gnfo {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

}  // namespace

FormulaPtr f_atom(Atom a)
{
    Formula f;
    f.kind = FormulaKind::atom;
    f.atom = std::move(a);
    return make(std::move(f));
}

FormulaPtr f_eq(Term l, Term r)
{
    Formula f;
    f.kind = FormulaKind::equality;
    f.lhs = std::move(l);
    f.rhs = std::move(r);
    return make(std::move(f));
}

FormulaPtr f_exists(const std::string& v, FormulaPtr body)
{
    Formula f;
    f.kind = FormulaKind::exists;
    f.var = v;
    f.kids = {std::move(body)};
    return make(std::move(f));
}

FormulaPtr f_exists(const std::vector<std::string>& vs, FormulaPtr body)
{
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = f_exists(*it, body);
    return body;
}

FormulaPtr f_forall(const std::string& v, FormulaPtr body)
{
    Formula f;
    f.kind = FormulaKind::forall;
    f.var = v;
    f.kids = {std::move(body)};
    return make(std::move(f));
}

FormulaPtr f_forall(const std::vector<std::string>& vs, FormulaPtr body)
{
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = f_forall(*it, body);
    return body;
}

FormulaPtr f_and(std::vector<FormulaPtr> kids)
{
    if (kids.size() == 1) return kids.front();
    Formula f;
    f.kind = FormulaKind::conj;
    f.kids = std::move(kids);
    return make(std::move(f));
}

FormulaPtr f_or(std::vector<FormulaPtr> kids)
{
    if (kids.size() == 1) return kids.front();
    Formula f;
    f.kind = FormulaKind::disj;
    f.kids = std::move(kids);
    return make(std::move(f));
}

FormulaPtr f_not(FormulaPtr body)
{
    Formula f;
    f.kind = FormulaKind::neg;
    f.kids = {std::move(body)};
    return make(std::move(f));
}

FormulaPtr f_implies(FormulaPtr lhs, FormulaPtr rhs) { return f_or({f_not(std::move(lhs)), std::move(rhs)}); }

FormulaPtr f_true()
{
    Formula f;
    f.kind = FormulaKind::conj;
    return make(std::move(f));
}

namespace {

void collect_free(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out)
{
    switch (f->kind) {
    case FormulaKind::atom:
        for (const Term& t : f->atom.args)
            if (t.is_var() && !bound.count(t.name)) out.insert(t.name);
        break;
    case FormulaKind::equality:
        for (const Term* t : {&f->lhs, &f->rhs})
            if (t->is_var() && !bound.count(t->name)) out.insert(t->name);
        break;
    case FormulaKind::exists:
    case FormulaKind::forall: {
        bool fresh = bound.insert(f->var).second;
        collect_free(f->kids[0], bound, out);
        if (fresh) bound.erase(f->var);
        break;
    }
    default:
        for (const auto& k : f->kids) collect_free(k, bound, out);
    }
}

void visit(const FormulaPtr& f, const std::function<void(const Formula&)>& fn)
{
    fn(*f);
    for (const auto& k : f->kids) visit(k, fn);
}

}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f)
{
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

std::set<std::string> formula_constants(const FormulaPtr& f)
{
    std::set<std::string> out;
    visit(f, [&](const Formula& n) {
        if (n.kind == FormulaKind::atom) {
            for (const Term& t : n.atom.args)
                if (!t.is_var()) out.insert(t.name);
        } else if (n.kind == FormulaKind::equality) {
            if (!n.lhs.is_var()) out.insert(n.lhs.name);
            if (!n.rhs.is_var()) out.insert(n.rhs.name);
        }
    });
    return out;
}

std::map<std::string, int> formula_relations(const FormulaPtr& f)
{
    std::map<std::string, int> out;
    visit(f, [&](const Formula& n) {
        if (n.kind != FormulaKind::atom) return;
        auto [it, fresh] = out.emplace(n.atom.relation, static_cast<int>(n.atom.args.size()));
        if (!fresh && it->second != static_cast<int>(n.atom.args.size()))
            throw Error("arity mismatch for relation " + n.atom.relation);
    });
    return out;
}

int quantifier_depth(const FormulaPtr& f)
{
    int d = 0;
    for (const auto& k : f->kids) d = std::max(d, quantifier_depth(k));
    if (f->kind == FormulaKind::exists || f->kind == FormulaKind::forall) ++d;
    return d;
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b)
{
    if (a->kind != b->kind) return false;
    if (a->kind == FormulaKind::atom && !(a->atom == b->atom)) return false;
    if (a->kind == FormulaKind::equality && !(a->lhs == b->lhs && a->rhs == b->rhs)) return false;
    if (a->var != b->var || a->kids.size() != b->kids.size()) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!structurally_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

namespace {

bool is_implication(const Formula& f)
{
    return f.kind == FormulaKind::disj && f.kids.size() == 2 && f.kids[0]->kind == FormulaKind::neg;
}

std::string render(const FormulaPtr& f, bool nested);

std::string render_quantifier(const FormulaPtr& f)
{
    std::string word = f->kind == FormulaKind::exists ? "exists " : "forall ";
    std::string vars = f->var;
    FormulaPtr body = f->kids[0];
    while (body->kind == f->kind) {
        vars += "," + body->var;
        body = body->kids[0];
    }
    return word + vars + ". " + render(body, false);
}

std::string render(const FormulaPtr& f, bool nested)
{
    switch (f->kind) {
    case FormulaKind::atom:
        return to_string(f->atom);
    case FormulaKind::equality: {
        std::string s = f->lhs.name + " = " + f->rhs.name;
        return nested ? "(" + s + ")" : s;
    }
    case FormulaKind::neg:
        if (f->kids[0]->kind == FormulaKind::atom) return "!" + render(f->kids[0], true);
        return "!(" + render(f->kids[0], false) + ")";
    case FormulaKind::exists:
    case FormulaKind::forall: {
        std::string s = render_quantifier(f);
        return nested ? "(" + s + ")" : s;
    }
    case FormulaKind::conj:
    case FormulaKind::disj: {
        if (f->kids.empty()) return f->kind == FormulaKind::conj ? "true" : "false";
        std::string s;
        if (is_implication(*f)) {
            s = render(f->kids[0]->kids[0], true) + " -> " + render(f->kids[1], true);
        } else {
            const char* op = f->kind == FormulaKind::conj ? " & " : " | ";
            for (std::size_t i = 0; i < f->kids.size(); ++i) {
                if (i) s += op;
                s += render(f->kids[i], true);
            }
        }
        return nested ? "(" + s + ")" : s;
    }
    }
    return "";
}

}  // namespace

std::string to_string(const FormulaPtr& f) { return render(f, false); }

std::string to_string(FragmentVerdict v)
{
    switch (v) {
    case FragmentVerdict::gnf: return "gnf";
    case FragmentVerdict::gfo: return "gfo";
    case FragmentVerdict::both: return "both";
    case FragmentVerdict::neither: return "neither";
    }
    return "";
}

namespace {

std::set<std::string> vars_of_atomic(const Formula& f)
{
    std::set<std::string> out;
    if (f.kind == FormulaKind::atom) {
        for (const Term& t : f.atom.args)
            if (t.is_var()) out.insert(t.name);
    } else if (f.kind == FormulaKind::equality) {
        if (f.lhs.is_var()) out.insert(f.lhs.name);
        if (f.rhs.is_var()) out.insert(f.rhs.name);
    }
    return out;
}

bool is_atomic(const Formula& f) { return f.kind == FormulaKind::atom || f.kind == FormulaKind::equality; }

bool covers(const Formula& guard, const std::set<std::string>& need)
{
    if (!is_atomic(guard)) return false;
    auto have = vars_of_atomic(guard);
    return std::includes(have.begin(), have.end(), need.begin(), need.end());
}

void gnf_walk(const FormulaPtr& f, bool guarded_here, std::vector<Violation>& out)
{
    switch (f->kind) {
    case FormulaKind::atom:
    case FormulaKind::equality:
        return;
    case FormulaKind::forall:
        out.push_back({to_string(f), "universal quantifier is outside the GNF grammar"});
        gnf_walk(f->kids[0], false, out);
        return;
    case FormulaKind::exists:
        gnf_walk(f->kids[0], false, out);
        return;
    case FormulaKind::disj:
        for (const auto& k : f->kids) gnf_walk(k, false, out);
        return;
    case FormulaKind::neg: {
        auto fv = free_vars(f->kids[0]);
        if (!guarded_here && fv.size() > 1)
            out.push_back({to_string(f), "negation is not conjoined with a guard covering its free variables"});
        gnf_walk(f->kids[0], false, out);
        return;
    }
    case FormulaKind::conj:
        for (const auto& k : f->kids) {
            bool guarded = false;
            if (k->kind == FormulaKind::neg) {
                auto fv = free_vars(k->kids[0]);
                for (const auto& g : f->kids)
                    if (g != k && covers(*g, fv)) guarded = true;
            }
            gnf_walk(k, guarded, out);
        }
        return;
    }
}

void gfo_walk(const FormulaPtr& f, std::vector<Violation>& out)
{
    if (f->kind == FormulaKind::exists || f->kind == FormulaKind::forall) {
        FormulaPtr body = f->kids[0];
        while (body->kind == f->kind) body = body->kids[0];
        auto fv = free_vars(body);
        bool ok = fv.size() <= 1;
        if (!ok && f->kind == FormulaKind::exists) {
            if (is_atomic(*body)) ok = true;
            if (body->kind == FormulaKind::conj)
                for (const auto& k : body->kids)
                    if (covers(*k, fv)) ok = true;
        }
        if (!ok && f->kind == FormulaKind::forall) {
            if (body->kind == FormulaKind::neg && covers(*body->kids[0], fv)) ok = true;
            if (body->kind == FormulaKind::disj)
                for (const auto& k : body->kids)
                    if (k->kind == FormulaKind::neg && covers(*k->kids[0], fv)) ok = true;
        }
        if (!ok) out.push_back({to_string(f), "quantifier is not guarded by an atom covering the free variables"});
        gfo_walk(body, out);
        return;
    }
    for (const auto& k : f->kids) gfo_walk(k, out);
}

FragmentVerdict combine(bool gnf, bool gfo)
{
    if (gnf && gfo) return FragmentVerdict::both;
    if (gnf) return FragmentVerdict::gnf;
    if (gfo) return FragmentVerdict::gfo;
    return FragmentVerdict::neither;
}

}  // namespace

GnfCheckReport check_gnf(const FormulaPtr& f)
{
    std::vector<Violation> gnf, gfo;
    gnf_walk(f, false, gnf);
    gfo_walk(f, gfo);
    GnfCheckReport r;
    r.verdict = combine(gnf.empty(), gfo.empty());
    r.accepted = gnf.empty();
    r.violations = std::move(gnf);
    return r;
}

GnfCheckReport check_gfo(const FormulaPtr& f)
{
    std::vector<Violation> gnf, gfo;
    gnf_walk(f, false, gnf);
    gfo_walk(f, gfo);
    GnfCheckReport r;
    r.verdict = combine(gnf.empty(), gfo.empty());
    r.accepted = gfo.empty();
    r.violations = std::move(gfo);
    return r;
}

namespace {

struct Evaluator {
    const Instance& I;
    const std::set<Value>& domain;
    std::map<std::string, Value> binding;
    std::map<std::string, std::vector<std::set<Value>>> columns;

    Evaluator(const Instance& inst, const std::set<Value>& dom, std::map<std::string, Value> b)
        : I(inst), domain(dom), binding(std::move(b))
    {
        for (const Fact& fact : I.facts) {
            auto& cols = columns[fact.relation];
            if (cols.size() < fact.args.size()) cols.resize(fact.args.size());
            for (std::size_t i = 0; i < fact.args.size(); ++i) cols[i].insert(fact.args[i]);
        }
    }

    Value term(const Term& t) const
    {
        if (!t.is_var()) return I.constant_value(t.name);
        auto it = binding.find(t.name);
        if (it == binding.end()) throw Error("unbound variable " + t.name);
        return it->second;
    }

    // Values an atom can give to `var`, or nullptr if `var` is absent.
    const std::set<Value>* column(const Formula& a, const std::string& var) const
    {
        if (a.kind != FormulaKind::atom) return nullptr;
        for (std::size_t i = 0; i < a.atom.args.size(); ++i) {
            if (a.atom.args[i].is_var() && a.atom.args[i].name == var) {
                static const std::set<Value> none;
                auto it = columns.find(a.atom.relation);
                if (it == columns.end() || it->second.size() <= i) return &none;
                return &it->second[i];
            }
        }
        return nullptr;
    }

    // Candidate witnesses: for ∃ the guard's column, for ∀ the column of a
    // negated disjunct (only those can falsify the body).
    const std::set<Value>* candidates(const Formula& q) const
    {
        const Formula& body = *q.kids[0];
        if (q.kind == FormulaKind::exists) {
            if (auto c = column(body, q.var)) return c;
            if (body.kind == FormulaKind::conj)
                for (const auto& k : body.kids)
                    if (auto c = column(*k, q.var)) return c;
        } else {
            if (body.kind == FormulaKind::neg)
                if (auto c = column(*body.kids[0], q.var)) return c;
            if (body.kind == FormulaKind::disj)
                for (const auto& k : body.kids)
                    if (k->kind == FormulaKind::neg)
                        if (auto c = column(*k->kids[0], q.var)) return c;
        }
        return nullptr;
    }

    bool eval(const Formula& f)
    {
        switch (f.kind) {
        case FormulaKind::atom: {
            Fact fact{f.atom.relation, {}};
            for (const Term& t : f.atom.args) fact.args.push_back(term(t));
            return I.contains(fact);
        }
        case FormulaKind::equality:
            return term(f.lhs) == term(f.rhs);
        case FormulaKind::neg:
            return !eval(*f.kids[0]);
        case FormulaKind::conj:
            for (const auto& k : f.kids)
                if (!eval(*k)) return false;
            return true;
        case FormulaKind::disj:
            for (const auto& k : f.kids)
                if (eval(*k)) return true;
            return false;
        case FormulaKind::exists:
        case FormulaKind::forall: {
            bool want = f.kind == FormulaKind::exists;
            const std::set<Value>* cand = candidates(f);
            const std::set<Value>& range = cand ? *cand : domain;
            auto saved = binding.find(f.var);
            std::optional<Value> old;
            if (saved != binding.end()) old = saved->second;
            bool result = !want;
            for (const Value& v : range) {
                if (cand && !domain.count(v)) continue;
                binding[f.var] = v;
                if (eval(*f.kids[0]) == want) {
                    result = want;
                    break;
                }
            }
            if (old) binding[f.var] = *old;
            else binding.erase(f.var);
            return result;
        }
        }
        return false;
    }
};

}  // namespace

bool eval_fo(const FormulaPtr& f, const Instance& I, const std::optional<std::set<Value>>& domain,
             const std::map<std::string, Value>& binding)
{
    for (const auto& v : free_vars(f))
        if (!binding.count(v)) throw Error("unbound variable " + v);
    std::set<Value> dom;
    if (domain) {
        dom = *domain;
    } else {
        dom = active_domain(I);
        for (const Value& v : I.constant_values()) dom.insert(v);
    }
    Evaluator ev(I, dom, binding);
    return ev.eval(*f);
}

namespace {

FormulaPtr relativize_rec(const FormulaPtr& f, const std::string& pred)
{
    switch (f->kind) {
    case FormulaKind::atom:
    case FormulaKind::equality:
        return f;
    case FormulaKind::exists:
        return f_exists(f->var, f_and({f_atom(make_atom(pred, {f->var})), relativize_rec(f->kids[0], pred)}));
    case FormulaKind::forall:
        return f_forall(f->var, f_implies(f_atom(make_atom(pred, {f->var})), relativize_rec(f->kids[0], pred)));
    case FormulaKind::neg:
        return f_not(relativize_rec(f->kids[0], pred));
    case FormulaKind::conj:
    case FormulaKind::disj: {
        std::vector<FormulaPtr> kids;
        for (const auto& k : f->kids) kids.push_back(relativize_rec(k, pred));
        Formula g;
        g.kind = f->kind;
        g.kids = std::move(kids);
        return make(std::move(g));
    }
    }
    return f;
}

}  // namespace

FormulaPtr relativize(const FormulaPtr& f, const std::string& pred)
{
    if (formula_relations(f).count(pred)) throw PreconditionError("relation " + pred + " already occurs in the formula");
    return relativize_rec(f, pred);
}

}  // namespace gnfo
