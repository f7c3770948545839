#include "gnfo/logic/constructions.hpp"

#include <algorithm>

namespace gnfo {

FormulaPtr tgd_to_gnf(const Tgd& t)
{
    if (!is_frontier_guarded(t)) throw PreconditionError("tgd is not frontier-guarded: " + to_string(t));
    std::vector<FormulaPtr> head;
    for (const Atom& a : t.head) head.push_back(f_atom(a));
    std::vector<FormulaPtr> body;
    for (const Atom& a : t.body) body.push_back(f_atom(a));
    body.push_back(f_not(f_exists(t.existentials(), f_and(head))));
    return f_not(f_exists(t.body_vars(), f_and(body)));
}

FormulaPtr substitute_free(const FormulaPtr& f, const std::map<std::string, Term>& theta)
{
    auto sub = [&](const Term& t) {
        if (!t.is_var()) return t;
        auto it = theta.find(t.name);
        return it == theta.end() ? t : it->second;
    };
    switch (f->kind) {
    case FormulaKind::atom:
        return f_atom(substitute(f->atom, theta));
    case FormulaKind::equality:
        return f_eq(sub(f->lhs), sub(f->rhs));
    case FormulaKind::exists:
    case FormulaKind::forall: {
        auto inner = theta;
        inner.erase(f->var);
        auto body = substitute_free(f->kids[0], inner);
        return f->kind == FormulaKind::exists ? f_exists(f->var, body) : f_forall(f->var, body);
    }
    case FormulaKind::neg:
        return f_not(substitute_free(f->kids[0], theta));
    case FormulaKind::conj:
    case FormulaKind::disj: {
        std::vector<FormulaPtr> kids;
        for (const auto& k : f->kids) kids.push_back(substitute_free(k, theta));
        return f->kind == FormulaKind::conj ? f_and(kids) : f_or(kids);
    }
    }
    return f;
}

namespace {

// Replaces each free variable v by the constant `_d<v>`.
std::pair<FormulaPtr, std::vector<std::string>> freeze(const FormulaPtr& phi)
{
    std::map<std::string, Term> theta;
    std::vector<std::string> names;
    for (const auto& v : free_vars(phi)) {
        names.push_back("_d" + v);
        theta[v] = Term::cst(names.back());
    }
    return {substitute_free(phi, theta), names};
}

void require_fresh(const FormulaPtr& phi, const std::string& pred)
{
    if (formula_relations(phi).count(pred)) throw PreconditionError("relation " + pred + " already occurs in the formula");
}

}  // namespace

FormulaPtr build_extension_preservation_sentence(const FormulaPtr& phi, const std::string& pred)
{
    require_fresh(phi, pred);
    auto [frozen, fresh] = freeze(phi);
    std::vector<FormulaPtr> lhs;
    for (const auto& c : formula_constants(frozen)) lhs.push_back(f_atom(Atom{pred, {Term::cst(c)}}));
    lhs.push_back(relativize(frozen, pred));
    return f_implies(f_and(lhs), frozen);
}

FormulaPtr build_domain_independence_sentence(const FormulaPtr& phi, const std::string& d1, const std::string& d2)
{
    require_fresh(phi, d1);
    require_fresh(phi, d2);
    auto [frozen, fresh] = freeze(phi);
    auto rels = formula_relations(frozen);
    auto axioms = [&](const std::string& d) {
        std::vector<FormulaPtr> parts;
        for (const auto& [rel, arity] : rels) {
            std::vector<std::string> xs;
            for (int i = 0; i < arity; ++i) xs.push_back("_x" + std::to_string(i));
            std::vector<FormulaPtr> members;
            for (const auto& x : xs) members.push_back(f_atom(make_atom(d, {x})));
            parts.push_back(f_forall(xs, f_implies(f_atom(make_atom(rel, xs)), f_and(members))));
        }
        for (const auto& c : formula_constants(frozen)) parts.push_back(f_atom(Atom{d, {Term::cst(c)}}));
        return parts;
    };
    auto lhs = axioms(d1);
    auto more = axioms(d2);
    lhs.insert(lhs.end(), more.begin(), more.end());
    auto r1 = relativize(frozen, d1);
    auto r2 = relativize(frozen, d2);
    return f_implies(f_and(lhs), f_and({f_implies(r1, r2), f_implies(r2, r1)}));
}

namespace {

bool is_literal(const FormulaPtr& f)
{
    if (f->kind == FormulaKind::atom || f->kind == FormulaKind::equality) return true;
    if (f->kind != FormulaKind::neg) return false;
    auto k = f->kids[0]->kind;
    return k == FormulaKind::atom || k == FormulaKind::equality;
}

std::vector<std::string> literal_vars(const Formula& f)
{
    const Formula& a = f.kind == FormulaKind::neg ? *f.kids[0] : f;
    std::vector<std::string> out;
    auto add = [&](const Term& t) {
        if (t.is_var() && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    };
    if (a.kind == FormulaKind::atom)
        for (const Term& t : a.atom.args) add(t);
    else {
        add(a.lhs);
        add(a.rhs);
    }
    return out;
}

FormulaPtr strip_disjunct(const FormulaPtr& d)
{
    std::vector<std::string> quantified;
    FormulaPtr body = d;
    while (body->kind == FormulaKind::exists) {
        quantified.push_back(body->var);
        body = body->kids[0];
    }
    std::vector<FormulaPtr> lits = body->kind == FormulaKind::conj ? body->kids : std::vector<FormulaPtr>{body};
    std::vector<Atom> positives;
    for (const auto& l : lits) {
        if (!is_literal(l)) throw PreconditionError("not a conjunction of literals: " + to_string(body));
        if (l->kind == FormulaKind::atom) positives.push_back(l->atom);
    }
    std::vector<FormulaPtr> kept;
    for (const auto& l : lits) {
        if (l->kind == FormulaKind::neg && !guarded_by_body(positives, literal_vars(*l))) continue;
        kept.push_back(l);
    }
    return f_exists(quantified, f_and(kept));
}

}  // namespace

FormulaPtr strip_unguarded_negatives(const FormulaPtr& phi)
{
    if (phi->kind != FormulaKind::disj) return strip_disjunct(phi);
    std::vector<FormulaPtr> out;
    for (const auto& d : phi->kids) out.push_back(strip_disjunct(d));
    return f_or(out);
}

CountermodelResult search_countermodel(const FormulaPtr& phi, const CountermodelOptions& opts)
{
    if (!free_vars(phi).empty()) throw PreconditionError("countermodel search needs a sentence");
    auto rels = formula_relations(phi);
    auto consts = formula_constants(phi);
    std::vector<std::string> cnames(consts.begin(), consts.end());
    CountermodelResult result;

    for (int n = 1; n <= opts.max_size; ++n) {
        std::vector<Value> elems;
        for (int i = 1; i <= n; ++i) elems.push_back(Value::element("e" + std::to_string(i)));
        // Candidate facts over the domain, with per-element participation.
        std::vector<Fact> cands;
        std::vector<std::vector<int>> cand_elem;
        std::vector<std::size_t> cand_slot;
        std::size_t slots = 0;
        for (const auto& [rel, arity] : rels) {
            std::vector<int> idx(arity, 0);
            while (true) {
                Fact f{rel, {}};
                for (int i : idx) f.args.push_back(elems[i]);
                cands.push_back(std::move(f));
                cand_elem.push_back(idx);
                cand_slot.push_back(slots);
                int p = arity - 1;
                while (p >= 0 && ++idx[p] == n) idx[p--] = 0;
                if (p < 0) break;
            }
            slots += arity;
        }
        if (static_cast<int>(cands.size()) > opts.max_fact_bits) {
            result.complete = false;
            continue;
        }
        result.sizes_searched = n;
        std::set<Value> domain(elems.begin(), elems.end());
        std::vector<int> assign(cnames.size(), 0);
        while (true) {
            for (unsigned long mask = 0; mask < (1UL << cands.size()); ++mask) {
                // Symmetry breaking: per-element (relation, position) counts
                // must be non-increasing along the element order.
                std::vector<std::vector<int>> profile(n, std::vector<int>(slots + cnames.size(), 0));
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    if (!(mask >> i & 1)) continue;
                    for (std::size_t p = 0; p < cands[i].args.size(); ++p)
                        ++profile[cand_elem[i][p]][cand_slot[i] + p];
                }
                for (std::size_t c = 0; c < cnames.size(); ++c) ++profile[assign[c]][slots + c];
                bool canonical = true;
                for (int e = 0; e + 1 < n && canonical; ++e)
                    if (profile[e] < profile[e + 1]) canonical = false;
                if (!canonical) continue;
                Instance I;
                for (std::size_t i = 0; i < cands.size(); ++i)
                    if (mask >> i & 1) I.add(cands[i]);
                for (const auto& [rel, arity] : rels) I.signature.add_relation(rel, arity);
                for (std::size_t c = 0; c < cnames.size(); ++c) {
                    I.declare_constant(cnames[c]);
                    I.interpret_constant(cnames[c], elems[assign[c]]);
                }
                if (!eval_fo(phi, I, domain)) {
                    result.instance = std::move(I);
                    result.domain = domain;
                    return result;
                }
            }
            std::size_t p = 0;
            while (p < assign.size() && ++assign[p] == n) assign[p++] = 0;
            if (p == assign.size()) break;
        }
    }
    return result;
}

}  // namespace gnfo
