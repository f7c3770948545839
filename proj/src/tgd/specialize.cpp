#include "gnfo/tgd/specialize.hpp"

#include "gnfo/query/cq.hpp"

namespace gnfo {

SelectResult select_disjunct(const std::vector<Tgd>& sigma, const DisjunctiveTgd& d, const ChaseConfig& cfg)
{
    d.validate();
    SelectResult res;
    for (std::size_t i = 0; i < d.heads.size(); ++i) {
        Verdict v = entails_tgd(sigma, d.disjunct(i), cfg);
        res.verdicts.push_back(v);
        if (v == Verdict::yes) {
            res.index = i;
            break;
        }
    }
    return res;
}

SpecializeReport specialize_to_fg(const std::vector<Tgd>& sigma, const std::vector<std::string>& constants,
                                  const ChaseConfig& cfg)
{
    SpecializeReport rep;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const Tgd& rho = sigma[i];
        if (is_frontier_guarded(rho)) {
            for (Tgd& part : decompose_components(rho)) rep.tgds.push_back(std::move(part));
            rep.log.push_back(to_string(rho) + " : frontier-guarded");
            continue;
        }
        bool found = false;
        for (const Tgd& s : specializations(rho, constants)) {
            if (!is_quasi_frontier_guarded(s)) continue;
            Verdict v = entails_tgd(sigma, s, cfg);
            rep.log.push_back(to_string(s) + " : " + to_string(v));
            if (v != Verdict::yes) continue;
            for (Tgd& part : decompose_components(s)) rep.tgds.push_back(std::move(part));
            found = true;
            break;
        }
        if (!found) {
            rep.ok = false;
            rep.failed.push_back(i);
        }
    }
    return rep;
}

namespace {

std::vector<Atom> rename_existentials(const ConjunctiveQuery& q, const std::string& suffix)
{
    std::map<std::string, Term> theta;
    for (const auto& v : q.exist_vars) theta[v] = Term::var(v + suffix);
    return substitute(q.atoms, theta);
}

ConjunctiveQuery with_free(const ConjunctiveQuery& q, const std::vector<std::string>& names)
{
    std::map<std::string, Term> theta;
    for (std::size_t i = 0; i < names.size(); ++i) theta[q.free_vars[i]] = Term::var(names[i]);
    return ConjunctiveQuery::make(names, substitute(q.atoms, theta));
}

}  // namespace

AcyclicReport acyclic_fg_composition(const std::vector<Tgd>& sigma, int max_atoms, int max_vars,
                                     const ChaseConfig& cfg)
{
    AcyclicReport rep;
    for (const Tgd& rho : sigma) {
        if (!is_frontier_guarded(rho)) throw PreconditionError("not frontier-guarded: " + to_string(rho));
        auto fr = rho.frontier();
        auto bodies = treeify(ConjunctiveQuery::make(fr, rho.body), max_atoms, max_vars);
        auto heads = treeify(ConjunctiveQuery::make(fr, rho.head), max_atoms, max_vars);
        for (const ConjunctiveQuery& b : bodies.disjuncts) {
            DisjunctiveTgd d;
            ConjunctiveQuery bb = with_free(b, fr);
            d.body = rename_existentials(bb, "_b");
            for (const ConjunctiveQuery& h : heads.disjuncts)
                d.heads.push_back(rename_existentials(with_free(h, fr), "_h"));
            if (d.heads.empty()) {
                rep.ok = false;
                rep.log.push_back(to_string(rho) + " : empty head treeification");
                continue;
            }
            SelectResult sel = select_disjunct(sigma, d, cfg);
            if (!sel.index) {
                rep.ok = false;
                rep.log.push_back(to_string(d) + " : no entailed disjunct");
                continue;
            }
            rep.tgds.push_back(d.disjunct(*sel.index));
            rep.log.push_back(to_string(d) + " : disjunct " + std::to_string(*sel.index));
        }
    }
    return rep;
}

}  // namespace gnfo
