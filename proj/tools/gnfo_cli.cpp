#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gnfo/bisim/bisim.hpp"
#include "gnfo/chase/chase.hpp"
#include "gnfo/io/text.hpp"
#include "gnfo/logic/constructions.hpp"
#include "gnfo/rewrite/rewrite.hpp"
#include "gnfo/tgd/specialize.hpp"

using namespace gnfo;

namespace {

enum Exit { ok = 0, precondition = 1, budget = 2, parse = 3 };

// Arguments naming an existing file are read; anything else is inline text.
std::string text_arg(const std::string& s)
{
    std::error_code ec;
    if (std::filesystem::is_regular_file(s, ec)) return read_file(s);
    return s;
}

void report(const std::string& key, const std::string& value) { std::cout << "# " << key << ": " << value << "\n"; }

std::string tuple_string(const Tuple& t)
{
    if (t.size() == 1) return t[0].name;
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i].name;
    return s + ")";
}

void print_answers(const std::string& name, const std::set<Tuple>& answers, bool boolean)
{
    std::cout << name << ":";
    if (boolean) {
        std::cout << " " << (answers.empty() ? "false" : "true") << "\n";
        return;
    }
    bool first = true;
    for (const Tuple& t : answers) {
        std::cout << (first ? " " : ", ") << tuple_string(t);
        first = false;
    }
    std::cout << "\n";
}

struct Common {
    std::string theory, instance, query, program, formula, left, right;
    std::string mode = "restricted";
    int max_rounds = 64;
    long max_facts = 200000;
    int max_atoms = 3;
    int max_vars = 0;
    int max_size = 4;
    int jobs = 1;
    bool timing = false;
};

ChaseConfig chase_config(const Common& c)
{
    ChaseConfig cfg;
    if (c.mode == "oblivious") cfg.mode = ChaseMode::oblivious_dedup;
    else if (c.mode != "restricted") throw PreconditionError("unknown chase mode " + c.mode);
    cfg.max_rounds = c.max_rounds;
    cfg.max_facts = c.max_facts;
    cfg.validate();
    return cfg;
}

NamedQuery query_arg(const Common& c, const Theory* th)
{
    if (!c.query.empty()) return parse_query(text_arg(c.query));
    if (th && !th->queries.empty()) return th->queries.front();
    throw PreconditionError("no query given");
}

int run_chase(const Common& c)
{
    Theory th = parse_theory(text_arg(c.theory));
    Instance I = parse_instance(text_arg(c.instance));
    ChaseResult r = chase(I, th.tgds, chase_config(c));
    std::cout << print_instance(r.result);
    report("status", to_string(r.status));
    report("rounds", std::to_string(r.rounds_executed));
    report("nulls", std::to_string(r.nulls_created));
    report("facts", std::to_string(r.result.size()));
    return r.status == ChaseStatus::terminated ? ok : budget;
}

int run_certain(const Common& c)
{
    Theory th = parse_theory(text_arg(c.theory));
    Instance I = parse_instance(text_arg(c.instance));
    NamedQuery q = query_arg(c, &th);
    OracleAnswer a = certain_answers_oracle(th.tgds, q.query, I, chase_config(c));
    print_answers(q.name, a.answers, q.query.is_boolean());
    report("complete", a.complete ? "yes" : "no");
    return a.complete ? ok : budget;
}

int run_rewrite(const Common& c, const std::string& kind, const std::string& output)
{
    Theory th = parse_theory(text_arg(c.theory));
    NamedQuery q = query_arg(c, &th);
    RewriteConfig cfg;
    cfg.chase.max_rounds = std::min(c.max_rounds, cfg.chase.max_rounds);
    cfg.max_atoms = c.max_atoms;
    cfg.max_vars = c.max_vars;
    cfg.jobs = c.jobs;
    RewriteArtifacts a;
    if (kind == "atomic") a = rewrite_atomic_guarded(th.tgds, q.query, cfg);
    else if (kind == "cq") a = rewrite_cq_guarded(th.tgds, q.query, cfg);
    else if (kind == "fg") a = rewrite_fg(th.tgds, q.query, cfg);
    else throw PreconditionError("unknown rewrite mode " + kind);
    std::string text = "# mode: " + kind + "\n" + serialize_artifacts(a);
    if (output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(output);
        if (!out) throw Error("cannot write " + output);
        out << text;
        report("rules", std::to_string(a.program.rules.size()));
        report("completeness", to_string(a.completeness));
    }
    return a.unknown > 0 ? budget : ok;
}

int run_eval_datalog(const Common& c)
{
    DatalogProgram P = parse_datalog(text_arg(c.program));
    Instance I = parse_instance(text_arg(c.instance));
    DatalogResult r = eval_datalog_full(P, I);
    print_answers(P.goal, r.goal, P.goal_is_boolean());
    report("iterations", std::to_string(r.iterations));
    report("facts", std::to_string(r.fixpoint.size()));
    return ok;
}

int run_eval_cq(const Common& c)
{
    NamedQuery q = query_arg(c, nullptr);
    Instance I = parse_instance(text_arg(c.instance));
    print_answers(q.name, eval_cq(q.query, I), q.query.is_boolean());
    return ok;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int run_classify(const Common& c, const std::string& what)
{
    if (what == "tgd") {
        Theory th = parse_theory(text_arg(c.theory));
        for (const Tgd& t : th.tgds) {
            TgdClass k = classify(t);
            std::cout << to_string(t) << "\n";
            report("full", yes_no(k.full));
            report("guarded", yes_no(k.guarded));
            report("frontier_guarded", yes_no(k.frontier_guarded));
            report("acyclic_fg", yes_no(k.acyclic_fg));
            report("quasi_frontier_guarded", yes_no(k.quasi_frontier_guarded));
        }
        return ok;
    }
    if (what == "datalog") {
        DatalogClass k = classify_datalog(parse_datalog(text_arg(c.program)));
        report("guarded", yes_no(k.guarded));
        report("internally_guarded", yes_no(k.internally_guarded));
        report("frontier_guarded", yes_no(k.frontier_guarded));
        return ok;
    }
    if (what == "formula") {
        FormulaPtr f = parse_formula(text_arg(c.formula));
        GnfCheckReport g = check_gnf(f);
        report("verdict", to_string(g.verdict));
        for (const Violation& v : g.violations) report("gnf_violation", v.reason + ": " + v.node);
        for (const Violation& v : check_gfo(f).violations) report("gfo_violation", v.reason + ": " + v.node);
        return ok;
    }
    throw PreconditionError("classify expects tgd, datalog or formula");
}

int run_bisim(const Common& c, const std::string& kind)
{
    Instance A = parse_instance(text_arg(c.left));
    Instance B = parse_instance(text_arg(c.right));
    std::size_t size = 0;
    bool found = false;
    if (kind == "guarded") {
        auto w = check_guarded_bisim(A, B);
        found = w.has_value();
        if (w) size = w->family.size();
    } else if (kind == "strong-gn") {
        auto w = check_strong_gn(A, B);
        found = w.has_value();
        if (w) size = w->family.size();
    } else {
        throw PreconditionError("unknown bisimulation kind " + kind);
    }
    std::cout << (found ? "witness-found" : "no-witness") << "\n";
    report("family", std::to_string(size));
    return ok;
}

int run_product(const Common& c)
{
    std::cout << print_instance(direct_product(parse_instance(text_arg(c.left)), parse_instance(text_arg(c.right))));
    return ok;
}

int run_squid(const Common& c)
{
    Instance A = parse_instance(text_arg(c.left));
    Instance B = parse_instance(text_arg(c.right));
    SquidExtension s = squid_extension(A, B);
    std::cout << print_instance(s.extension);
    report("tentacles", std::to_string(s.tentacles.size()));
    report("squid_check", yes_no(squid_check(A, s.extension, s.tentacles)));
    report("projection", yes_no(verify_homomorphism(s.extension, B, s.projection)));
    return ok;
}

int run_treeify(const Common& c)
{
    NamedQuery q = query_arg(c, nullptr);
    int max_atoms = c.max_atoms, max_vars = c.max_vars > 0 ? c.max_vars : 3;
    UnionOfCQs u = treeify(q.query, max_atoms, max_vars);
    for (const auto& d : u.disjuncts) std::cout << to_string(d, q.name) << ".\n";
    report("members", std::to_string(u.disjuncts.size()));
    return ok;
}

int run_specialize(const Common& c, bool acyclic)
{
    Theory th = parse_theory(text_arg(c.theory));
    ChaseConfig cfg = chase_config(c);
    Theory out;
    bool good = true;
    std::vector<std::string> log;
    if (acyclic) {
        AcyclicReport r = acyclic_fg_composition(th.tgds, c.max_atoms, c.max_vars > 0 ? c.max_vars : 3, cfg);
        out.tgds = r.tgds;
        good = r.ok;
        log = r.log;
    } else {
        SpecializeReport r = specialize_to_fg(th.tgds, th.signature.constants, cfg);
        out.tgds = r.tgds;
        good = r.ok;
        log = r.log;
    }
    out.signature = signature_of(out.tgds);
    std::cout << print_theory(out);
    for (const auto& line : log) report("log", line);
    report("ok", yes_no(good));
    return good ? ok : budget;
}

int run_countermodel(const Common& c)
{
    FormulaPtr f = parse_formula(text_arg(c.formula));
    CountermodelOptions opts;
    opts.max_size = c.max_size;
    CountermodelResult r = search_countermodel(f, opts);
    if (r.instance) {
        std::cout << print_instance(*r.instance);
        report("domain_size", std::to_string(r.domain.size()));
        report("result", "countermodel");
        return ok;
    }
    report("result", "none");
    report("sizes_searched", std::to_string(r.sizes_searched));
    report("complete", yes_no(r.complete));
    return r.complete ? ok : budget;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Chase, rewriting and bisimulation tools for guarded TGDs and GNF"};
    app.require_subcommand(1);
    Common c;
    std::string rewrite_mode = "cq", output, classify_what, bisim_kind = "guarded";
    bool acyclic = false;

    auto caps = [&](CLI::App* s) {
        s->add_option("--max-rounds", c.max_rounds, "Chase round budget")->capture_default_str();
        s->add_option("--max-facts", c.max_facts, "Chase fact budget")->capture_default_str();
        s->add_option("--chase-mode", c.mode, "restricted or oblivious")->capture_default_str();
        s->add_flag("--timing", c.timing, "Report wall-clock time");
    };
    auto* chase_cmd = app.add_subcommand("chase", "Chase an instance");
    chase_cmd->add_option("--theory", c.theory)->required();
    chase_cmd->add_option("--instance", c.instance)->required();
    caps(chase_cmd);

    auto* certain_cmd = app.add_subcommand("certain", "Certain answers via the chase");
    certain_cmd->add_option("--theory", c.theory)->required();
    certain_cmd->add_option("--instance", c.instance)->required();
    certain_cmd->add_option("--query", c.query);
    caps(certain_cmd);

    auto* rewrite_cmd = app.add_subcommand("rewrite", "Compile a certain-answer problem to Datalog");
    rewrite_cmd->add_option("--mode", rewrite_mode)->check(CLI::IsMember({"atomic", "cq", "fg"}))->capture_default_str();
    rewrite_cmd->add_option("--theory", c.theory)->required();
    rewrite_cmd->add_option("--query", c.query);
    rewrite_cmd->add_option("--max-atoms", c.max_atoms)->capture_default_str();
    rewrite_cmd->add_option("--max-vars", c.max_vars, "0 selects the default bound")->capture_default_str();
    rewrite_cmd->add_option("--jobs", c.jobs)->capture_default_str();
    rewrite_cmd->add_option("--output", output);
    caps(rewrite_cmd);

    auto* datalog_cmd = app.add_subcommand("eval-datalog", "Evaluate a Datalog program");
    datalog_cmd->add_option("--program", c.program)->required();
    datalog_cmd->add_option("--instance", c.instance)->required();
    datalog_cmd->add_flag("--timing", c.timing);

    auto* cq_cmd = app.add_subcommand("eval-cq", "Evaluate a conjunctive query");
    cq_cmd->add_option("--query", c.query)->required();
    cq_cmd->add_option("--instance", c.instance)->required();
    cq_cmd->add_flag("--timing", c.timing);

    auto* classify_cmd = app.add_subcommand("classify", "Classify rules, programs or formulas");
    classify_cmd->add_option("what", classify_what)->required()->check(CLI::IsMember({"tgd", "datalog", "formula"}));
    classify_cmd->add_option("--theory", c.theory);
    classify_cmd->add_option("--program", c.program);
    classify_cmd->add_option("--formula", c.formula);

    auto* bisim_cmd = app.add_subcommand("bisim", "Search for a bisimulation");
    bisim_cmd->add_option("--kind", bisim_kind)->check(CLI::IsMember({"guarded", "strong-gn"}))->capture_default_str();
    bisim_cmd->add_option("--left", c.left)->required();
    bisim_cmd->add_option("--right", c.right)->required();
    bisim_cmd->add_flag("--timing", c.timing);

    auto* product_cmd = app.add_subcommand("product", "Direct product of two instances");
    product_cmd->add_option("--left", c.left)->required();
    product_cmd->add_option("--right", c.right)->required();

    auto* squid_cmd = app.add_subcommand("squid", "Squid-extension of --left inside --right");
    squid_cmd->add_option("--left", c.left)->required();
    squid_cmd->add_option("--right", c.right)->required();

    auto* treeify_cmd = app.add_subcommand("treeify", "Acyclic approximations of a query");
    treeify_cmd->add_option("--query", c.query)->required();
    treeify_cmd->add_option("--max-atoms", c.max_atoms)->capture_default_str();
    treeify_cmd->add_option("--max-vars", c.max_vars, "0 selects 3")->capture_default_str();

    auto* spec_cmd = app.add_subcommand("specialize", "Frontier-guarded specializations of a theory");
    spec_cmd->add_option("--theory", c.theory)->required();
    spec_cmd->add_flag("--acyclic", acyclic, "Acyclic frontier-guarded composition instead");
    spec_cmd->add_option("--max-atoms", c.max_atoms)->capture_default_str();
    spec_cmd->add_option("--max-vars", c.max_vars, "0 selects 3")->capture_default_str();
    caps(spec_cmd);

    auto* cm_cmd = app.add_subcommand("search-countermodel", "Bounded finite countermodel search");
    cm_cmd->add_option("--formula", c.formula)->required();
    cm_cmd->add_option("--max-size", c.max_size)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    auto start = std::chrono::steady_clock::now();
    int code = ok;
    try {
        if (*chase_cmd) code = run_chase(c);
        else if (*certain_cmd) code = run_certain(c);
        else if (*rewrite_cmd) code = run_rewrite(c, rewrite_mode, output);
        else if (*datalog_cmd) code = run_eval_datalog(c);
        else if (*cq_cmd) code = run_eval_cq(c);
        else if (*classify_cmd) code = run_classify(c, classify_what);
        else if (*bisim_cmd) code = run_bisim(c, bisim_kind);
        else if (*product_cmd) code = run_product(c);
        else if (*squid_cmd) code = run_squid(c);
        else if (*treeify_cmd) code = run_treeify(c);
        else if (*spec_cmd) code = run_specialize(c, acyclic);
        else if (*cm_cmd) code = run_countermodel(c);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return parse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return precondition;
    }
    if (c.timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        report("time_ms", std::to_string(ms.count()));
    }
    return code;
}
