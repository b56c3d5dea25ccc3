#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "bowforge/io.hpp"

using namespace bowforge;
using io::json;

namespace {

enum Exit { Ok = 0, Negative = 1, Usage = 2, NoConvergence = 3 };

struct Common {
    std::string input;
    bool compact = false;
    std::string out;
};

void add_common(CLI::App* sub, Common& c, bool needs_input = true) {
    if (needs_input) sub->add_option("input", c.input, "inline diagram such as \"[ 0 o 2 x 0 ]\", or a file")->required();
    sub->add_flag("--json", c.compact, "single-line JSON, no summary on stderr");
    sub->add_option("--out", c.out, "write the JSON here instead of stdout");
}

int emit(const Common& c, const json& j, const std::string& summary, int code) {
    std::string text = c.compact ? j.dump() : j.dump(2);
    if (c.out.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream f(c.out);
        if (!f) throw std::runtime_error("cannot write " + c.out);
        f << text << "\n";
    }
    if (!c.compact && !summary.empty()) std::cerr << summary << "\n";
    return code;
}

std::vector<Int> parse_ints(const std::string& s) {
    std::vector<Int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        out.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument("bad integer '" + tok + "'");
    }
    return out;
}

// "0.5,-1" or "0.5:0.2,1" (re:im)
std::vector<cd> parse_lambda(const std::string& s) {
    std::vector<cd> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            out.emplace_back(std::stod(tok), 0.0);
        else
            out.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
    }
    return out;
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BOWFORGE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("BOWFORGE_SEED is not an integer");
        }
    }
    return 1;
}

std::string witness_line(const Certificate& c) {
    std::ostringstream os;
    if (const auto* v = std::get_if<InequalityViolation>(&c.witness))
        os << "violated bound " << (v->dir == Direction::Cw ? "cD" : "aD") << "^" << v->t << "_{" << v->s << ","
           << v->k << "} = " << v->value;
    else if (const auto* n = std::get_if<NegativeWitness>(&c.witness))
        os << "negative dimension " << n->value << " on segment " << n->segment << " after " << n->moves.size()
           << " moves";
    else if (std::holds_alternative<FiniteCheckPassed>(c.witness))
        os << "all inequalities hold";
    else
        os << "single node kind, min dim " << std::get<TrivialNoNodes>(c.witness).min_dim;
    return os.str();
}

int cmd_check(const Common& c) {
    auto d = io::read_diagram(c.input);
    auto cert = decide_supersymmetry(d);
    json j{{"diagram", io::to_json(d)}, {"rendered", render_diagram(d)}, {"certificate", io::to_json(cert)}};
    if (!cert.susy) {
        auto r = realize_witness(d, cert);
        auto after = replay(d, r.moves);
        j["realization"] = {{"moves", io::to_json(r.moves)},
                            {"segment", r.segment},
                            {"value", after.dims.at(r.segment)},
                            {"diagram", render_diagram(after)}};
    }
    std::string summary = render_diagram(d) + (cert.susy ? ": supersymmetric (" : ": not supersymmetric (") +
                          witness_line(cert) + ")";
    return emit(c, j, summary, cert.susy ? Ok : Negative);
}

int cmd_separate(const Common& c) {
    auto d = io::read_diagram(c.input);
    auto res = separate(d);
    if (const auto* w = std::get_if<NegativeWitness>(&res))
        return emit(c, {{"negative", io::to_json(*w)}}, "negative dimension " + std::to_string(w->value) + " while separating",
                    Negative);
    const auto& s = std::get<SeparatedResult>(res);
    return emit(c, {{"separated", io::to_json(s.form)}, {"log", io::to_json(s.log)}}, render_diagram(s.form.diagram), Ok);
}

int cmd_normalize(const Common& c) {
    auto d = io::read_diagram(c.input);
    if (d.finite()) throw std::invalid_argument("normalize takes an affine diagram");
    auto res = separate(d);
    if (const auto* w = std::get_if<NegativeWitness>(&res))
        return emit(c, {{"negative", io::to_json(*w)}}, "negative dimension while separating", Negative);
    const auto& s = std::get<SeparatedResult>(res);
    auto norm = normalize_gap(s.form);
    if (const auto* w = std::get_if<NegativeWitness>(&norm))
        return emit(c, {{"negative", io::to_json(*w)}}, "negative dimension while normalizing", Negative);
    const auto& n = std::get<SeparatedResult>(norm);
    MoveLog log = s.log;
    log.insert(log.end(), n.log.begin(), n.log.end());
    return emit(c, {{"separated", io::to_json(n.form)}, {"log", io::to_json(log)}}, render_diagram(n.form.diagram), Ok);
}

int cmd_hw(const Common& c, const std::optional<int>& left, const std::optional<int>& right, const std::string& log_path) {
    auto d = io::read_diagram(c.input);
    MoveLog log;
    if (!log_path.empty()) {
        if (left || right) throw std::invalid_argument("give either --replay or --left/--right");
        log = io::log_from_json(io::read_json_file(log_path));
    } else {
        if (!left || !right) throw std::invalid_argument("hw needs --left and --right node ids, or --replay");
        log.push_back(Move::hw(*left, *right));
    }
    auto out = replay(d, log);
    return emit(c, {{"diagram", io::to_json(out)}, {"rendered", render_diagram(out)}, {"log", io::to_json(log)}},
                render_diagram(out), Ok);
}

int cmd_synth(const Common& c) {
    auto d = io::read_diagram(c.input);
    auto cert = decide_supersymmetry(d);
    if (!cert.susy)
        return emit(c, {{"certificate", io::to_json(cert)}}, "not supersymmetric: " + witness_line(cert), Negative);
    auto l = synthesize(d);
    std::string summary = std::to_string(l.branes.size()) + " brane classes";
    return emit(c, io::to_json(l), summary, Ok);
}

int cmd_solve(const Common& c, const std::string& lambda, const std::optional<std::uint64_t>& seed, double tol) {
    auto d = io::read_diagram(c.input);
    SolveOptions opt;
    opt.seed = pick_seed(seed);
    opt.tol = tol;
    SolveResult r;
    if (!lambda.empty()) {
        r = solve_numeric(d, parse_lambda(lambda), opt);
    } else {
        auto cert = decide_supersymmetry(d);
        if (!cert.susy)
            return emit(c, {{"certificate", io::to_json(cert)}}, "not supersymmetric: " + witness_line(cert), Negative);
        r = construct_solution(d, opt);
    }
    json j = r.solution.triangles.empty() && r.solution.arrows.empty() && !r.converged ? json{{"diagram", io::to_json(d)}}
                                                                                      : io::to_json(d, r.solution);
    j["options"] = {{"seed", opt.seed}, {"tol", opt.tol}, {"retries", opt.retries}};
    j["converged"] = r.converged;
    j["attempts"] = r.attempts;
    j["best_residual"] = r.best_residual;
    std::ostringstream os;
    os << (r.converged ? "accepted" : "no accepted solution") << ", residual " << r.best_residual << " after "
       << r.attempts << " attempts";
    return emit(c, j, os.str(), r.converged ? Ok : NoConvergence);
}

int cmd_verify(const Common& c, double tol) {
    json j = io::read_json_file(c.input);
    if (j.contains("branes")) {
        auto l = io::ledger_from_json(j);
        auto cov = coverage(l);
        auto sus = check_ledger_susy(l);
        bool ok = cov == l.host.dims && sus.ok;
        json out{{"kind", "ledger"}, {"coverage", cov}, {"dims", l.host.dims}, {"coverage_ok", cov == l.host.dims},
                 {"susy", sus.ok}};
        if (!sus.ok) out["offending"] = {{"arrow", sus.arrow}, {"xpoint", sus.xpoint}, {"laps", sus.laps}};
        return emit(c, out, ok ? "ledger ok" : "ledger rejected", ok ? Ok : Negative);
    }
    if (j.contains("triangles")) {
        auto d = io::diagram_from_json(j.at("diagram"));
        auto s = io::solution_from_json(j);
        check_shapes(d, s);
        auto rep = moment_residual(d, s);
        auto st = stability_check(d, s);
        double res = rep.total + rep.cond_a_total;
        bool ok = st.ok() && res <= acceptance_threshold(s, tol);
        json pts = json::array();
        for (const auto& p : st.points)
            pts.push_back({{"node", p.node}, {"s1", p.s1}, {"s2", p.s2}, {"cond_a", p.cond_a}});
        json out{{"kind", "solution"}, {"residual", res}, {"threshold", acceptance_threshold(s, tol)},
                 {"stable", st.ok()}, {"points", pts}};
        std::ostringstream os;
        os << (ok ? "solution ok" : "solution rejected") << ", residual " << res;
        return emit(c, out, os.str(), ok ? Ok : Negative);
    }
    throw std::invalid_argument("expected a ledger or a solution JSON file");
}

int cmd_stratum(const Common& c, const std::string& mode) {
    auto d = io::read_diagram(c.input);
    if (!mode.empty()) {
        if (mode != "finite" && mode != "affine") throw std::invalid_argument("--mode is finite or affine");
        auto s = separated_view(d);
        if (!s) throw std::invalid_argument("--mode needs a diagram that is already separated");
        auto k = stratum_check(*s, mode == "finite" ? StratumMode::Finite : StratumMode::Affine);
        json j{{"holds", k.has_value()}};
        if (k) j["kappa"] = io::to_json(*k);
        return emit(c, j, k ? "stratum condition holds" : "stratum condition fails", k ? Ok : Negative);
    }
    bool holds = stratum_condition(d);
    return emit(c, {{"holds", holds}}, holds ? "stratum condition holds" : "stratum condition fails",
                holds ? Ok : Negative);
}

int cmd_transpose(const Common& c, const std::string& gyd, Int rows, Int level) {
    auto lam = parse_ints(gyd);
    if (rows != static_cast<Int>(lam.size())) throw std::invalid_argument("--rows does not match the entries of --gyd");
    auto t = transpose_gyd(lam, level);
    std::ostringstream os;
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    return emit(c, t, "[" + os.str() + "]", Ok);
}

int cmd_sdual(const Common& c) {
    auto d = io::read_diagram(c.input);
    auto s = s_dual(d);
    return emit(c, {{"diagram", io::to_json(s)}, {"rendered", render_diagram(s)}}, render_diagram(s), Ok);
}

int cmd_equiv(const Common& c, std::optional<std::size_t> budget) {
    auto d = io::read_diagram(c.input);
    std::size_t b = budget ? *budget : static_cast<std::size_t>(2 * d.n_arrows() * d.n_xpoints());
    auto e = enumerate_equivalent(d, b);
    std::vector<std::string> members(e.members.begin(), e.members.end());
    std::sort(members.begin(), members.end());
    json j{{"budget", b}, {"count", members.size()}, {"min_dim", e.min_dim}, {"members", members}};
    std::string summary = std::to_string(members.size()) + " diagrams within " + std::to_string(b) +
                          " moves, min dim " + std::to_string(e.min_dim);
    return emit(c, j, summary, e.min_dim >= 0 ? Ok : Negative);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bow diagram supersymmetry tool"};
    app.require_subcommand(1);
    Common c;

    auto* check = app.add_subcommand("check", "decide supersymmetry and print the certificate");
    add_common(check, c);
    auto* sep = app.add_subcommand("separate", "bring the x-points together");
    add_common(sep, c);
    auto* norm = app.add_subcommand("normalize", "separate and normalize the gap (affine)");
    add_common(norm, c);

    auto* hw = app.add_subcommand("hw", "apply transitions");
    add_common(hw, c);
    std::optional<int> left, right;
    std::string replay_path;
    hw->add_option("--left", left, "left node id");
    hw->add_option("--right", right, "right node id");
    hw->add_option("--replay", replay_path, "JSON move log to replay");

    auto* synth = app.add_subcommand("synth", "brane ledger for a supersymmetric diagram");
    add_common(synth, c);

    auto* solve = app.add_subcommand("solve", "find a stable zero of the moment map");
    add_common(solve, c);
    std::string lambda;
    std::optional<std::uint64_t> seed;
    double tol = 1e-8;
    solve->add_option("--lambda", lambda, "per-arrow values, e.g. 0.5,1:-2 (re:im); numeric solve only");
    solve->add_option("--seed", seed, "random seed (default: BOWFORGE_SEED or 1)");
    solve->add_option("--tol", tol, "relative residual tolerance");

    auto* verify = app.add_subcommand("verify", "check a ledger or solution JSON file");
    add_common(verify, c);
    verify->add_option("--tol", tol, "relative residual tolerance");

    auto* stratum = app.add_subcommand("stratum", "weight-theoretic criterion");
    add_common(stratum, c);
    std::string mode;
    stratum->add_option("--mode", mode, "finite|affine, for an already separated diagram");

    auto* transpose = app.add_subcommand("transpose", "transpose a generalized Young diagram");
    add_common(transpose, c, false);
    std::string gyd;
    Int rows = 0, level = 0;
    transpose->add_option("--gyd", gyd, "comma separated entries")->required();
    transpose->add_option("--rows", rows, "number of entries")->required();
    transpose->add_option("--level", level, "level n")->required();

    auto* sdual = app.add_subcommand("sdual", "swap arrows and x-points");
    add_common(sdual, c);

    auto* equiv = app.add_subcommand("equiv", "breadth-first search over transitions");
    add_common(equiv, c);
    std::optional<std::size_t> budget;
    equiv->add_option("--budget", budget, "move budget (default 2nw)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (*check) return cmd_check(c);
        if (*sep) return cmd_separate(c);
        if (*norm) return cmd_normalize(c);
        if (*hw) return cmd_hw(c, left, right, replay_path);
        if (*synth) return cmd_synth(c);
        if (*solve) return cmd_solve(c, lambda, seed, tol);
        if (*verify) return cmd_verify(c, tol);
        if (*stratum) return cmd_stratum(c, mode);
        if (*transpose) return cmd_transpose(c, gyd, rows, level);
        if (*sdual) return cmd_sdual(c);
        if (*equiv) return cmd_equiv(c, budget);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    }
    return Usage;
}
