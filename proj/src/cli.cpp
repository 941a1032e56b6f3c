#include "meas/cli.hpp"

#include "meas/catalog.hpp"
#include "meas/declaration.hpp"
#include "meas/transfer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace meas {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::size_t kShownWitnesses = 8;

Json header(const RunConfig& cfg, const char* command) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["N"] = cfg.N;
    j["params"] = {{"m", cfg.m}, {"window", cfg.window}};
    return j;
}

Json keys_json(const std::vector<BasisKey>& ks) {
    Json a = Json::array();
    for (const auto& k : ks) a.push_back(k.render());
    return a;
}

Json witness_json(const std::string& identity, const std::vector<BasisKey>& inputs, const Element& lhs,
                  const Element& rhs) {
    return Json{{"identity", identity}, {"inputs", keys_json(inputs)}, {"lhs", lhs.render()}, {"rhs", rhs.render()}};
}

template <class W>
Json witnesses_json(const std::vector<W>& ws) {
    Json a = Json::array();
    for (std::size_t i = 0; i < ws.size() && i < kShownWitnesses; ++i)
        a.push_back(witness_json(ws[i].identity, ws[i].inputs, ws[i].lhs, ws[i].rhs));
    return a;
}

std::string inputs_text(const std::vector<BasisKey>& ks) {
    std::string s;
    for (const auto& k : ks) s += (s.empty() ? "" : ", ") + k.render();
    return "(" + s + ")";
}

template <class W>
void witnesses_text(std::ostream& os, const std::vector<W>& ws) {
    for (std::size_t i = 0; i < ws.size() && i < kShownWitnesses; ++i)
        os << "  " << ws[i].identity << " at " << inputs_text(ws[i].inputs) << ": " << ws[i].lhs.render()
           << " != " << ws[i].rhs.render() << "\n";
}

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }
const char* yes_no(bool b) { return b ? "yes" : "no"; }

RegistryParams registry(const RunConfig& cfg) { return RegistryParams{cfg.m, cfg.window}; }

Bialg resolve_bialgebra(const RunConfig& cfg, const std::string& sel) {
    if (sel.empty()) throw UsageError("missing bialgebra selector");
    try {
        if (std::filesystem::is_regular_file(sel)) {
            MonoidTable t = load_monoid_file(sel);
            if (cfg.dual) return build_monoid_dual(t);
            return t.is_group() ? build_group_algebra(t) : build_monoid_algebra(t);
        }
        if (cfg.dual) throw UsageError("--dual needs a MonoidTable file");
        return bialgebra_by_name(sel, registry(cfg));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

PartialCovering resolve_covering(const RunConfig& cfg, const std::string& sel) {
    if (sel.empty()) throw UsageError("missing covering selector");
    try {
        if (std::filesystem::is_regular_file(sel)) return instantiate(load_declaration_file(sel));
        return covering_by_name(sel, registry(cfg));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

CommandResult finish(const RunConfig& cfg, int code, const Json& j, const std::string& text) {
    return CommandResult{code, cfg.json ? j.dump(2) + "\n" : text};
}

// ---- verify ----

CommandResult verify_bialgebra_cmd(const RunConfig& cfg) {
    Bialg h = resolve_bialgebra(cfg, cfg.bialgebra);
    AxiomReport r = verify_bialgebra(*h, cfg.N);
    Json j = header(cfg, "verify");
    j["bialgebra"] = h->name;
    j["keys"] = r.keys;
    j["pairs"] = r.pairs;
    j["triples"] = r.triples;
    j["skipped_overflow"] = r.skipped_overflow;
    j["failures"] = witnesses_json(r.failures);
    j["ok"] = r.ok;

    std::ostringstream os;
    os << "bialgebra " << h->name << " to degree " << cfg.N << "\n";
    os << "keys " << r.keys << ", pairs " << r.pairs << ", triples " << r.triples;
    if (r.skipped_overflow) os << ", skipped at the window edge " << r.skipped_overflow;
    os << "\n";
    witnesses_text(os, r.failures);
    os << "axioms: " << verdict(r.ok) << "\n";
    return finish(cfg, r.ok ? 0 : 1, j, os.str());
}

CommandResult verify_covering_cmd(const RunConfig& cfg) {
    PartialCovering f = resolve_covering(cfg, cfg.covering);
    VerificationReport r = verify_covering(f, cfg.N);
    Json ranks = Json::array();
    for (const auto& d : r.ranks)
        ranks.push_back({{"degree", d.degree}, {"rank", d.achieved}, {"dimension", d.dimension}});
    Json j = header(cfg, "verify");
    j["covering"] = f.name;
    j["B"] = f.B->name;
    j["C"] = f.C->name;
    j["A"] = f.A->name;
    j["measuring"] = {{"ok", r.measuring_ok},
                      {"exhaustive", r.measuring_exhaustive},
                      {"pairs", r.measuring_pairs},
                      {"skipped_overflow", r.skipped_overflow},
                      {"witnesses", witnesses_json(r.measuring_witnesses)}};
    j["coalgebra_map"] = {{"ok", r.coalgebra_map_ok}, {"witnesses", witnesses_json(r.coalgebra_witnesses)}};
    j["surjectivity"] = {{"ok", r.surjective_ok},
                         {"first_failing_degree", r.first_nonsurjective_degree >= 0
                                                      ? Json(r.first_nonsurjective_degree)
                                                      : Json(nullptr)},
                         {"witness", r.surjectivity_witness ? Json(r.surjectivity_witness->render()) : Json(nullptr)},
                         {"ranks", ranks}};
    j["ok"] = r.ok();

    std::ostringstream os;
    os << "covering " << f.name << ": " << f.B->name << " (x) " << f.C->name << " -> " << f.A->name << ", degree "
       << cfg.N << "\n";
    os << "measuring      " << verdict(r.measuring_ok) << " ("
       << (r.measuring_exhaustive ? "exhaustive" : "generators plus sample") << ", " << r.measuring_pairs
       << " pairs)\n";
    witnesses_text(os, r.measuring_witnesses);
    os << "coalgebra map  " << verdict(r.coalgebra_map_ok) << "\n";
    witnesses_text(os, r.coalgebra_witnesses);
    os << "surjectivity   " << verdict(r.surjective_ok);
    if (!r.surjective_ok)
        os << " at degree " << r.first_nonsurjective_degree << ", "
           << (r.surjectivity_witness ? r.surjectivity_witness->render() : std::string("?")) << " not in the image";
    os << "\n";
    for (const auto& d : r.ranks) os << "  degree " << d.degree << ": rank " << d.achieved << "/" << d.dimension << "\n";
    os << "verdict: " << verdict(r.ok()) << "\n";
    return finish(cfg, r.ok() ? 0 : 1, j, os.str());
}

CommandResult verify_cmd(const RunConfig& cfg) {
    if (cfg.covering.empty() == cfg.bialgebra.empty())
        throw UsageError("verify needs exactly one of --covering and --bialgebra");
    return cfg.covering.empty() ? verify_bialgebra_cmd(cfg) : verify_covering_cmd(cfg);
}

// ---- primitives ----

CommandResult primitives_cmd(const RunConfig& cfg) {
    Bialg h = resolve_bialgebra(cfg, cfg.selector);
    if (!h->flags.graded || !h->flags.connected)
        throw UsageError("primitives needs a graded connected bialgebra, got " + h->name);
    Json degrees = Json::array();
    std::ostringstream os;
    os << "primitives of " << h->name << "\n";
    for (int n = 1; n <= cfg.N; ++n) {
        Json basis = Json::array();
        std::string line;
        for (const auto& p : primitive_basis(h, n)) {
            basis.push_back(p.render());
            line += (line.empty() ? "" : "; ") + p.render();
        }
        degrees.push_back({{"degree", n}, {"dimension", basis.size()}, {"basis", basis}});
        os << "degree " << n << ": " << (line.empty() ? "0" : line) << "\n";
    }
    Json j = header(cfg, "primitives");
    j["bialgebra"] = h->name;
    j["degrees"] = degrees;
    return finish(cfg, 0, j, os.str());
}

// ---- antipode ----

CommandResult antipode_cmd(const RunConfig& cfg) {
    Bialg h = resolve_bialgebra(cfg, cfg.selector);
    if (!h->flags.hopf) throw UsageError(AntipodeUnavailable(h->name).what());

    std::vector<std::pair<std::string, LinMap>> legs;
    if (h->antipode) legs.emplace_back("closed form", antipode(h, cfg.N));
    if (h->flags.graded && h->flags.connected) legs.emplace_back("takeuchi", takeuchi_antipode(h, cfg.N));
    std::optional<LinMap> solved = antipode_solve(h, cfg.N);
    if (!cfg.via.empty()) {
        PartialCovering f;
        try {
            f = cfg.via == "can" ? canonical_nsym_covering(h) : resolve_covering(cfg, cfg.via);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (f.A->name != h->name) throw UsageError("covering " + f.name + " targets " + f.A->name + ", not " + h->name);
        LinearSection s;
        try {
            s = linear_section(f, cfg.N);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        legs.emplace_back("transfer via " + f.name, transfer_antipode(f, s, cfg.N).antipode);
    }

    auto keys = h->keys_upto(cfg.N);
    Json names = Json::array({"solve"});
    for (const auto& [n, m] : legs) names.push_back(n);
    std::optional<std::pair<BasisKey, std::string>> diff;
    if (!solved) diff.emplace(h->unit.terms().begin()->first, "solve");
    Json table = Json::array();
    std::ostringstream os;
    os << "antipode of " << h->name << " to degree " << cfg.N << "\n";
    for (const auto& k : keys) {
        Element v = solved ? (*solved)(k) : Element();
        for (const auto& [n, m] : legs)
            if (!diff && m(k) != v) diff.emplace(k, n);
        table.push_back({{"key", k.render()}, {"value", v.render()}});
        os << "S(" << k.render() << ") = " << v.render() << "\n";
    }
    std::string leg_text;
    for (const auto& n : names) leg_text += (leg_text.empty() ? "" : ", ") + n.get<std::string>();
    os << "legs: " << leg_text << "\n";
    if (diff)
        os << "disagreement at " << diff->first.render() << " (" << diff->second << ")\n";
    else
        os << "agreement\n";

    Json j = header(cfg, "antipode");
    j["bialgebra"] = h->name;
    j["legs"] = names;
    j["agree"] = !diff;
    j["first_difference"] = diff ? Json{{"key", diff->first.render()}, {"leg", diff->second}} : Json(nullptr);
    j["antipode"] = table;
    return finish(cfg, diff ? 1 : 0, j, os.str());
}

// ---- nichols ----

CommandResult nichols_cmd(const RunConfig& cfg) {
    Bialg h = resolve_bialgebra(cfg, cfg.selector);
    if (!h->flags.finite_type) throw UsageError(h->name + " is not finite-dimensional");
    GaloisReport g = galois_check(h);
    bool ok = g.consistent && (!g.hopf || g.gamma_surjective);
    Json j = header(cfg, "nichols");
    j["bialgebra"] = h->name;
    j["dimension"] = g.dimension;
    j["beta_rank"] = g.beta_rank;
    j["beta_bijective"] = g.bijective;
    j["hopf"] = g.hopf;
    j["cross_check"] = g.consistent;
    j["gamma_right_inverse"] = g.gamma_surjective;
    j["ok"] = ok;

    std::ostringstream os;
    os << "bialgebra " << h->name << ", dimension " << g.dimension << "\n";
    os << "beta rank        " << g.beta_rank << "/" << g.dimension * g.dimension << "\n";
    os << "beta bijective   " << yes_no(g.bijective) << "\n";
    os << "Hopf             " << yes_no(g.hopf) << "\n";
    os << "cross-check      " << (g.consistent ? "agree" : "disagree") << "\n";
    if (g.hopf) os << "gamma o gamma'   " << (g.gamma_surjective ? "id" : "not id") << "\n";
    return finish(cfg, ok ? 0 : 1, j, os.str());
}

CommandResult export_cmd(const RunConfig& cfg) {
    PartialCovering f = resolve_covering(cfg, cfg.covering);
    try {
        return CommandResult{0, declaration_json(export_declaration(f, cfg.N)) + "\n"};
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

CommandResult run_command(const RunConfig& cfg) {
    if (cfg.N < 1) throw UsageError("-N must be at least 1");
    if (cfg.m < 1) throw UsageError("-m must be at least 1");
    if (cfg.window < 1) throw UsageError("--window must be at least 1");
    switch (cfg.command) {
        case Command::Verify: return verify_cmd(cfg);
        case Command::Primitives: return primitives_cmd(cfg);
        case Command::Antipode: return antipode_cmd(cfg);
        case Command::Nichols: return nichols_cmd(cfg);
        case Command::Export: return export_cmd(cfg);
    }
    throw UsageError("unknown command");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Measurings and coverings of bialgebras", "meas"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("-N", cfg.N, "degree bound")->capture_default_str();
    app.add_option("-m", cfg.m, "OMP alphabet bound")->capture_default_str();
    app.add_option("--window", cfg.window, "Laurent exponent window")->capture_default_str();
    app.add_flag("--json", cfg.json, "JSON report");
    app.add_option("--out", cfg.out, "write the report to a file");

    auto* verify = app.add_subcommand("verify", "verify a bialgebra or a covering");
    verify->add_option("--covering", cfg.covering, "registry name or declaration file");
    verify->add_option("--bialgebra", cfg.bialgebra, "registry name or MonoidTable file");
    verify->add_flag("--dual", cfg.dual, "dual of a MonoidTable file");
    auto* prim = app.add_subcommand("primitives", "primitive basis per degree");
    auto* anti = app.add_subcommand("antipode", "antipode by every available method");
    anti->add_option("--via", cfg.via, "can, or a covering for the transfer leg");
    auto* nich = app.add_subcommand("nichols", "Galois map and antipode cross-check");
    for (auto* s : {prim, anti, nich}) {
        s->add_option("selector", cfg.selector, "registry name or MonoidTable file")->required();
        s->add_flag("--dual", cfg.dual, "dual of a MonoidTable file");
    }
    auto* exp = app.add_subcommand("export", "write a covering declaration");
    exp->add_option("--covering", cfg.covering, "registry name or declaration file")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }
    if (*verify) cfg.command = Command::Verify;
    if (*prim) cfg.command = Command::Primitives;
    if (*anti) cfg.command = Command::Antipode;
    if (*nich) cfg.command = Command::Nichols;
    if (*exp) cfg.command = Command::Export;

    CommandResult r;
    try {
        r = run_command(cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (cfg.out.empty()) {
        out << r.output;
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << cfg.out << "\n";
            return 2;
        }
        f << r.output;
    }
    return r.exit_code;
}

}  // namespace meas
