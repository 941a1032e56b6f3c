#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meas/catalog.hpp"
#include "meas/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace meas;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return Run{code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "meas_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST_CASE("verify exit codes") {
    CHECK(run({"verify", "--covering", "nsym-to-sym", "-N", "3"}).code == 0);
    auto q = run({"verify", "--covering", "poly-to-qsym", "-N", "4"});
    CHECK(q.code == 1);
    CHECK(q.out.find("surjectivity   fail at degree 3, M[1,2] not in the image") != std::string::npos);
    CHECK(run({"verify", "--bialgebra", "qsym", "-N", "4"}).code == 0);
}

TEST_CASE("usage errors exit with 2") {
    auto u = run({"verify", "--covering", "nope"});
    CHECK(u.code == 2);
    CHECK(u.err == "error: unknown covering: nope\n");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"verify"}).code == 2);
    CHECK(run({"verify", "--covering", "nsym-to-sym", "--bialgebra", "sym"}).code == 2);
    CHECK(run({"verify", "--bialgebra", "sym", "-N", "0"}).err == "error: -N must be at least 1\n");
    CHECK(run({"primitives", "sym", "-m", "0"}).code == 2);
    CHECK(run({"primitives", "sym", "-N", "x"}).code == 2);
    CHECK(run({"primitives", "kz"}).err == "error: primitives needs a graded connected bialgebra, got k[z]\n");
    CHECK(run({"nichols", "sym"}).err == "error: Sym is not finite-dimensional\n");
    CHECK(run({"nichols", "sym", "--dual"}).err == "error: --dual needs a MonoidTable file\n");
    CHECK(run({"primitives", "sym", "--out", "/nonexistent-dir/x.txt"}).code == 2);
}

TEST_CASE("help exits cleanly") {
    auto h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("verify") != std::string::npos);
}

TEST_CASE("primitives") {
    CHECK(run({"primitives", "sym", "-N", "4"}).out ==
          "primitives of Sym\ndegree 1: p[1]\ndegree 2: p[2]\ndegree 3: p[3]\ndegree 4: p[4]\n");
    CHECK(run({"primitives", "qsym", "-N", "2"}).out == "primitives of QSym\ndegree 1: M[1]\ndegree 2: M[2]\n");
    CHECK(run({"primitives", "omp", "-N", "1", "-m", "3"}).out ==
          "primitives of OMP(m=3)\ndegree 1: w[{1}]; w[{2}]; w[{3}]\n");
}

TEST_CASE("antipode") {
    auto n = run({"antipode", "nsym", "-N", "3"});
    CHECK(n.code == 0);
    CHECK(n.out.find("S(H[3]) = -H[1,1,1] + H[1,2] + H[2,1] - H[3]\n") != std::string::npos);
    auto s = run({"antipode", "sym", "--via", "can", "-N", "4"});
    CHECK(s.code == 0);
    CHECK(s.out.find("transfer via can(Sym)") != std::string::npos);
    CHECK(s.out.find("agreement") != std::string::npos);
    CHECK(run({"antipode", "sym", "--via", "nsym-to-sym", "-N", "3"}).code == 0);
    CHECK(run({"antipode", "s3-group", "--via", "laurent-to-group", "-N", "2"}).code == 0);

    auto k = run({"antipode", "kz"});
    CHECK(k.code == 2);
    CHECK(k.err == "error: antipode unavailable for k[z]\n");
    CHECK(run({"antipode", "qsym", "--via", "nsym-to-sym"}).err == "error: covering nsym-to-sym targets Sym, not QSym\n");
    CHECK(run({"antipode", "qsym", "--via", "poly-to-qsym", "-N", "3"}).code == 2);
}

TEST_CASE("nichols") {
    auto z = run({"nichols", "z2-group"});
    CHECK(z.code == 0);
    CHECK(z.out.find("beta bijective   yes") != std::string::npos);
    auto m = run({"nichols", "monoid-dual"});
    CHECK(m.code == 0);
    CHECK(m.out.find("beta bijective   no") != std::string::npos);
    CHECK(m.out.find("Hopf             no") != std::string::npos);
    CHECK(run({"nichols", "s3-group"}).code == 0);
}

TEST_CASE("JSON reports") {
    auto a = run({"verify", "--covering", "poly-to-qsym", "-N", "3", "--json"});
    auto j = nlohmann::ordered_json::parse(a.out);
    CHECK(j.begin().key() == "schema_version");
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["surjectivity"]["witness"] == "M[1,2]");
    CHECK(j["ok"] == false);
    CHECK(a.out == run({"verify", "--covering", "poly-to-qsym", "-N", "3", "--json"}).out);

    auto p = nlohmann::json::parse(run({"primitives", "qsym", "-N", "2", "--json"}).out);
    CHECK(p["degrees"][1]["basis"][0] == "M[2]");
    auto n = nlohmann::json::parse(run({"nichols", "monoid-algebra", "--json"}).out);
    CHECK(n["beta_bijective"] == false);
    CHECK(n["cross_check"] == true);
}

TEST_CASE("reports written with --out") {
    auto path = scratch("report.json");
    std::filesystem::remove(path);
    auto r = run({"nichols", "z3-group", "--json", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(nlohmann::json::parse(slurp(path))["beta_rank"] == 9);
}

TEST_CASE("declared objects") {
    auto decl = scratch("nsym-to-sym.json");
    {
        std::ofstream f(decl);
        f << run({"export", "--covering", "nsym-to-sym", "-N", "3"}).out;
    }
    auto v = run({"verify", "--covering", decl.string(), "-N", "3"});
    CHECK(v.code == 0);
    CHECK(run({"verify", "--covering", decl.string(), "-N", "4"}).code == 1);
    CHECK(v.out.find("covering nsym-to-sym") != std::string::npos);
    CHECK(run({"export", "--covering", decl.string(), "-N", "3"}).out == slurp(decl));

    auto table = scratch("monoid.json");
    {
        std::ofstream f(table);
        f << monoid_table_json(example_monoid());
    }
    CHECK(run({"verify", "--bialgebra", table.string()}).code == 0);
    auto d = run({"nichols", table.string(), "--dual"});
    CHECK(d.code == 0);
    CHECK(d.out.find("beta bijective   no") != std::string::npos);
    auto g = scratch("z4.json");
    {
        std::ofstream f(g);
        f << monoid_table_json(cyclic_group(4));
    }
    CHECK(run({"nichols", g.string()}).out.find("beta rank        16/16") != std::string::npos);

    auto bad = scratch("bad.json");
    {
        std::ofstream f(bad);
        f << "{";
    }
    CHECK(run({"verify", "--covering", bad.string()}).code == 2);
    CHECK(run({"nichols", bad.string()}).code == 2);
}
