#include "meas/catalog.hpp"

#include <sstream>
#include <stdexcept>

namespace meas {

namespace {

int int_param(const HandleSpec& s, const std::string& key, int fallback) {
    auto it = s.params.find(key);
    if (it == s.params.end()) return fallback;
    try {
        std::size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("parameter " + key + " of " + s.builder + " is not an integer: " + it->second);
    }
}

std::string str_param(const HandleSpec& s, const std::string& key) {
    auto it = s.params.find(key);
    if (it == s.params.end()) throw std::invalid_argument(s.builder + " needs parameter " + key);
    return it->second;
}

Scalar factorial(int n) {
    Scalar r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

int total(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

PartialCovering decree(std::string name, const HandleSpec& b, const HandleSpec& c, const HandleSpec& a,
                       std::function<Element(const BasisKey&, const BasisKey&)> rule) {
    PartialCovering f;
    f.name = std::move(name);
    f.B = build_bialgebra(b);
    f.C = build_coalgebra(c);
    f.A = build_bialgebra(a);
    f.rule = std::move(rule);
    f.source = CoveringSource{b, a, c};
    return f;
}

const std::vector<std::string> kCoverings = {
    "nsym-to-sym",       "poly-to-sym",     "poly-to-qsym", "omp-to-nsym", "omp-to-nsym-scaled",
    "can-sym",           "monoid-dual-cover", "laurent-to-group",
};

}  // namespace

PartialCovering build_omp_covering(AlphabetBound bound, bool scaled) {
    HandleSpec omp, N, nsym;
    omp.builder = "omp";
    omp.params["m"] = std::to_string(bound.max_letter);
    N.builder = "N";
    nsym.builder = "nsym";
    return decree(scaled ? "omp-to-nsym-scaled" : "omp-to-nsym", omp, N, nsym,
                  [scaled](const BasisKey& b, const BasisKey& c) {
                      int k = static_cast<int>(b.blocks()[0].size());
                      if (k != c.exponent()) return Element();
                      Element h(BasisKey::composition('H', {k}));
                      return scaled ? factorial(k) * h : h;
                  });
}

MonoidTable example_monoid() { return right_zero_monoid(); }

Bialg build_bialgebra(const HandleSpec& s) {
    const std::string& b = s.builder;
    if (b == "sym") return build_sym();
    if (b == "nsym") return build_nsym();
    if (b == "qsym") return build_qsym();
    if (b == "omp") return build_omp({int_param(s, "m", 4)});
    if (b == "kx") return build_poly_primitive();
    if (b == "kz") return build_poly_point();
    if (b == "laurent") return build_laurent_point(int_param(s, "window", 4));
    if (b == "z2-group") return build_group_algebra(cyclic_group(2));
    if (b == "z3-group") return build_group_algebra(cyclic_group(3));
    if (b == "s3-group") return build_group_algebra(symmetric_group_s3());
    if (b == "monoid-algebra") return build_monoid_algebra(example_monoid());
    if (b == "monoid-dual") return build_monoid_dual(example_monoid());
    if (b == "group") return build_group_algebra(load_monoid_file(str_param(s, "table")));
    if (b == "monoid") return build_monoid_algebra(load_monoid_file(str_param(s, "table")));
    if (b == "monoid-dual-of") return build_monoid_dual(load_monoid_file(str_param(s, "table")));
    throw std::invalid_argument("unknown bialgebra builder: " + b);
}

Coalg build_coalgebra(const HandleSpec& s) {
    const std::string& b = s.builder;
    if (b == "N") return build_nsym_coalgebra_N();
    if (b == "point") return build_point();
    if (b == "matrix") return build_matrix_coalgebra(int_param(s, "n", 2));
    if (b == "pointed") {
        std::vector<std::string> names;
        std::stringstream ss(str_param(s, "names"));
        for (std::string item; std::getline(ss, item, ',');) names.push_back(item);
        return build_pointed_coalgebra(names);
    }
    if (b == "coalg") {
        if (!s.of) throw std::invalid_argument("coalg needs an inner bialgebra");
        return build_bialgebra(*s.of);
    }
    throw std::invalid_argument("unknown coalgebra builder: " + b);
}

HandleSpec bialgebra_spec(const std::string& name, const RegistryParams& p) {
    HandleSpec s;
    s.builder = name;
    if (name == "omp") s.params["m"] = std::to_string(p.m);
    if (name == "laurent") s.params["window"] = std::to_string(p.window);
    return s;
}

HandleSpec coalg_of(const HandleSpec& of) {
    HandleSpec s;
    s.builder = "coalg";
    s.of = std::make_shared<HandleSpec>(of);
    return s;
}

std::vector<std::string> bialgebra_names() {
    return {"sym",      "nsym",     "qsym",     "omp",            "kx",         "kz",
            "laurent",  "z2-group", "z3-group", "s3-group",       "monoid-dual", "monoid-algebra"};
}

Bialg bialgebra_by_name(const std::string& name, const RegistryParams& p) {
    for (const auto& n : bialgebra_names())
        if (n == name) return build_bialgebra(bialgebra_spec(name, p));
    throw std::invalid_argument("unknown bialgebra: " + name);
}

std::vector<std::string> covering_names() {
    auto out = kCoverings;
    for (const auto& b : bialgebra_names()) out.push_back("identity-" + b);
    return out;
}

PartialCovering covering_by_name(const std::string& name, const RegistryParams& p) {
    HandleSpec N;
    N.builder = "N";
    auto spec = [&p](const std::string& n) { return bialgebra_spec(n, p); };

    if (name == "nsym-to-sym")
        return decree(name, spec("nsym"), coalg_of(spec("sym")), spec("sym"),
                      [](const BasisKey& b, const BasisKey& c) {
                          return b.parts()[0] == total(c.parts()) ? Element(c) : Element();
                      });
    if (name == "poly-to-sym")
        return decree(name, spec("kx"), coalg_of(spec("sym")), spec("sym"),
                      [](const BasisKey&, const BasisKey& c) {
                          return c.parts().size() == 1 ? Element(c) : Element();
                      });
    if (name == "poly-to-qsym")
        return decree(name, spec("kz"), coalg_of(spec("qsym")), spec("qsym"),
                      [](const BasisKey&, const BasisKey& c) {
                          return c.parts().size() == 1 ? Element(c) : Element();
                      });
    if (name == "omp-to-nsym" || name == "omp-to-nsym-scaled") {
        PartialCovering f = build_omp_covering({p.m}, name == "omp-to-nsym-scaled");
        f.name = name;
        return f;
    }
    if (name == "can-sym") {
        PartialCovering f = canonical_nsym_covering(build_sym());
        f.name = name;
        f.source = CoveringSource{spec("nsym"), spec("sym"), coalg_of(spec("sym"))};
        return f;
    }
    if (name == "monoid-dual-cover")
        return decree(name, spec("kz"), coalg_of(spec("monoid-dual")), spec("monoid-dual"),
                      [](const BasisKey&, const BasisKey& c) { return Element(c); });
    if (name == "laurent-to-group") {
        auto g = symmetric_group_s3();
        return decree(name, spec("laurent"), coalg_of(spec("s3-group")), spec("s3-group"),
                      [g](const BasisKey& b, const BasisKey& c) {
                          return b.exponent() > 0 ? Element(c) : Element(BasisKey::monoid('g', g.inverse(c.name())));
                      });
    }
    const std::string prefix = "identity-";
    if (name.rfind(prefix, 0) == 0) {
        HandleSpec s = spec(name.substr(prefix.size()));
        PartialCovering f = identity_covering(bialgebra_by_name(s.builder, p));
        f.name = name;
        HandleSpec pt;
        pt.builder = "point";
        f.source = CoveringSource{s, s, pt};
        return f;
    }
    throw std::invalid_argument("unknown covering: " + name);
}

TwoPointExample two_point_example(const Bialg& a) {
    TwoPointExample ex;
    auto phi = [](const BasisKey& b, const BasisKey&) { return Element(b); };
    ex.f.name = "two-point";
    ex.f.B = a;
    ex.f.A = a;
    ex.f.C = build_pointed_coalgebra({"x", "y"});
    ex.f.mode = CoveringMode::Table;
    ex.f.rule = phi;
    ex.g.name = "one-point";
    ex.g.B = a;
    ex.g.A = a;
    ex.g.C = build_pointed_coalgebra({"z"});
    ex.g.mode = CoveringMode::Table;
    ex.g.rule = phi;
    ex.t = CoveringMorphism{ex.f, ex.g, CoalgebraMap{"t", ex.f.C, ex.g.C, [](const BasisKey&) {
                                                         return Element(BasisKey::point("z"));
                                                     }}};
    return ex;
}

}  // namespace meas
