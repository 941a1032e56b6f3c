#include "meas/covering.hpp"

#include "meas/indexed.hpp"
#include "meas/instances.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace meas {

namespace {

void require_same(const Bialg& x, const Bialg& y, const std::string& what) {
    if (x != y && x->name != y->name)
        throw std::invalid_argument(what + ": " + x->name + " does not match " + y->name);
}

Witness witness(std::string id, std::vector<BasisKey> in, Element l, Element r) {
    return Witness{std::move(id), std::move(in), std::move(l), std::move(r)};
}

Element tensor_apply(const Element& x, const std::function<Element(const BasisKey&)>& f) {
    Element out;
    for (const auto& [k, c] : x.terms()) {
        Element l = f(k.left());
        if (l.is_zero()) continue;
        out += c * tensor(l, f(k.right()));
    }
    return out;
}

}  // namespace

// ---- 2-cells ----

MorphismReport verify_coalgebra_map(const CoalgebraMap& t, int N) {
    MorphismReport r;
    for (const auto& c : t.source->keys_upto(N)) {
        Element tc = t(c);
        Element lhs = t.target->coproduct_of(tc);
        Element rhs = tensor_apply(t.source->coproduct(c), t.f);
        if (lhs != rhs) {
            r.coalgebra_map_ok = false;
            r.witnesses.push_back(witness("comultiplicative", {c}, lhs, rhs));
        }
        Scalar e1 = t.target->counit_of(tc);
        Scalar e2 = t.source->counit(c);
        if (e1 != e2) {
            r.coalgebra_map_ok = false;
            r.witnesses.push_back(witness("counit", {c}, Element(BasisKey::point("eps"), e1),
                                          Element(BasisKey::point("eps"), e2)));
        }
    }
    return r;
}

MorphismReport verify_morphism(const CoveringMorphism& m, int N) {
    require_same(m.source.B, m.target.B, "morphism");
    require_same(m.source.A, m.target.A, "morphism");
    MorphismReport r = verify_coalgebra_map(m.t, N);
    auto cs = m.source.C->keys_upto(N);
    for (const auto& b : m.source.B->keys_upto(N))
        for (const auto& c : cs) {
            Element lhs = m.source.value(b, c);
            Element rhs = m.target.apply(Element(b), m.t(c));
            if (lhs != rhs) {
                r.triangle_ok = false;
                if (r.witnesses.size() < 8) r.witnesses.push_back(witness("triangle", {b, c}, lhs, rhs));
            }
        }
    return r;
}

bool is_surjective(const CoalgebraMap& t, int N) {
    KeyIndex idx;
    auto target = t.target->keys_upto(N);
    for (const auto& k : target) idx.id(k);
    SparseEchelon e(target.size());
    for (const auto& c : t.source->keys_upto(N)) {
        SparseRow row;
        Element tc = t(c);
        for (const auto& [k, v] : tc.terms()) {
            int i = idx.find(k);
            if (i >= 0) row[static_cast<std::size_t>(i)] = v;
        }
        if (!row.empty()) e.insert(std::move(row));
    }
    return e.rank() == target.size();
}

// ---- 1-cells ----

PartialCovering identity_covering(const Bialg& a) {
    PartialCovering f;
    f.name = "id(" + a->name + ")";
    f.B = a;
    f.A = a;
    f.C = build_point();
    f.mode = CoveringMode::Table;
    f.rule = [](const BasisKey& b, const BasisKey&) { return Element(b); };
    return f;
}

PartialCovering from_morphism_family(const Bialg& B, const Bialg& A, const std::vector<LinMap>& maps, int N) {
    if (maps.empty()) throw std::invalid_argument("empty morphism family");
    std::vector<std::string> names;
    auto keys = B->keys_upto(N);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const LinMap& m = maps[i];
        const std::string who = "map " + std::to_string(i + 1) + " (" + m.name + ")";
        if (m.target->name != A->name) throw std::invalid_argument(who + " does not land in " + A->name);
        auto fail = [&](const std::string& id, std::vector<BasisKey> in, const Element& l, const Element& r) {
            throw std::invalid_argument(who + " is not a bialgebra map: " + id + " fails at " + in[0].render() +
                                        (in.size() > 1 ? " " + in[1].render() : "") + ": " + l.render() +
                                        " != " + r.render());
        };
        if (m.apply(B->unit) != A->unit) fail("unit", {B->unit.terms().begin()->first}, m.apply(B->unit), A->unit);
        for (const auto& x : keys) {
            Element fx = m(x);
            Element l = A->coproduct_of(fx);
            Element r = tensor_apply(B->coproduct(x), [&m](const BasisKey& k) { return m(k); });
            if (l != r) fail("comultiplicativity", {x}, l, r);
            if (A->counit_of(fx) != B->counit(x))
                fail("counit", {x}, Element(BasisKey::point("eps"), A->counit_of(fx)),
                     Element(BasisKey::point("eps"), B->counit(x)));
            for (const auto& y : keys) {
                if (!B->flags.finite_type && B->degree(x) + B->degree(y) > N) continue;
                Element xy;
                try {
                    xy = B->product(x, y);
                } catch (const WindowOverflow&) {
                    continue;
                }
                Element l2 = m.apply(xy);
                Element r2 = A->multiply(fx, m(y));
                if (l2 != r2) fail("multiplicativity", {x, y}, l2, r2);
            }
        }
        names.push_back("xi" + std::to_string(i + 1));
    }
    PartialCovering f;
    f.name = "family(" + B->name + "," + A->name + ")";
    f.B = B;
    f.A = A;
    f.C = build_pointed_coalgebra(names);
    f.mode = CoveringMode::Table;
    f.degree_bound = N;
    f.rule = [maps](const BasisKey& b, const BasisKey& c) {
        std::size_t i = static_cast<std::size_t>(std::stoi(c.name().substr(2))) - 1;
        return maps.at(i)(b);
    };
    return f;
}

PartialCovering compose(const PartialCovering& outer, const PartialCovering& inner) {
    require_same(inner.A, outer.B, "compose");
    PartialCovering h;
    h.name = outer.name + "*" + inner.name;
    h.B = inner.B;
    h.A = outer.A;
    h.C = tensor_coalgebra(inner.C, outer.C);
    h.mode = CoveringMode::Table;
    h.degree_bound = std::min(outer.degree_bound, inner.degree_bound);
    h.rule = [outer, inner](const BasisKey& d, const BasisKey& c) {
        return outer.apply(inner.value(d, c.left()), Element(c.right()));
    };
    return h;
}

PartialCovering direct_sum(const PartialCovering& f, const PartialCovering& g) {
    require_same(f.B, g.B, "direct sum");
    require_same(f.A, g.A, "direct sum");
    PartialCovering h;
    h.name = f.name + "(+)" + g.name;
    h.B = f.B;
    h.A = f.A;
    h.C = direct_sum_coalgebra(f.C, g.C);
    h.mode = CoveringMode::Table;
    h.degree_bound = std::min(f.degree_bound, g.degree_bound);
    h.rule = [f, g](const BasisKey& b, const BasisKey& c) {
        return c.slot() == 1 ? f.value(b, c.inner()) : g.value(b, c.inner());
    };
    return h;
}

CoveringMorphism identity_morphism(const PartialCovering& f) {
    return CoveringMorphism{f, f, CoalgebraMap{"id", f.C, f.C, [](const BasisKey& k) { return Element(k); }}};
}

// ---- pushouts ----

PushoutResult pushout(const CoveringMorphism& s, const CoveringMorphism& t, int N) {
    if (s.source.C != t.source.C && s.source.C->name != t.source.C->name)
        throw std::invalid_argument("pushout: morphisms have different sources");
    require_same(s.target.A, t.target.A, "pushout");
    const PartialCovering g = s.target;
    const PartialCovering h = t.target;
    Coalg sum = direct_sum_coalgebra(g.C, h.C);
    auto keys = sum->keys_upto(N);
    KeyIndex idx;
    for (const auto& k : keys) idx.id(k);
    auto column = [&idx](const BasisKey& k) {
        int i = idx.find(k);
        if (i < 0) throw std::invalid_argument("pushout: " + k.render() + " lies beyond the degree bound");
        return static_cast<std::size_t>(i);
    };

    SparseEchelon rel(keys.size());
    for (const auto& x : s.source.C->keys_upto(N)) {
        SparseRow row;
        Element sx = s.t(x), tx = t.t(x);
        for (const auto& [k, v] : sx.terms()) row[column(BasisKey::summand(1, k))] += v;
        for (const auto& [k, v] : tx.terms()) row[column(BasisKey::summand(2, k))] -= v;
        std::erase_if(row, [](const auto& e) { return sgn(e.second) == 0; });
        if (!row.empty()) rel.insert(std::move(row));
    }
    auto reduced = rel.reduced();
    std::vector<bool> pivot(keys.size(), false);
    for (const auto& [p, row] : reduced) pivot[p] = true;

    PushoutResult out;
    out.relation_rank = reduced.size();
    const std::string qname = "Q";
    std::vector<int> class_of(keys.size(), -1);
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (!pivot[i]) {
            class_of[i] = static_cast<int>(out.representatives.size());
            out.representatives.push_back(keys[i]);
        }
    // A pivot key equals minus the rest of its reduced row modulo the relations.
    std::map<std::size_t, Element> pivot_image;
    for (const auto& [p, row] : reduced) {
        Element e;
        for (const auto& [j, v] : row)
            if (j != p) e.add(BasisKey::cls(qname, class_of[j]), -v);
        pivot_image[p] = e;
    }
    auto project = [keys, class_of, pivot_image, idx, qname](const BasisKey& k) -> Element {
        int i = idx.find(k);
        if (i < 0) throw std::out_of_range("pushout projection: " + k.render() + " beyond the degree bound");
        auto u = static_cast<std::size_t>(i);
        if (class_of[u] >= 0) return Element(BasisKey::cls(qname, class_of[u]));
        return pivot_image.at(u);
    };
    out.project = project;

    // Coideal check on the relation basis.
    for (const auto& [p, row] : reduced) {
        Element r;
        for (const auto& [j, v] : row) r.add(keys[j], v);
        if (sgn(sum->counit_of(r)) != 0)
            throw std::invalid_argument("pushout: relations are not a coideal (counit) at " + r.render());
        if (!tensor_apply(sum->coproduct_of(r), project).is_zero())
            throw std::invalid_argument("pushout: relations are not a coideal (coproduct) at " + r.render());
    }

    auto reps = out.representatives;
    auto q = std::make_shared<CoalgebraHandle>();
    q->name = "(" + g.C->name + "(+)" + h.C->name + ")/I";
    q->flags.finite_type = true;
    q->flags.graded = sum->flags.graded;
    q->flags.cocommutative = sum->flags.cocommutative;
    int top = 0;
    for (const auto& r : reps) top = std::max(top, sum->degree(r));
    q->top_degree = top;
    q->degree = [reps, sum](const BasisKey& k) { return sum->degree(reps.at(static_cast<std::size_t>(k.index()))); };
    q->contains = [n = reps.size(), qname](const BasisKey& k) {
        return k.kind() == KeyKind::Class && k.name() == qname && k.index() >= 0 &&
               static_cast<std::size_t>(k.index()) < n;
    };
    q->basis = [reps, sum, qname](int n) {
        std::vector<BasisKey> b;
        for (std::size_t i = 0; i < reps.size(); ++i)
            if (sum->degree(reps[i]) == n) b.push_back(BasisKey::cls(qname, static_cast<int>(i)));
        return b;
    };
    q->coproduct = [reps, sum, project](const BasisKey& k) {
        return tensor_apply(sum->coproduct(reps.at(static_cast<std::size_t>(k.index()))), project);
    };
    q->counit = [reps, sum](const BasisKey& k) { return sum->counit(reps.at(static_cast<std::size_t>(k.index()))); };
    Coalg qc = q;

    PartialCovering k;
    k.name = "pushout(" + g.name + "," + h.name + ")";
    k.B = g.B;
    k.A = g.A;
    k.C = qc;
    k.mode = CoveringMode::Table;
    k.degree_bound = N;
    k.rule = [reps, g, h](const BasisKey& b, const BasisKey& c) {
        const BasisKey& r = reps.at(static_cast<std::size_t>(c.index()));
        return r.slot() == 1 ? g.value(b, r.inner()) : h.value(b, r.inner());
    };
    out.k = k;
    out.from_g = CoveringMorphism{g, k, CoalgebraMap{"in1", g.C, qc, [project](const BasisKey& x) {
                                                         return project(BasisKey::summand(1, x));
                                                     }}};
    out.from_h = CoveringMorphism{h, k, CoalgebraMap{"in2", h.C, qc, [project](const BasisKey& x) {
                                                         return project(BasisKey::summand(2, x));
                                                     }}};
    // If s is onto then so is the opposite leg, and symmetrically for t.
    bool s_onto = is_surjective(s.t, N), t_onto = is_surjective(t.t, N);
    out.propagates_surjectivity = (!s_onto || is_surjective(out.from_h.t, N)) &&
                                  (!t_onto || is_surjective(out.from_g.t, N));
    return out;
}

UniversalReport pushout_universal(const PushoutResult& p, const CoveringMorphism& u, const CoveringMorphism& v, int N) {
    UniversalReport r;
    Coalg target = u.t.target;
    std::size_t n = p.representatives.size();
    // Unknowns: phi([i]) for each class. Each summand key d gives phi(pi(d)) = w(d).
    std::map<BasisKey, std::size_t> col;
    std::vector<std::pair<Element, Element>> eqs;
    auto add_eq = [&](const BasisKey& d, const Element& w) {
        eqs.emplace_back(p.project(d), w);
        for (const auto& [k, c] : w.terms()) col.emplace(k, col.size());
    };
    for (const auto& x : u.source.C->keys_upto(N)) add_eq(BasisKey::summand(1, x), u.t(x));
    for (const auto& y : v.source.C->keys_upto(N)) add_eq(BasisKey::summand(2, y), v.t(y));
    // Solve one linear system per target coordinate: Pi * Phi = W.
    DenseMatrix P(eqs.size(), n);
    for (std::size_t i = 0; i < eqs.size(); ++i)
        for (const auto& [k, c] : eqs[i].first.terms()) P.at(i, static_cast<std::size_t>(k.index())) = c;
    r.unique = rank(P) == n;
    std::vector<Element> phi(n);
    r.exists = true;
    for (const auto& [key, j] : col) {
        Vec w(eqs.size());
        for (std::size_t i = 0; i < eqs.size(); ++i) w[i] = eqs[i].second.coeff(key);
        auto sol = solve(P, w);
        if (sol.status != SolveStatus::ok) {
            r.exists = false;
            return r;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (sgn(sol.x[i]) != 0) phi[i].add(key, sol.x[i]);
    }
    CoalgebraMap map{"universal", p.k.C, target, [phi](const BasisKey& k) { return phi.at(static_cast<std::size_t>(k.index())); }};
    CoveringMorphism induced{p.k, u.target, map};
    if (!verify_morphism(induced, N).ok()) r.exists = false;
    if (r.exists) r.map = map;
    return r;
}

// ---- graded constructions ----

PartialCovering locally_finitize(const PartialCovering& c) {
    if (!c.A->flags.graded) throw std::invalid_argument("locally_finitize: " + c.A->name + " is not graded");
    PartialCovering f;
    f.name = "lf(" + c.name + ")";
    f.B = c.B;
    f.A = c.A;
    f.C = tensor_coalgebra(c.C, build_nsym_coalgebra_N());
    f.mode = CoveringMode::Table;
    f.degree_bound = c.degree_bound;
    GradedBasis g = c.A->graded_basis();
    f.rule = [c, g](const BasisKey& b, const BasisKey& x) {
        return homogeneous_component(c.value(b, x.left()), x.right().exponent(), g);
    };
    if (c.B->flags.graded && grading_report(c, c.degree_bound).graded == GradingStatus::TrueUpToN)
        f.locally_finite_reason = "the value at c(x)H_n is the degree n part of a value of degree deg b";
    return f;
}

PartialCovering canonical_nsym_covering(const Bialg& a) {
    if (!a->flags.graded || !a->flags.connected)
        throw std::invalid_argument("canonical covering needs a graded connected target, got " + a->name);
    PartialCovering f;
    f.name = "can(" + a->name + ")";
    f.B = build_nsym();
    f.A = a;
    f.C = a;
    f.rule = [a](const BasisKey& b, const BasisKey& c) {
        return a->degree(c) == b.parts()[0] ? Element(c) : Element();
    };
    if (!a->flags.cocommutative) {
        auto rep = verify_covering(f, 3);
        std::string why = a->name + " is not cocommutative";
        if (!rep.coalgebra_witnesses.empty()) {
            const auto& w = rep.coalgebra_witnesses[0];
            why += "; coalgebra map fails at (" + w.inputs[0].render() + ", " + w.inputs[1].render() +
                   "): " + w.lhs.render() + " != " + w.rhs.render();
        }
        throw std::invalid_argument(why);
    }
    return f;
}

FactorReport factor_through_can(const PartialCovering& f, int N) {
    FactorReport r;
    if (f.B->name != "NSym") throw std::invalid_argument("factor_through_can needs B = NSym, got " + f.B->name);
    std::map<BasisKey, Element> table;
    for (const auto& c : f.C->keys_upto(N)) {
        Element s;
        for (int n = 0; n <= 2 * N + 1; ++n) {
            BasisKey h = n == 0 ? BasisKey::composition('H', {}) : BasisKey::composition('H', {n});
            Element v = f.value(h, c);
            if (v.is_zero()) continue;
            if (n > N) {
                r.divergent = c;
                r.witnesses.push_back(witness("divergent sum", {h, c}, v, Element()));
                return r;
            }
            s += v;
        }
        table[c] = s;
    }
    PartialCovering can;
    try {
        can = canonical_nsym_covering(f.A);
    } catch (const std::invalid_argument& e) {
        r.witnesses.push_back(witness(e.what(), {}, Element(), Element()));
        return r;
    }
    Coalg ac = f.A;
    CoalgebraMap fbar{"fbar", f.C, ac, [table](const BasisKey& k) {
                          auto it = table.find(k);
                          if (it == table.end()) throw std::out_of_range("fbar: " + k.render() + " beyond the bound");
                          return it->second;
                      }};
    auto mr = verify_morphism(CoveringMorphism{f, can, fbar}, N);
    r.witnesses = mr.witnesses;
    r.ok = mr.ok();
    r.fbar = fbar;
    return r;
}

EquivalenceReport equivalent_via(const PartialCovering& f, const PartialCovering& g, const PartialCovering& h,
                                 const CoveringMorphism& s, const CoveringMorphism& t, int N) {
    EquivalenceReport r;
    r.s_ok = verify_morphism(s, N).ok();
    r.t_ok = verify_morphism(t, N).ok();
    r.s_surjective = is_surjective(s.t, N);
    r.t_surjective = is_surjective(t.t, N);
    auto rf = image_ranks(f, N), rg = image_ranks(g, N), rh = image_ranks(h, N);
    auto achieved = [](const std::vector<DegreeRank>& v) {
        std::vector<std::size_t> out;
        for (const auto& d : v) out.push_back(d.achieved);
        return out;
    };
    // Each image sits inside the image of h, so equal ranks mean equal ranges.
    r.ranges_coincide = achieved(rf) == achieved(rh) && achieved(rg) == achieved(rh);
    r.notes.push_back("ranges compared by rank through degree " + std::to_string(N));
    if (!r.s_ok) r.notes.push_back("first morphism fails verification");
    if (!r.t_ok) r.notes.push_back("second morphism fails verification");
    if (!r.s_surjective) r.notes.push_back("first morphism is not surjective");
    if (!r.t_surjective) r.notes.push_back("second morphism is not surjective");
    r.equivalent = r.s_ok && r.t_ok && r.s_surjective && r.t_surjective && r.ranges_coincide;
    return r;
}

namespace {

std::vector<BasisKey> points_of(const Coalg& c, int N) {
    auto keys = c->keys_upto(N);
    for (const auto& k : keys)
        if (c->coproduct(k) != Element(BasisKey::tensor(k, k)) || c->counit(k) != 1)
            throw std::invalid_argument(c->name + " is not pointed: " + k.render() + " is not grouplike");
    return keys;
}

// Every map from -> to, as index vectors, in lexicographic order.
std::vector<std::vector<std::size_t>> all_maps(std::size_t from, std::size_t to) {
    std::vector<std::vector<std::size_t>> out;
    if (to == 0) return from == 0 ? std::vector<std::vector<std::size_t>>{{}} : out;
    std::vector<std::size_t> m(from, 0);
    while (true) {
        out.push_back(m);
        std::size_t i = 0;
        while (i < from && ++m[i] == to) m[i++] = 0;
        if (i == from) break;
    }
    return out;
}

CoveringMorphism point_morphism(const PartialCovering& f, const PartialCovering& g, const std::vector<BasisKey>& src,
                                const std::vector<BasisKey>& dst, const std::vector<std::size_t>& m) {
    std::map<BasisKey, BasisKey> table;
    for (std::size_t i = 0; i < src.size(); ++i) table.emplace(src[i], dst[m[i]]);
    return CoveringMorphism{f, g, CoalgebraMap{"point map", f.C, g.C, [table](const BasisKey& k) {
                                                   auto it = table.find(k);
                                                   return it == table.end() ? Element() : Element(it->second);
                                               }}};
}

}  // namespace

PointSearchReport search_invertible_2cells(const PartialCovering& f, const PartialCovering& g, int N) {
    PointSearchReport r;
    auto pf = points_of(f.C, N), pg = points_of(g.C, N);
    std::vector<std::vector<std::size_t>> fwd, bwd;
    for (const auto& m : all_maps(pf.size(), pg.size())) {
        ++r.forward_maps;
        if (verify_morphism(point_morphism(f, g, pf, pg, m), N).ok()) fwd.push_back(m);
    }
    for (const auto& m : all_maps(pg.size(), pf.size())) {
        ++r.backward_maps;
        if (verify_morphism(point_morphism(g, f, pg, pf, m), N).ok()) bwd.push_back(m);
    }
    r.forward_2cells = fwd.size();
    r.backward_2cells = bwd.size();
    for (const auto& u : fwd)
        for (const auto& v : bwd) {
            bool inverse = true;
            for (std::size_t i = 0; i < u.size() && inverse; ++i) inverse = v[u[i]] == i;
            for (std::size_t j = 0; j < v.size() && inverse; ++j) inverse = u[v[j]] == j;
            if (inverse) {
                r.inverse_pair.emplace(point_morphism(f, g, pf, pg, u), point_morphism(g, f, pg, pf, v));
                return r;
            }
        }
    return r;
}

NondegeneracyReport nondegeneracy_report(const PartialCovering& f, int N) {
    NondegeneracyReport r;
    auto cs = f.C->keys_upto(N);
    auto t = tabulate_values(f, N);
    // One equation per (b, a): sum over c of x_c f(b, c)_a = 0.
    std::map<std::pair<std::size_t, BasisKey>, SparseRow> eqs;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (const auto& [j, v] : t.rows[i])
            for (const auto& [a, coef] : v.terms()) eqs[{i, a}][j] = coef;
    std::vector<SparseRow> rows;
    for (auto& [k, row] : eqs) rows.push_back(std::move(row));
    for (const auto& v : kernel_basis_sparse(rows, cs.size())) {
        Element e;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (sgn(v[j]) != 0) e.add(cs[j], v[j]);
        r.kernel.push_back(e);
    }
    r.nondegenerate = r.kernel.empty();
    return r;
}

}  // namespace meas
