#include "meas/transfer.hpp"

#include "meas/indexed.hpp"

#include <algorithm>
#include <stdexcept>

namespace meas {

namespace {

Witness witness(std::string id, std::vector<BasisKey> in, Element l, Element r) {
    return Witness{std::move(id), std::move(in), std::move(l), std::move(r)};
}

Element scalar_element(const Scalar& s) { return Element(BasisKey::point("eps"), s); }

bool grouplike(const CoalgebraHandle& h, const BasisKey& k) {
    return h.counit(k) == 1 && h.coproduct(k) == Element(BasisKey::tensor(k, k));
}

Element tensor_apply(const Element& x, const std::function<Element(const BasisKey&)>& f,
                     const std::function<Element(const BasisKey&)>& g) {
    Element out;
    for (const auto& [k, c] : x.terms()) {
        Element l = f(k.left());
        if (l.is_zero()) continue;
        out += c * tensor(l, g(k.right()));
    }
    return out;
}

Element swap_tensor(const Element& x) {
    Element out;
    for (const auto& [k, c] : x.terms()) out.add(BasisKey::tensor(k.right(), k.left()), c);
    return out;
}

// Row reduction that remembers which input columns produced each pivot row.
class TrackedEchelon {
public:
    void reduce(SparseRow& v, SparseRow& comb) const {
        auto it = v.begin();
        while (it != v.end()) {
            auto p = pivots_.find(it->first);
            if (p == pivots_.end()) {
                ++it;
                continue;
            }
            std::size_t col = it->first;
            Scalar c = it->second;
            axpy(v, -c, p->second.first);
            axpy(comb, -c, p->second.second);
            it = v.upper_bound(col);
        }
    }

    void insert(SparseRow v, SparseRow comb) {
        reduce(v, comb);
        if (v.empty()) return;
        Scalar lead = v.begin()->second;
        for (auto& [k, x] : v) x /= lead;
        for (auto& [k, x] : comb) x /= lead;
        std::size_t col = v.begin()->first;
        pivots_.emplace(col, std::make_pair(std::move(v), std::move(comb)));
    }

private:
    static void axpy(SparseRow& y, const Scalar& a, const SparseRow& x) {
        for (const auto& [k, v] : x) {
            auto [it, fresh] = y.emplace(k, a * v);
            if (!fresh) {
                it->second += a * v;
                if (sgn(it->second) == 0) y.erase(it);
            }
        }
    }

    std::map<std::size_t, std::pair<SparseRow, SparseRow>> pivots_;
};

LinMap oracle_antipode(const Bialg& a, int N, std::string& name) {
    if (a->flags.graded && a->flags.connected && a->free_on_generators && a->factor) {
        // S is an anti-algebra map, so Takeuchi on generators determines it.
        auto keys = a->keys_upto(N);
        std::vector<std::vector<BasisKey>> words;
        int top = 0;
        for (const auto& k : keys) {
            words.push_back(a->factor(k).value());
            for (const auto& g : words.back()) top = std::max(top, a->degree(g));
        }
        LinMap t = takeuchi_antipode(a, top);
        name = "takeuchi on generators";
        LinMap out{"S_oracle", a, a, N, {}};
        for (std::size_t i = 0; i < keys.size(); ++i) {
            Element x = a->unit;
            for (auto it = words[i].rbegin(); it != words[i].rend(); ++it) x = a->multiply(x, t(*it));
            out.table.emplace(keys[i], std::move(x));
        }
        return out;
    }
    if (a->flags.graded && a->flags.connected) {
        name = "takeuchi";
        return takeuchi_antipode(a, N);
    }
    name = "convolution-inverse solve";
    auto s = antipode_solve(a, N);
    if (!s) throw AntipodeUnavailable(a->name);
    return *s;
}

std::string degree_label(const CoalgebraHandle& h, const BasisKey& k) {
    return h.flags.graded ? "degree " + std::to_string(h.degree(k)) : "weight " + std::to_string(h.degree(k));
}

}  // namespace

// ---- sections and transfer ----

Element LinearSection::operator()(const BasisKey& a) const {
    auto it = table.find(a);
    if (it == table.end()) throw std::out_of_range("section: " + a.render() + " beyond the verified degree");
    return it->second;
}

LinearSection linear_section(const PartialCovering& f, int N, SectionOrder order) {
    auto t = tabulate_values(f, N);
    std::vector<std::pair<std::size_t, std::size_t>> cols;
    std::vector<const Element*> vals;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (const auto& [j, v] : t.rows[i]) {
            cols.emplace_back(i, j);
            vals.push_back(&v);
        }
    if (order == SectionOrder::Reversed) {
        std::reverse(cols.begin(), cols.end());
        std::reverse(vals.begin(), vals.end());
    }
    auto targets = f.A->keys_upto(N);
    KeyIndex aidx;
    for (const auto& a : targets) aidx.id(a);
    TrackedEchelon e;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        SparseRow v;
        for (const auto& [k, c] : vals[j]->terms()) v[static_cast<std::size_t>(aidx.id(k))] = c;
        e.insert(std::move(v), SparseRow{{j, Scalar(1)}});
    }

    LinearSection s;
    s.covering = f;
    s.verified_degree = N;
    for (const auto& a : targets) {
        SparseRow v{{static_cast<std::size_t>(aidx.find(a)), Scalar(1)}}, comb;
        e.reduce(v, comb);
        if (!v.empty())
            throw std::invalid_argument(f.name + " is not surjective at " + degree_label(*f.A, a) + ": " +
                                        a.render() + " has no preimage");
        Element x, image;
        for (const auto& [j, c] : comb) {
            const auto& [bi, ci] = cols[j];
            x.add(BasisKey::tensor(t.b_keys[bi], t.c_keys[ci]), -c);
            image += -c * *vals[j];
        }
        if (image != Element(a)) throw std::logic_error("section does not invert " + f.name + " at " + a.render());
        s.table.emplace(a, std::move(x));
    }
    return s;
}

bool is_primitive(const BialgebraHandle& h, const Element& x) {
    return h.coproduct_of(x) == tensor(x, h.unit) + tensor(h.unit, x);
}

Element transfer_primitive(const PartialCovering& f, const Element& p, const BasisKey& c) {
    if (!is_primitive(*f.B, p)) throw std::invalid_argument(p.render() + " is not primitive in " + f.B->name);
    Element v = f.apply(p, Element(c));
    if (!is_primitive(*f.A, v))
        throw std::logic_error("f(" + p.render() + ", " + c.render() + ") = " + v.render() + " is not primitive in " +
                               f.A->name);
    return v;
}

PrimitiveContainment primitive_containment(const PartialCovering& f, int N) {
    PrimitiveContainment r;
    auto cs = f.C->keys_upto(N);
    for (int n = 1; n <= N; ++n) {
        auto pa = primitive_basis(f.A, n);
        auto basis = f.A->basis(n);
        KeyIndex idx;
        for (const auto& k : basis) idx.id(k);
        auto row_of = [&idx](const Element& x) {
            SparseRow row;
            for (const auto& [k, c] : x.terms()) row[static_cast<std::size_t>(idx.id(k))] = c;
            return row;
        };
        SparseEchelon prim(basis.size()), moved(basis.size());
        for (const auto& p : pa) prim.insert(row_of(p));
        for (int m = 1; m <= N; ++m)
            for (const auto& p : primitive_basis(f.B, m))
                for (const auto& c : cs) {
                    Element v = transfer_primitive(f, p, c);
                    Element part = homogeneous_component(v, n, f.A->graded_basis());
                    if (part.is_zero()) continue;
                    moved.insert(row_of(part));
                    if (!prim.contains(row_of(part)) && r.witnesses.size() < 8) {
                        r.ok = false;
                        r.witnesses.push_back(witness("primitive containment", {c}, p, part));
                    }
                }
        r.ranks.emplace_back(moved.rank(), prim.rank());
    }
    return r;
}

LinMap transferred_antipode(const PartialCovering& f, const LinearSection& iota, int N) {
    if (!f.B->flags.hopf) throw AntipodeUnavailable(f.B->name);
    if (iota.verified_degree < N) throw std::invalid_argument("section verified only through degree " +
                                                              std::to_string(iota.verified_degree));
    LinMap sb = antipode(f.B, N);
    return tabulate("S_transfer", f.A, f.A, N, [&](const BasisKey& a) {
        Element s;
        Element x = iota(a);
        for (const auto& [k, c] : x.terms()) s += c * f.apply(sb(k.left()), Element(k.right()));
        return s;
    });
}

AntipodeTransfer transfer_antipode(const PartialCovering& f, const LinearSection& iota, int N) {
    AntipodeTransfer r;
    r.antipode = transferred_antipode(f, iota, N);
    LinMap oracle = oracle_antipode(f.A, N, r.oracle);
    r.matches_oracle = true;
    for (const auto& [a, s] : r.antipode.table) {
        Element o = oracle(a);
        if (s != o) {
            r.matches_oracle = false;
            if (r.mismatches.size() < 8) r.mismatches.push_back(witness("antipode", {a}, s, o));
        }
    }
    return r;
}

// ---- symmetry checks ----

SwapReport swap_identity_check(const PartialCovering& f, int N) {
    SwapReport r;
    auto bs = f.B->keys_upto(N);
    auto cs = f.C->keys_upto(N);
    std::vector<Element> deltas;
    std::vector<bool> symmetric;
    for (const auto& c : cs) {
        deltas.push_back(f.C->coproduct(c));
        symmetric.push_back(swap_tensor(deltas.back()) == deltas.back());
    }
    for (const auto& b : bs)
        for (const auto& b2 : bs)
            for (std::size_t i = 0; i < cs.size(); ++i) {
                ++r.triples;
                if (symmetric[i]) {
                    ++r.symmetric;
                    continue;
                }
                Element lhs, rhs;
                for (const auto& [k, coef] : deltas[i].terms()) {
                    const BasisKey& c1 = k.left();
                    const BasisKey& c2 = k.right();
                    lhs += coef * tensor(f.value(b2, c2), f.value(b, c1));
                    rhs += coef * tensor(f.value(b2, c1), f.value(b, c2));
                }
                if (lhs != rhs && !r.witness) {
                    r.ok = false;
                    r.witness = witness("swap identity", {b, b2, cs[i]}, lhs, rhs);
                }
            }
    return r;
}

CocommutativityReport image_cocommutativity_check(const PartialCovering& f, int N) {
    CocommutativityReport r;
    r.b_hopf = f.B->flags.hopf;
    auto cs = f.C->keys_upto(N);
    for (const auto& b : f.B->keys_upto(N)) {
        if (!cocommutative_defect(*f.B, Element(b)).is_zero()) continue;
        for (const auto& c : cs) {
            ++r.checked;
            Element v = f.value(b, c);
            Element d = cocommutative_defect(*f.A, v);
            if (!d.is_zero() && r.violations.size() < 8)
                r.violations.push_back(witness("cocommutative image", {b, c}, v, d));
        }
    }
    return r;
}

// ---- characters ----

CharacterTransport character_transport(const PartialCovering& f, const std::function<Scalar(const BasisKey&)>& chi,
                                       int N) {
    auto on = [&chi](const Element& x) {
        Scalar s = 0;
        for (const auto& [k, c] : x.terms()) s += c * chi(k);
        return s;
    };
    auto as = f.A->keys_upto(N);
    if (on(f.A->unit) != 1)
        throw std::invalid_argument("character is not unital: chi(1) = " + to_string(on(f.A->unit)));
    for (const auto& a : as)
        for (const auto& a2 : as) {
            Element p;
            try {
                p = f.A->product(a, a2);
            } catch (const WindowOverflow&) {
                continue;
            }
            if (on(p) != chi(a) * chi(a2))
                throw std::invalid_argument("character is not multiplicative at (" + a.render() + ", " +
                                            a2.render() + "): " + to_string(on(p)) +
                                            " != " + to_string(chi(a) * chi(a2)));
        }

    CharacterTransport r;
    auto bs = f.B->keys_upto(N);
    auto cs = f.C->keys_upto(N);
    for (const auto& b : bs) {
        Element row;
        for (const auto& c : cs) row.add(c, on(f.value(b, c)));
        r.table.emplace(b, std::move(row));
    }
    auto pair = [&r](const BasisKey& b, const BasisKey& c) { return r.table.at(b).coeff(c); };
    for (const auto& b : bs)
        for (const auto& b2 : bs) {
            Element p;
            try {
                p = f.B->product(b, b2);
            } catch (const WindowOverflow&) {
                continue;
            }
            for (const auto& c : cs) {
                Scalar lhs = on(f.apply(p, Element(c)));
                Scalar rhs = 0;
                Element dc = f.C->coproduct(c);
                for (const auto& [k, coef] : dc.terms()) {
                    rhs += coef * pair(b, k.left()) * pair(b2, k.right());
                }
                if (lhs != rhs) {
                    r.multiplicative = false;
                    if (r.witnesses.size() < 8)
                        r.witnesses.push_back(
                            witness("transported character", {b, b2, c}, scalar_element(lhs), scalar_element(rhs)));
                }
            }
        }
    return r;
}

std::map<BasisKey, Element> convolve_characters(const PartialCovering& f, const std::map<BasisKey, Element>& x,
                                                const std::map<BasisKey, Element>& y) {
    std::map<BasisKey, Element> out;
    for (const auto& [b, unused] : x) {
        Element row;
        bool complete = true;
        Element db = f.B->coproduct(b);
        for (const auto& [k, coef] : db.terms())
            complete = complete && x.count(k.left()) && y.count(k.right());
        if (!complete) continue;
        std::vector<BasisKey> cs;
        for (const auto& [c, v] : x.at(b).terms()) cs.push_back(c);
        for (const auto& [c, v] : y.at(b).terms()) cs.push_back(c);
        for (const auto& c : f.C->keys_upto(f.C->flags.finite_type ? f.C->top_degree : 0)) cs.push_back(c);
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        for (const auto& c : cs) {
            Scalar s = 0;
            Element dc = f.C->coproduct(c);
            for (const auto& [kb, cb] : db.terms())
                for (const auto& [kc, cc] : dc.terms())
                    s += cb * cc * x.at(kb.left()).coeff(kc.left()) * y.at(kb.right()).coeff(kc.right());
            row.add(c, s);
        }
        out.emplace(b, std::move(row));
    }
    return out;
}

// ---- Galois maps ----

GaloisReport galois_check(const Bialg& a) {
    if (!a->flags.finite_type) throw std::invalid_argument("galois_check needs a finite-dimensional bialgebra, got " + a->name);
    GaloisReport r;
    auto keys = a->keys_upto(a->top_degree);
    std::size_t n = keys.size();
    r.dimension = n;
    KeyIndex idx;
    for (const auto& k : keys) idx.id(k);
    SparseEchelon e(n * n);
    for (const auto& x : keys)
        for (const auto& y : keys) {
            SparseRow row;
            Element dx = a->coproduct(x);
            for (const auto& [t, c] : dx.terms()) {
                Element p = a->product(t.right(), y);
                for (const auto& [z, d] : p.terms()) {
                    std::size_t col = static_cast<std::size_t>(idx.find(t.left())) * n +
                                      static_cast<std::size_t>(idx.find(z));
                    row[col] += c * d;
                }
            }
            std::erase_if(row, [](const auto& p) { return sgn(p.second) == 0; });
            if (!row.empty()) e.insert(std::move(row));
        }
    r.beta_rank = e.rank();
    r.bijective = r.beta_rank == n * n;
    r.hopf = antipode_solve(a, a->top_degree).has_value();
    r.consistent = r.bijective == r.hopf;
    if (r.hopf) r.gamma_surjective = gamma_surjectivity(identity_covering(a), a->top_degree).ok();
    return r;
}

GammaReport gamma_surjectivity(const PartialCovering& f, int N) {
    if (!f.B->flags.hopf) throw AntipodeUnavailable(f.B->name);
    if (!f.A->flags.finite_type) throw std::invalid_argument("gamma_surjectivity needs a finite-dimensional A, got " + f.A->name);
    LinMap s = antipode(f.B, N);
    auto as = f.A->keys_upto(f.A->top_degree);
    auto bs = f.B->keys_upto(N);
    auto cs = f.C->keys_upto(N);

    auto gamma = [&](const Element& x, bool use_s) {
        Element out;
        for (const auto& [k, coef] : x.terms()) {
            auto parts = k.factors();
            const BasisKey &b = parts[0], &c = parts[1], &a = parts[2];
            Element db = f.B->coproduct(b), dc = f.C->coproduct(c);
            for (const auto& [tb, cb] : db.terms())
                for (const auto& [tc, cc] : dc.terms()) {
                    Element v = use_s ? f.apply(s(tb.right()), Element(tc.right())) : f.value(tb.right(), tc.right());
                    if (v.is_zero()) continue;
                    Element va = f.A->multiply(v, Element(a));
                    for (const auto& [ka, ca] : va.terms())
                        out.add(BasisKey::tensor3(tb.left(), tc.left(), ka), coef * cb * cc * ca);
                }
        }
        return out;
    };

    GammaReport r;
    for (const auto& b : bs)
        for (const auto& c : cs)
            for (const auto& a : as) {
                ++r.triples;
                Element x(BasisKey::tensor3(b, c, a));
                Element back = gamma(gamma(x, true), false);
                if (back != x) {
                    r.right_inverse = false;
                    if (r.witnesses.size() < 8) r.witnesses.push_back(witness("gamma gamma' = id", {b, c, a}, back, x));
                }
                Element fbc = f.value(b, c);
                Element lhs;
                Element dfbc = f.A->coproduct_of(fbc);
                for (const auto& [t, coef] : dfbc.terms())
                    lhs += coef * tensor(Element(t.left()), f.A->multiply(Element(t.right()), Element(a)));
                Element rhs;
                Element gx = gamma(x, false);
                for (const auto& [k, coef] : gx.terms()) {
                    auto parts = k.factors();
                    Element v = f.value(parts[0], parts[1]);
                    if (!v.is_zero()) rhs += coef * tensor(v, Element(parts[2]));
                }
                if (lhs != rhs) {
                    r.intertwines = false;
                    if (r.witnesses.size() < 8) r.witnesses.push_back(witness("beta (f x id) = (f x id) gamma", {b, c, a}, lhs, rhs));
                }
            }
    return r;
}

// ---- points ----

PointInverse point_convolution_inverse(const PartialCovering& f, const BasisKey& z, int N) {
    if (!grouplike(*f.B, z)) throw std::invalid_argument(z.render() + " is not grouplike in " + f.B->name);
    std::optional<BasisKey> inv;
    for (const auto& w : f.B->keys_upto(N)) {
        try {
            if (f.B->product(z, w) == f.B->unit && f.B->product(w, z) == f.B->unit) {
                inv = w;
                break;
            }
        } catch (const WindowOverflow&) {
        }
    }
    if (!inv) throw std::invalid_argument(z.render() + " has no inverse key in " + f.B->name);

    PointInverse r{z, *inv, tabulate("phi", f.C, f.A, N, [&](const BasisKey& c) { return f.value(z, c); }),
                   tabulate("phibar", f.C, f.A, N, [&](const BasisKey& c) { return f.value(*inv, c); }), true, true,
                   {}};
    LinMap ue = unit_counit(f.C, f.A, N);
    LinMap l = convolution(r.phi, r.phibar), rr = convolution(r.phibar, r.phi);
    for (const auto& [c, v] : ue.table) {
        if (l(c) != v || rr(c) != v) {
            r.inverse_ok = false;
            r.witnesses.push_back(witness("convolution inverse", {c}, l(c), rr(c)));
        }
        for (const LinMap* m : {&r.phi, &r.phibar}) {
            Element lhs = f.A->coproduct_of((*m)(c));
            Element rhs = tensor_apply(f.C->coproduct(c), *m, *m);
            if (lhs != rhs || f.A->counit_of((*m)(c)) != f.C->counit(c)) {
                r.coalgebra_maps = false;
                r.witnesses.push_back(witness("coalgebra map " + m->name, {c}, lhs, rhs));
            }
        }
    }
    return r;
}

InvertibilityReport point_invertibility_check(const LinMap& phi, const LinMap& phibar) {
    Bialg a = phi.target;
    LinMap ue = unit_counit(phi.source, a, phi.bound);
    LinMap l = convolution(phi, phibar), r = convolution(phibar, phi);
    for (const auto& [c, v] : ue.table)
        if (l(c) != v || r(c) != v)
            throw std::invalid_argument("phi and phibar are not convolution inverse at " + c.render() + ": " +
                                        l(c).render() + ", " + r(c).render() + " != " + v.render());

    InvertibilityReport out;
    int n = 0;
    for (const auto& [c, v] : phi.table) {
        if (c.kind() != KeyKind::MatrixCell) throw std::invalid_argument("point_invertibility_check needs a matrix coalgebra");
        n = std::max(n, c.row());
    }
    for (int i = 1; i <= n; ++i) {
        BasisKey e = BasisKey::cell(i, i);
        Element x = a->multiply(phi(e), phibar(e)), y = a->multiply(phibar(e), phi(e));
        if (x != a->unit || y != a->unit) {
            out.ok = false;
            out.witnesses.push_back(witness("diagonal invertibility", {e}, x, y));
        }
    }
    out.upper_triangular = true;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) out.upper_triangular = out.upper_triangular && phi(BasisKey::cell(j, i)).is_zero();
    if (out.upper_triangular)
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                BasisKey e = BasisKey::cell(j, i);
                if (!phibar(e).is_zero()) {
                    out.ok = false;
                    out.witnesses.push_back(witness("lower vanishing", {e}, phibar(e), Element()));
                }
            }
    return out;
}

ConclusionReport pointed_cover_conclusion_check(const PartialCovering& f, int N) {
    ConclusionReport r;
    r.hypotheses = f.B->flags.hopf;
    r.antipode_found = antipode_solve(f.A, f.A->flags.finite_type ? f.A->top_degree : N).has_value();
    if (r.hypotheses)
        r.note = r.antipode_found ? "antipode of " + f.A->name + " found through degree " + std::to_string(N)
                                  : "antipode of " + f.A->name + " not found";
    else
        r.note = std::string("hypotheses not satisfied; ") +
                 (r.antipode_found ? f.A->name + " is Hopf nonetheless" : f.A->name + " indeed not Hopf");
    return r;
}

std::optional<Witness> grouplike_image_witness(const PartialCovering& f, int N) {
    auto cs = f.C->keys_upto(N);
    for (const auto& b : f.B->keys_upto(N)) {
        if (!grouplike(*f.B, b)) continue;
        for (const auto& c : cs) {
            Element v = f.value(b, c);
            for (const auto& [k, coef] : v.terms())
                if (!grouplike(*f.A, k)) return witness("grouplike image", {b, c}, v, Element(k));
        }
    }
    return std::nullopt;
}

}  // namespace meas
