#include "meas/hopf.hpp"

#include "meas/indexed.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace meas {

std::vector<BasisKey> CoalgebraHandle::keys_upto(int n) const {
    if (keys_within) return keys_within(n);
    std::vector<BasisKey> out;
    int top = flags.finite_type ? top_degree : n;
    for (int d = 0; d <= top; ++d) {
        auto b = basis(d);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

GradedBasis CoalgebraHandle::graded_basis() const { return GradedBasis{degree, basis, contains}; }

Element CoalgebraHandle::coproduct_of(const Element& x) const { return apply_linear(x, coproduct); }

Scalar CoalgebraHandle::counit_of(const Element& x) const {
    Scalar s = 0;
    for (const auto& [k, c] : x.terms()) s += c * counit(k);
    return s;
}

std::vector<std::pair<std::vector<BasisKey>, Scalar>> CoalgebraHandle::iterated_coproduct(const BasisKey& c,
                                                                                           int k) const {
    if (k < 1) throw std::invalid_argument("iterated coproduct needs at least one factor");
    if (k == 1) return {{{c}, Scalar(1)}};
    std::vector<std::pair<std::vector<BasisKey>, Scalar>> out;
    const Element expanded = coproduct(c);
    for (const auto& [t, coef] : expanded.terms()) {
        for (auto& [rest, c2] : iterated_coproduct(t.right(), k - 1)) {
            std::vector<BasisKey> seq;
            seq.reserve(rest.size() + 1);
            seq.push_back(t.left());
            seq.insert(seq.end(), rest.begin(), rest.end());
            out.emplace_back(std::move(seq), coef * c2);
        }
    }
    return out;
}

Element BialgebraHandle::multiply(const Element& x, const Element& y) const {
    Element out;
    for (const auto& [a, ca] : x.terms())
        for (const auto& [b, cb] : y.terms()) {
            Element p = product(a, b);
            Scalar c = ca * cb;
            for (const auto& [k, v] : p.terms()) out.add(k, c * v);
        }
    return out;
}

std::function<Element(const BasisKey&)> memoize(std::function<Element(const BasisKey&)> f) {
    struct Cache {
        std::mutex mu;
        std::map<BasisKey, Element> values;
    };
    auto cache = std::make_shared<Cache>();
    return [cache, f = std::move(f)](const BasisKey& k) -> Element {
        {
            std::lock_guard<std::mutex> lock(cache->mu);
            auto it = cache->values.find(k);
            if (it != cache->values.end()) return it->second;
        }
        Element v = f(k);
        std::lock_guard<std::mutex> lock(cache->mu);
        return cache->values.emplace(k, std::move(v)).first->second;
    };
}

// ---- LinMap ----

Element LinMap::operator()(const BasisKey& k) const {
    auto it = table.find(k);
    if (it == table.end()) throw std::out_of_range(name + ": key " + k.render() + " outside the tabulated range");
    return it->second;
}

Element LinMap::apply(const Element& x) const {
    return apply_linear(x, [this](const BasisKey& k) { return (*this)(k); });
}

LinMap tabulate(std::string name, Coalg source, Bialg target, int bound,
                const std::function<Element(const BasisKey&)>& f) {
    LinMap m{std::move(name), std::move(source), std::move(target), bound, {}};
    for (const auto& k : m.source->keys_upto(bound)) m.table.emplace(k, f(k));
    return m;
}

LinMap identity_map(const Bialg& h, int bound) {
    return tabulate("id", h, h, bound, [](const BasisKey& k) { return Element(k); });
}

LinMap unit_counit(const Coalg& source, const Bialg& target, int bound) {
    return tabulate("u.eps", source, target, bound,
                    [&](const BasisKey& k) { return source->counit(k) * target->unit; });
}

static void require_compatible(const LinMap& f, const LinMap& g) {
    if (f.source != g.source || f.target != g.target)
        throw std::invalid_argument("convolution of maps with different source or target: " + f.name + ", " + g.name);
}

LinMap convolution(const LinMap& f, const LinMap& g) {
    require_compatible(f, g);
    LinMap out{"(" + f.name + "*" + g.name + ")", f.source, f.target, std::min(f.bound, g.bound), {}};
    for (const auto& [c, unused] : f.table) {
        if (!g.table.count(c)) continue;
        Element acc;
        const Element expanded = f.source->coproduct(c);
        for (const auto& [t, coef] : expanded.terms()) {
            Element x = f(t.left());
            if (x.is_zero()) continue;
            Element y = g(t.right());
            if (y.is_zero()) continue;
            acc += coef * f.target->multiply(x, y);
        }
        out.table.emplace(c, std::move(acc));
    }
    return out;
}

LinMap convolution_power(const Bialg& h, int n, int bound) {
    if (n == 0) return unit_counit(h, h, bound);
    LinMap base = n > 0 ? identity_map(h, bound) : antipode(h, bound);
    LinMap acc = base;
    for (int i = 1; i < std::abs(n); ++i) acc = convolution(acc, base);
    acc.name = "id^*" + std::to_string(n);
    return acc;
}

namespace {

void require_graded_connected(const Bialg& h, const char* what) {
    if (!h->flags.graded || !h->flags.connected)
        throw std::invalid_argument(std::string(what) + " needs a graded connected handle, got " + h->name);
}

// pi^{*k} tables for k = 1..bound, pi = id - u.eps.
std::vector<std::map<BasisKey, Element>> pi_powers(const Bialg& h, int bound) {
    auto keys = h->keys_upto(bound);
    auto pi = [&](const BasisKey& k) {
        Element e(k);
        Scalar eps = h->counit(k);
        if (sgn(eps) != 0) e -= eps * h->unit;
        return e;
    };
    std::vector<std::map<BasisKey, Element>> powers(static_cast<std::size_t>(bound) + 1);
    for (const auto& k : keys) powers[1].emplace(k, pi(k));
    for (int j = 2; j <= bound; ++j) {
        auto& prev = powers[static_cast<std::size_t>(j - 1)];
        auto& cur = powers[static_cast<std::size_t>(j)];
        for (const auto& k : keys) {
            Element acc;
            if (h->degree(k) >= j) {
                const Element expanded = h->coproduct(k);
                for (const auto& [t, coef] : expanded.terms()) {
                    const Element& x = powers[1].at(t.left());
                    if (x.is_zero()) continue;
                    const Element& y = prev.at(t.right());
                    if (y.is_zero()) continue;
                    acc += coef * h->multiply(x, y);
                }
            }
            cur.emplace(k, std::move(acc));
        }
    }
    return powers;
}

}  // namespace

LinMap takeuchi_antipode(const Bialg& h, int bound) {
    require_graded_connected(h, "takeuchi_antipode");
    auto powers = pi_powers(h, bound);
    return tabulate("S_takeuchi", h, h, bound, [&](const BasisKey& k) {
        Element s = h->counit(k) * h->unit;
        for (int j = 1; j <= bound && j <= h->degree(k); ++j) {
            const Element& p = powers[static_cast<std::size_t>(j)].at(k);
            if (j % 2) s -= p; else s += p;
        }
        return s;
    });
}

LinMap eulerian_projection(const Bialg& h, int bound) {
    require_graded_connected(h, "eulerian_projection");
    auto powers = pi_powers(h, bound);
    return tabulate("e1", h, h, bound, [&](const BasisKey& k) {
        Element s;
        for (int j = 1; j <= bound && j <= h->degree(k); ++j) {
            Scalar c(j % 2 ? 1 : -1, j);
            c.canonicalize();
            s += c * powers[static_cast<std::size_t>(j)].at(k);
        }
        return s;
    });
}

LinMap compose_maps(const LinMap& outer, const LinMap& inner) {
    LinMap out{outer.name + "." + inner.name, inner.source, outer.target, inner.bound, {}};
    for (const auto& [k, v] : inner.table) out.table.emplace(k, outer.apply(v));
    return out;
}

// ---- antipode oracles ----

namespace {

std::optional<LinMap> solve_graded_connected(const Bialg& h, int bound) {
    LinMap S{"S_solve", h, h, bound, {}};
    for (int n = 0; n <= bound; ++n) {
        auto keys = h->basis(n);
        std::map<BasisKey, std::size_t> pos;
        for (std::size_t i = 0; i < keys.size(); ++i) pos.emplace(keys[i], i);
        // T[x][x1]: coefficient of x1 (x) 1 in Delta(x); rhs collects known terms.
        DenseMatrix T(keys.size(), keys.size());
        std::vector<Element> rhs(keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const BasisKey& x = keys[i];
            rhs[i] = h->counit(x) * h->unit;
            const Element expanded = h->coproduct(x);
            for (const auto& [t, coef] : expanded.terms()) {
                auto p = pos.find(t.left());
                if (p != pos.end() && h->degree(t.right()) == 0) {
                    Scalar unit_coef = h->unit.coeff(t.right());
                    if (sgn(unit_coef) == 0) return std::nullopt;
                    T.at(i, p->second) += coef / unit_coef;
                    continue;
                }
                if (h->degree(t.left()) >= n) return std::nullopt;
                rhs[i] -= coef * h->multiply(S(t.left()), Element(t.right()));
            }
        }
        std::set<BasisKey> outkeys;
        for (const auto& r : rhs)
            for (const auto& [k, c] : r.terms()) outkeys.insert(k);
        std::vector<Element> values(keys.size());
        for (const auto& y : outkeys) {
            Vec v(keys.size());
            for (std::size_t i = 0; i < keys.size(); ++i) v[i] = rhs[i].coeff(y);
            SolveResult sr = solve(T, v);
            if (!sr.ok()) return std::nullopt;
            for (std::size_t i = 0; i < keys.size(); ++i) values[i].add(y, sr.x[i]);
        }
        for (std::size_t i = 0; i < keys.size(); ++i) S.table.emplace(keys[i], values[i]);
    }
    return S;
}

std::optional<LinMap> solve_full(const Bialg& h, int bound) {
    auto keys = h->keys_upto(bound);
    std::size_t d = keys.size();
    // Unknown s[y][x] is the coefficient of y in S(x), column y*d + x.
    std::map<std::pair<BasisKey, std::size_t>, SparseRow> rows;
    std::vector<std::pair<BasisKey, std::size_t>> row_order;
    std::set<std::size_t> forced_zero;
    std::map<BasisKey, std::size_t> pos;
    for (std::size_t i = 0; i < d; ++i) pos.emplace(keys[i], i);
    std::map<std::pair<BasisKey, std::size_t>, Scalar> rhs;

    auto add = [&](std::size_t eq, const BasisKey& out, std::size_t col, const Scalar& c) {
        auto key = std::make_pair(out, eq);
        auto [it, ins] = rows.emplace(key, SparseRow{});
        if (ins) row_order.push_back(key);
        it->second[col] += c;
        if (sgn(it->second[col]) == 0) it->second.erase(col);
    };
    for (std::size_t xi = 0; xi < d; ++xi) {
        const BasisKey& x = keys[xi];
        const Element expanded = h->coproduct(x);
        for (const auto& [t, coef] : expanded.terms()) {
            auto p1 = pos.find(t.left());
            auto p2 = pos.find(t.right());
            if (p1 == pos.end() || p2 == pos.end()) return std::nullopt;
            for (std::size_t yi = 0; yi < d; ++yi) {
                // left equation: S(x1) x2
                try {
                    const Element prod = h->product(keys[yi], t.right());
                    for (const auto& [z, c] : prod.terms())
                        add(2 * xi, z, yi * d + p1->second, coef * c);
                } catch (const WindowOverflow&) {
                    forced_zero.insert(yi * d + p1->second);
                }
                // right equation: x1 S(x2)
                try {
                    const Element prod = h->product(t.left(), keys[yi]);
                    for (const auto& [z, c] : prod.terms())
                        add(2 * xi + 1, z, yi * d + p2->second, coef * c);
                } catch (const WindowOverflow&) {
                    forced_zero.insert(yi * d + p2->second);
                }
            }
        }
        Scalar eps = h->counit(x);
        for (const auto& [u, c] : h->unit.terms()) {
            for (std::size_t side = 0; side < 2; ++side) {
                auto key = std::make_pair(u, 2 * xi + side);
                if (!rows.count(key)) {
                    rows.emplace(key, SparseRow{});
                    row_order.push_back(key);
                }
                rhs[key] += eps * c;
            }
        }
    }
    std::size_t nvars = d * d;
    DenseMatrix M(row_order.size() + forced_zero.size(), nvars);
    Vec v(M.rows(), Scalar(0));
    std::size_t r = 0;
    for (const auto& key : row_order) {
        for (const auto& [col, c] : rows.at(key)) M.at(r, col) = c;
        auto it = rhs.find(key);
        if (it != rhs.end()) v[r] = it->second;
        ++r;
    }
    for (std::size_t col : forced_zero) M.at(r++, col) = 1;
    SolveResult sr = solve(M, v);
    if (!sr.ok()) return std::nullopt;
    LinMap S{"S_solve", h, h, bound, {}};
    for (std::size_t xi = 0; xi < d; ++xi) {
        Element e;
        for (std::size_t yi = 0; yi < d; ++yi) e.add(keys[yi], sr.x[yi * d + xi]);
        S.table.emplace(keys[xi], std::move(e));
    }
    return S;
}

}  // namespace

std::optional<LinMap> antipode_solve(const Bialg& h, int bound) {
    if (h->flags.graded && h->flags.connected) return solve_graded_connected(h, bound);
    return solve_full(h, bound);
}

LinMap antipode(const Bialg& h, int bound) {
    if (!h->flags.hopf) throw AntipodeUnavailable(h->name);
    if (h->antipode) return tabulate("S", h, h, bound, h->antipode);
    if (h->flags.graded && h->flags.connected) return takeuchi_antipode(h, bound);
    auto s = solve_full(h, bound);
    if (!s) throw AntipodeUnavailable(h->name);
    return *s;
}

std::vector<Element> primitive_basis(const Bialg& h, int n) {
    if (!h->flags.connected) throw std::invalid_argument("primitive_basis needs a connected handle, got " + h->name);
    if (n < 1) throw std::invalid_argument("primitive_basis: degree must be positive");
    auto keys = h->basis(n);
    KeyIndex rows;
    std::vector<SparseRow> by_row;
    for (std::size_t j = 0; j < keys.size(); ++j) {
        Element d = h->coproduct(keys[j]);
        d -= tensor(Element(keys[j]), h->unit);
        d -= tensor(h->unit, Element(keys[j]));
        for (const auto& [t, c] : d.terms()) {
            auto r = static_cast<std::size_t>(rows.id(t));
            if (r >= by_row.size()) by_row.resize(r + 1);
            by_row[r][j] = c;
        }
    }
    std::vector<Element> out;
    for (const auto& v : kernel_basis_sparse(by_row, keys.size())) {
        Element e;
        for (std::size_t j = 0; j < keys.size(); ++j) e.add(keys[j], v[j]);
        out.push_back(std::move(e));
    }
    return out;
}

Element cocommutative_defect(const CoalgebraHandle& h, const Element& x) {
    Element d = h.coproduct_of(x);
    return d - twist(d);
}

// ---- axiom verification ----

namespace {

Element acc3_element(const Acc& acc, const KeyIndex& idx) {
    Element e;
    for (const auto& [k, c] : acc) {
        int a = static_cast<int>(k >> 42);
        int b = static_cast<int>((k >> 21) & ((1u << 21) - 1));
        int c3 = static_cast<int>(k & ((1u << 21) - 1));
        e.add(BasisKey::tensor3(idx.key(a), idx.key(b), idx.key(c3)), c);
    }
    return e;
}

Element acc1_element(const Acc& acc, const KeyIndex& idx) {
    Element e;
    for (const auto& [k, c] : acc) e.add(idx.key(static_cast<int>(k)), c);
    return e;
}

Element acc2_element(const Acc& acc, const KeyIndex& idx) {
    Element e;
    for (const auto& [k, c] : acc)
        e.add(BasisKey::tensor(idx.key(static_cast<int>(k >> 32)), idx.key(static_cast<int>(k & 0xffffffffu))), c);
    return e;
}

constexpr std::size_t kMaxWitnesses = 8;

void fail(AxiomReport& r, std::string what, std::vector<BasisKey> in, Element lhs, Element rhs) {
    r.ok = false;
    if (r.failures.size() < kMaxWitnesses)
        r.failures.push_back({std::move(what), std::move(in), std::move(lhs), std::move(rhs)});
}

void check_coalgebra(const CoalgebraHandle& c, const std::vector<BasisKey>& keys, KeyIndex& idx,
                     IndexedCoalgebra& ic, AxiomReport& r) {
    for (const auto& k : keys) {
        if (c.contains && !c.contains(k)) {
            fail(r, "membership", {k}, Element(k), Element());
            continue;
        }
        int x = idx.id(k);
        const auto& dx = ic.delta(x);
        TermAcc lhs, rhs;
        Acc lc, rc;
        for (const auto& t : dx) {
            for (const auto& u : ic.delta(t.a)) lhs.addmul(pack3(u.a, u.b, t.b), t.c, u.c);
            for (const auto& u : ic.delta(t.b)) rhs.addmul(pack3(t.a, u.a, u.b), t.c, u.c);
            const Scalar& ea = ic.counit(t.a);
            if (sgn(ea) != 0) acc_add(lc, static_cast<std::uint64_t>(t.b), t.c * ea);
            const Scalar& eb = ic.counit(t.b);
            if (sgn(eb) != 0) acc_add(rc, static_cast<std::uint64_t>(t.a), t.c * eb);
        }
        lhs.normalize();
        rhs.normalize();
        acc_normalize(lc);
        acc_normalize(rc);
        if (!(lhs == rhs))
            fail(r, "coassociativity", {k}, acc3_element(lhs.to_acc(), idx), acc3_element(rhs.to_acc(), idx));
        Acc self{{static_cast<std::uint64_t>(x), Scalar(1)}};
        if (!acc_equal(lc, self)) fail(r, "left counit", {k}, acc1_element(lc, idx), Element(k));
        if (!acc_equal(rc, self)) fail(r, "right counit", {k}, acc1_element(rc, idx), Element(k));
    }
    r.keys += keys.size();
}

}  // namespace

AxiomReport verify_coalgebra(const CoalgebraHandle& c, int bound) {
    AxiomReport r;
    r.name = c.name;
    r.bound = bound;
    KeyIndex idx;
    IndexedCoalgebra ic(c, idx);
    check_coalgebra(c, c.keys_upto(bound), idx, ic, r);
    return r;
}

AxiomReport verify_bialgebra(const BialgebraHandle& h, int bound) {
    AxiomReport r;
    r.name = h.name;
    r.bound = bound;
    KeyIndex idx;
    IndexedCoalgebra ic(h, idx);
    IndexedAlgebra ia(h, idx);
    auto keys = h.keys_upto(bound);
    check_coalgebra(h, keys, idx, ic, r);

    std::vector<int> ids, wt;
    for (const auto& k : keys) {
        ids.push_back(idx.id(k));
        wt.push_back(h.flags.finite_type ? 0 : h.degree(k));
    }
    // Units.
    Element du = h.coproduct_of(h.unit);
    if (du != tensor(h.unit, h.unit)) fail(r, "coproduct of unit", {}, du, tensor(h.unit, h.unit));
    if (h.counit_of(h.unit) != 1) fail(r, "counit of unit", {}, Element(), Element());
    for (const auto& k : keys) {
        try {
            Element l = h.multiply(h.unit, Element(k));
            Element rr = h.multiply(Element(k), h.unit);
            if (l != Element(k)) fail(r, "left unit", {k}, l, Element(k));
            if (rr != Element(k)) fail(r, "right unit", {k}, rr, Element(k));
        } catch (const WindowOverflow&) {
            ++r.skipped_overflow;
        }
    }
    auto within = [&](int s) { return h.flags.finite_type || s <= bound; };
    // Pairs: multiplicativity of coproduct and counit.
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (!within(wt[i] + wt[j])) continue;
            const SVec* ab = ia.product(ids[i], ids[j]);
            if (!ab) {
                ++r.skipped_overflow;
                continue;
            }
            ++r.pairs;
            TermAcc lhs, rhs;
            Scalar eps_ab = 0;
            for (const auto& [p, c] : *ab) {
                eps_ab += c * ic.counit(p);
                for (const auto& t : ic.delta(p)) lhs.addmul(pack2(t.a, t.b), c, t.c);
            }
            bool skipped = false;
            for (const auto& s : ic.delta(ids[i])) {
                for (const auto& t : ic.delta(ids[j])) {
                    const SVec* l = ia.product(s.a, t.a);
                    const SVec* rr = ia.product(s.b, t.b);
                    if (!l || !rr) {
                        skipped = true;
                        continue;
                    }
                    Scalar c = s.c * t.c;
                    for (const auto& [p, cp] : *l)
                        for (const auto& [q, cq] : *rr) rhs.addmul(pack2(p, q), c, cp, cq);
                }
            }
            if (skipped) {
                ++r.skipped_overflow;
                continue;
            }
            lhs.normalize();
            rhs.normalize();
            if (!(lhs == rhs))
                fail(r, "coproduct multiplicative", {keys[i], keys[j]}, acc2_element(lhs.to_acc(), idx),
                     acc2_element(rhs.to_acc(), idx));
            Scalar eps_r = ic.counit(ids[i]) * ic.counit(ids[j]);
            if (eps_ab != eps_r)
                fail(r, "counit multiplicative", {keys[i], keys[j]}, Element(), Element());
        }
    }
    // Triples: associativity.
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (!within(wt[i] + wt[j])) continue;
            const SVec* ab = ia.product(ids[i], ids[j]);
            if (!ab) continue;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (!within(wt[i] + wt[j] + wt[k])) continue;
                const SVec* bc = ia.product(ids[j], ids[k]);
                if (!bc) {
                    ++r.skipped_overflow;
                    continue;
                }
                ++r.triples;
                std::map<int, Scalar> lhs, rhs;
                bool skipped = false;
                for (const auto& [p, c] : *ab) {
                    const SVec* q = ia.product(p, ids[k]);
                    if (!q) { skipped = true; break; }
                    for (const auto& [z, cz] : *q) lhs[z] += c * cz;
                }
                for (const auto& [p, c] : *bc) {
                    if (skipped) break;
                    const SVec* q = ia.product(ids[i], p);
                    if (!q) { skipped = true; break; }
                    for (const auto& [z, cz] : *q) rhs[z] += c * cz;
                }
                if (skipped) {
                    ++r.skipped_overflow;
                    continue;
                }
                std::erase_if(lhs, [](const auto& e) { return sgn(e.second) == 0; });
                std::erase_if(rhs, [](const auto& e) { return sgn(e.second) == 0; });
                if (lhs == rhs) continue;
                Element le, re;
                for (const auto& [z, c] : lhs) le.add(idx.key(z), c);
                for (const auto& [z, c] : rhs) re.add(idx.key(z), c);
                fail(r, "associativity", {keys[i], keys[j], keys[k]}, le, re);
            }
        }
    }
    return r;
}

// ---- derived coalgebras ----

Coalg tensor_coalgebra(const Coalg& c, const Coalg& d) {
    auto h = std::make_shared<CoalgebraHandle>();
    h->name = c->name + "(x)" + d->name;
    h->flags.graded = c->flags.graded && d->flags.graded;
    h->flags.connected = c->flags.connected && d->flags.connected;
    h->flags.cocommutative = c->flags.cocommutative && d->flags.cocommutative;
    h->flags.finite_type = c->flags.finite_type && d->flags.finite_type;
    h->top_degree = h->flags.finite_type ? c->top_degree + d->top_degree : -1;
    h->degree = [c, d](const BasisKey& k) { return c->degree(k.left()) + d->degree(k.right()); };
    h->contains = [c, d](const BasisKey& k) {
        return k.kind() == KeyKind::Tensor && (!c->contains || c->contains(k.left())) &&
               (!d->contains || d->contains(k.right()));
    };
    h->basis = [c, d](int n) {
        std::vector<BasisKey> out;
        for (int i = 0; i <= n; ++i) {
            if (c->flags.finite_type && i > c->top_degree) break;
            int j = n - i;
            if (d->flags.finite_type && j > d->top_degree) continue;
            for (const auto& a : c->basis(i))
                for (const auto& b : d->basis(j)) out.push_back(BasisKey::tensor(a, b));
        }
        return out;
    };
    h->coproduct = memoize([c, d](const BasisKey& k) {
        Element out;
        Element dc = c->coproduct(k.left());
        Element dd = d->coproduct(k.right());
        for (const auto& [s, cs] : dc.terms())
            for (const auto& [t, ct] : dd.terms())
                out.add(BasisKey::tensor(BasisKey::tensor(s.left(), t.left()), BasisKey::tensor(s.right(), t.right())),
                        cs * ct);
        return out;
    });
    h->counit = [c, d](const BasisKey& k) -> Scalar { return c->counit(k.left()) * d->counit(k.right()); };
    h->keys_within = [c, d](int n) {
        std::vector<BasisKey> out;
        auto right = d->keys_upto(n);
        for (const auto& a : c->keys_upto(n))
            for (const auto& b : right) out.push_back(BasisKey::tensor(a, b));
        return out;
    };
    return h;
}

Coalg diagonal_tensor(const Coalg& c, const Coalg& d) {
    if (!c->flags.graded || !d->flags.graded)
        throw std::invalid_argument("diagonal_tensor needs graded coalgebras");
    auto h = std::make_shared<CoalgebraHandle>();
    h->name = c->name + "(x)_d" + d->name;
    h->flags.graded = true;
    h->flags.connected = c->flags.connected && d->flags.connected;
    h->flags.cocommutative = c->flags.cocommutative && d->flags.cocommutative;
    h->degree = [c](const BasisKey& k) { return c->degree(k.left()); };
    h->contains = [c, d](const BasisKey& k) {
        return k.kind() == KeyKind::Tensor && c->degree(k.left()) == d->degree(k.right());
    };
    h->basis = [c, d](int n) {
        std::vector<BasisKey> out;
        for (const auto& a : c->basis(n))
            for (const auto& b : d->basis(n)) out.push_back(BasisKey::tensor(a, b));
        return out;
    };
    h->coproduct = memoize([c, d](const BasisKey& k) {
        Element out;
        Element dc = c->coproduct(k.left());
        Element dd = d->coproduct(k.right());
        for (const auto& [s, cs] : dc.terms())
            for (const auto& [t, ct] : dd.terms()) {
                if (c->degree(s.left()) != d->degree(t.left())) continue;
                if (c->degree(s.right()) != d->degree(t.right())) continue;
                out.add(BasisKey::tensor(BasisKey::tensor(s.left(), t.left()), BasisKey::tensor(s.right(), t.right())),
                        cs * ct);
            }
        return out;
    });
    h->counit = [c, d](const BasisKey& k) -> Scalar { return c->counit(k.left()) * d->counit(k.right()); };
    return h;
}

Coalg direct_sum_coalgebra(const Coalg& c, const Coalg& d) {
    auto h = std::make_shared<CoalgebraHandle>();
    h->name = c->name + "(+)" + d->name;
    h->flags.graded = c->flags.graded && d->flags.graded;
    h->flags.cocommutative = c->flags.cocommutative && d->flags.cocommutative;
    h->flags.finite_type = c->flags.finite_type && d->flags.finite_type;
    h->top_degree = h->flags.finite_type ? std::max(c->top_degree, d->top_degree) : -1;
    auto side = [c, d](const BasisKey& k) -> const Coalg& { return k.slot() == 1 ? c : d; };
    h->degree = [side](const BasisKey& k) { return side(k)->degree(k.inner()); };
    h->contains = [side](const BasisKey& k) {
        if (k.kind() != KeyKind::Summand || (k.slot() != 1 && k.slot() != 2)) return false;
        const Coalg& s = side(k);
        return !s->contains || s->contains(k.inner());
    };
    h->basis = [c, d](int n) {
        std::vector<BasisKey> out;
        if (!c->flags.finite_type || n <= c->top_degree)
            for (const auto& a : c->basis(n)) out.push_back(BasisKey::summand(1, a));
        if (!d->flags.finite_type || n <= d->top_degree)
            for (const auto& b : d->basis(n)) out.push_back(BasisKey::summand(2, b));
        return out;
    };
    h->coproduct = [side](const BasisKey& k) {
        Element out;
        const Element expanded = side(k)->coproduct(k.inner());
        for (const auto& [t, c] : expanded.terms())
            out.add(BasisKey::tensor(BasisKey::summand(k.slot(), t.left()), BasisKey::summand(k.slot(), t.right())), c);
        return out;
    };
    h->counit = [side](const BasisKey& k) { return side(k)->counit(k.inner()); };
    h->keys_within = [c, d](int n) {
        std::vector<BasisKey> out;
        for (const auto& a : c->keys_upto(n)) out.push_back(BasisKey::summand(1, a));
        for (const auto& b : d->keys_upto(n)) out.push_back(BasisKey::summand(2, b));
        return out;
    };
    return h;
}

Bialg with_corrupted_coproduct(const Bialg& h, const BasisKey& at, const Element& value) {
    auto copy = std::make_shared<BialgebraHandle>(*h);
    copy->name = h->name + "[corrupted]";
    auto orig = h->coproduct;
    copy->coproduct = [orig, at, value](const BasisKey& k) { return k == at ? value : orig(k); };
    return copy;
}

}  // namespace meas
