#include "meas/covering.hpp"

#include "meas/indexed.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace meas {

// ---- evaluation ----

Element PartialCovering::value(const BasisKey& b, const BasisKey& c) const {
    auto key = std::make_pair(b, c);
    {
        std::lock_guard<std::mutex> lock(*memo_mutex);
        auto it = memo->find(key);
        if (it != memo->end()) return it->second;
    }
    Element v;
    if (mode == CoveringMode::Table) {
        v = rule(b, c);
    } else if (B->unit == Element(b)) {
        v = C->counit(c) * A->unit;
    } else {
        v = extend_from_generators(*this, b, c);
    }
    if (v.is_zero()) return v;
    std::lock_guard<std::mutex> lock(*memo_mutex);
    return memo->emplace(std::move(key), std::move(v)).first->second;
}

Element PartialCovering::apply(const Element& b, const Element& c) const {
    Element out;
    for (const auto& [x, cx] : b.terms())
        for (const auto& [y, cy] : c.terms()) {
            Element v = value(x, y);
            if (!v.is_zero()) out += (cx * cy) * v;
        }
    return out;
}

Element extend_from_generators(const PartialCovering& cov, const BasisKey& b, const BasisKey& x) {
    const auto& B = *cov.B;
    if (!B.factor) throw std::invalid_argument(B.name + " declares no generators");
    auto gens = B.factor(b);
    if (!gens) throw std::invalid_argument(b.render() + " is not a product of declared generators of " + B.name);
    if (gens->empty()) return cov.C->counit(x) * cov.A->unit;
    if (gens->size() == 1) {
        if ((*gens)[0] != b) throw std::invalid_argument("generator factorization of " + b.render() + " is not a key");
        return cov.rule(b, x);
    }
    // b = (1/mu) g * rest, where rest is the basis key of the remaining generators.
    Element rest((*gens)[1]);
    for (std::size_t i = 2; i < gens->size(); ++i) rest = B.multiply(rest, Element((*gens)[i]));
    if (rest.size() != 1) throw std::invalid_argument("generator product for " + b.render() + " is not a basis key");
    const BasisKey rest_key = rest.terms().begin()->first;
    Element whole = B.product((*gens)[0], rest_key);
    Scalar mu = whole.coeff(b);
    if (whole.size() != 1 || sgn(mu) == 0)
        throw std::invalid_argument("generator factorization does not reproduce " + b.render());
    Element out;
    const Element dx = cov.C->coproduct(x);
    for (const auto& [t, coef] : dx.terms()) {
        Element l = cov.value((*gens)[0], t.left());
        if (l.is_zero()) continue;
        Element r = cov.value(rest_key, t.right());
        if (r.is_zero()) continue;
        out += coef * cov.A->multiply(l, r);
    }
    if (mu != 1) out *= Scalar(1) / mu;
    return out;
}

ValueTable tabulate_values(const PartialCovering& c, int N) {
    ValueTable t;
    t.b_keys = c.B->keys_upto(N);
    t.c_keys = c.C->keys_upto(N);
    t.rows.resize(t.b_keys.size());
    for (std::size_t i = 0; i < t.b_keys.size(); ++i)
        for (std::size_t j = 0; j < t.c_keys.size(); ++j) {
            Element v = c.value(t.b_keys[i], t.c_keys[j]);
            if (!v.is_zero()) t.rows[i].emplace_back(j, std::move(v));
        }
    return t;
}

// ---- verification ----

namespace {

constexpr std::size_t kMaxWitnesses = 8;

void push_witness(std::vector<Witness>& w, Witness x) {
    if (w.size() < kMaxWitnesses) w.push_back(std::move(x));
}

// Splits an accumulator keyed by pack3(c, a1, a2) into per-c tensor elements.
std::map<int, Element> split3(const Acc& acc, const KeyIndex& aidx) {
    std::map<int, Element> out;
    for (const auto& [k, v] : acc) {
        int c = static_cast<int>(k >> 42);
        int a1 = static_cast<int>((k >> 21) & 0x1fffff);
        int a2 = static_cast<int>(k & 0x1fffff);
        out[c].add(BasisKey::tensor(aidx.key(a1), aidx.key(a2)), v);
    }
    return out;
}

std::map<int, Element> split2(const Acc& acc, const KeyIndex& aidx) {
    std::map<int, Element> out;
    for (const auto& [k, v] : acc) out[static_cast<int>(k >> 32)].add(aidx.key(static_cast<int>(k & 0xffffffffu)), v);
    return out;
}

struct SurjectivityResult {
    std::vector<DegreeRank> ranks;
    int first_bad = -1;
    std::optional<BasisKey> witness;
};

SparseRow sparse(const SVec& v) {
    SparseRow r;
    for (const auto& [i, c] : v) r[static_cast<std::size_t>(i)] += c;
    for (auto it = r.begin(); it != r.end();) {
        if (sgn(it->second) == 0) it = r.erase(it); else ++it;
    }
    return r;
}

SurjectivityResult surjectivity(const BialgebraHandle& A, const std::vector<SVec>& values, KeyIndex& aidx, int N) {
    SurjectivityResult out;
    int top = A.flags.finite_type ? std::min(N, A.top_degree) : N;
    std::vector<std::vector<int>> by_degree(static_cast<std::size_t>(top) + 1);
    for (int n = 0; n <= top; ++n)
        for (const auto& k : A.basis(n)) by_degree[static_cast<std::size_t>(n)].push_back(aidx.id(k));
    std::size_t cols = aidx.size() + 1;
    for (const auto& v : values)
        for (const auto& [i, c] : v) cols = std::max(cols, static_cast<std::size_t>(i) + 1);

    bool homogeneous = A.flags.graded;
    std::vector<SparseEchelon> per_degree(static_cast<std::size_t>(top) + 1, SparseEchelon(cols));
    SparseEchelon all(cols);
    for (const auto& v : values) {
        SparseRow r = sparse(v);
        if (r.empty()) continue;
        int d = -1;
        bool homog = true;
        for (const auto& [i, c] : r) {
            int di = A.degree(aidx.key(static_cast<int>(i)));
            if (d < 0) d = di;
            else if (d != di) homog = false;
        }
        if (!homog) homogeneous = false;
        if (homogeneous && d <= top) per_degree[static_cast<std::size_t>(d)].insert(r);
        all.insert(std::move(r));
    }
    for (int n = 0; n <= top; ++n) {
        const auto& keys = by_degree[static_cast<std::size_t>(n)];
        DegreeRank dr{n, 0, keys.size()};
        std::optional<BasisKey> missing;
        if (homogeneous) {
            const auto& e = per_degree[static_cast<std::size_t>(n)];
            dr.achieved = e.rank();
            for (int k : keys)
                if (!e.contains({{static_cast<std::size_t>(k), Scalar(1)}})) {
                    missing = aidx.key(k);
                    break;
                }
        } else {
            SparseEchelon sum = all;
            for (int k : keys) sum.insert({{static_cast<std::size_t>(k), Scalar(1)}});
            dr.achieved = all.rank() + keys.size() - sum.rank();
            for (int k : keys)
                if (!all.contains({{static_cast<std::size_t>(k), Scalar(1)}})) {
                    missing = aidx.key(k);
                    break;
                }
        }
        if (dr.achieved < dr.dimension && out.first_bad < 0) {
            out.first_bad = n;
            out.witness = missing;
        }
        out.ranks.push_back(dr);
    }
    return out;
}

using Row = std::vector<std::pair<int, SVec>>;
using CopInv = std::unordered_map<std::uint64_t, std::vector<std::pair<int, Scalar>>>;

// Shared id-space view of a covering within a degree bound.
struct Context {
    const PartialCovering& cov;
    KeyIndex bidx, cidx, aidx;
    std::vector<int> b_ids;
    int n_c_init = 0;
    int n_c = 0;
    IndexedCoalgebra bc{*cov.B, bidx};
    IndexedCoalgebra cc{*cov.C, cidx};
    IndexedCoalgebra ac{*cov.A, aidx};
    IndexedAlgebra ba{*cov.B, bidx};
    IndexedAlgebra aa{*cov.A, aidx};
    // Inverse coproduct of C on the checked keys: (c1, c2) -> [(c, coef)].
    CopInv cop_inv;
    std::unordered_map<int, Row> rows;

    Context(const PartialCovering& f, int N) : cov(f) {
        for (const auto& k : cov.B->keys_upto(N)) b_ids.push_back(bidx.id(k));
        for (const auto& k : cov.C->keys_upto(N)) cidx.id(k);
        n_c_init = static_cast<int>(cidx.size());
        // Close under one coproduct step so that every tensor factor has a row entry.
        for (int c = 0; c < n_c_init; ++c)
            for (const auto& t : cc.delta(c)) cop_inv[pack2(t.a, t.b)].emplace_back(c, t.c);
        n_c = static_cast<int>(cidx.size());
    }

    const Row& row(int b) {
        auto it = rows.find(b);
        if (it != rows.end()) return it->second;
        Row r = cov.mode == CoveringMode::Decree && n_c == n_c_init ? extend(b) : by_value(b);
        return rows.emplace(b, std::move(r)).first->second;
    }

private:
    Row by_value(int b) {
        Row r;
        const BasisKey& bk = bidx.key(b);
        for (int c = 0; c < n_c; ++c) {
            Element v = cov.value(bk, cidx.key(c));
            if (!v.is_zero()) r.emplace_back(c, svec_from_element(v, aidx));
        }
        return r;
    }

    Row unit_row() {
        Row r;
        SVec u = svec_from_element(cov.A->unit, aidx);
        for (int c = 0; c < n_c; ++c) {
            const Scalar& e = cc.counit(c);
            if (sgn(e) == 0) continue;
            SVec v = u;
            for (auto& [a, x] : v) x *= e;
            r.emplace_back(c, std::move(v));
        }
        return r;
    }

    // The decree extension of extend_from_generators, evaluated on ids.
    Row extend(int b) {
        const BasisKey bk = bidx.key(b);
        if (cov.B->unit == Element(bk)) return unit_row();
        if (!cov.B->factor) throw std::invalid_argument(cov.B->name + " declares no generators");
        auto gens = cov.B->factor(bk);
        if (!gens)
            throw std::invalid_argument(bk.render() + " is not a product of declared generators of " + cov.B->name);
        if (gens->empty()) return unit_row();
        if (gens->size() == 1) return by_value(b);
        int rest = bidx.id(gens->back());
        for (std::size_t i = gens->size() - 1; i-- > 1;) {
            const SVec* p = ba.product(bidx.id((*gens)[i]), rest);
            if (!p || p->size() != 1) return by_value(b);
            rest = p->front().first;
        }
        int g = bidx.id((*gens)[0]);
        const SVec* whole = ba.product(g, rest);
        if (!whole || whole->size() != 1 || whole->front().first != b) return by_value(b);
        const Scalar inv = Scalar(1) / whole->front().second;
        const Row rg = row(g);
        const Row rr = row(rest);
        std::map<int, std::map<int, Scalar>> acc;
        for (const auto& [c1, v1] : rg)
            for (const auto& [c2, v2] : rr) {
                auto it = cop_inv.find(pack2(c1, c2));
                if (it == cop_inv.end()) continue;
                for (const auto& [x, cx] : v1)
                    for (const auto& [y, cy] : v2) {
                        const SVec* xy = aa.product(x, y);
                        if (!xy) return by_value(b);
                        Scalar k = cx * cy * inv;
                        for (const auto& [c, coef] : it->second) {
                            auto& slot = acc[c];
                            for (const auto& [z, cz] : *xy) slot[z] += k * coef * cz;
                        }
                    }
            }
        Row r;
        for (auto& [c, m] : acc) {
            SVec v;
            for (auto& [z, x] : m)
                if (sgn(x) != 0) v.emplace_back(z, std::move(x));
            if (!v.empty()) r.emplace_back(c, std::move(v));
        }
        return r;
    }
};

}  // namespace

VerificationReport verify_covering(const PartialCovering& cov, int N) {
    VerificationReport rep;
    rep.covering = cov.name;
    rep.checked_degree = N;
    Context s(cov, N);
    auto& bc = s.bc;
    auto& cc = s.cc;
    auto& ac = s.ac;
    auto& ba = s.ba;
    auto& aa = s.aa;
    auto& cop_inv = s.cop_inv;

    // Unit measuring: f(1, c) = eps(c) 1.
    {
        Acc lhs, rhs;
        for (const auto& [u, lu] : cov.B->unit.terms())
            for (const auto& [c, v] : s.row(s.bidx.id(u)))
                if (c < s.n_c_init)
                    for (const auto& [a, ca] : v) acc_add(lhs, pack2(c, a), lu * ca);
        for (int c = 0; c < s.n_c_init; ++c) {
            Scalar e = cc.counit(c);
            if (sgn(e) == 0) continue;
            for (const auto& [a, ca] : cov.A->unit.terms()) acc_add(rhs, pack2(c, s.aidx.id(a)), e * ca);
        }
        acc_normalize(lhs);
        acc_normalize(rhs);
        if (!acc_equal(lhs, rhs)) {
            rep.measuring_ok = false;
            auto l = split2(lhs, s.aidx), r = split2(rhs, s.aidx);
            for (int c = 0; c < s.n_c_init; ++c)
                if (l[c] != r[c]) push_witness(rep.measuring_witnesses, {"unit measuring", {s.cidx.key(c)}, l[c], r[c]});
        }
    }

    // Measuring on pairs.
    std::vector<int> weight;
    for (int b : s.b_ids) weight.push_back(cov.B->flags.finite_type ? 0 : cov.B->degree(s.bidx.key(b)));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < s.b_ids.size(); ++i)
        for (std::size_t j = 0; j < s.b_ids.size(); ++j)
            if (cov.B->flags.finite_type || weight[i] + weight[j] <= N) pairs.emplace_back(i, j);
    if (pairs.size() > kExhaustiveMeasuringPairs) {
        rep.measuring_exhaustive = false;
        std::vector<std::pair<std::size_t, std::size_t>> chosen;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        if (cov.B->is_generator)
            for (const auto& p : pairs)
                if (cov.B->is_generator(s.bidx.key(s.b_ids[p.first])) &&
                    cov.B->is_generator(s.bidx.key(s.b_ids[p.second])) && seen.insert(p).second)
                    chosen.push_back(p);
        std::mt19937 rng(20240611);
        std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
        while (chosen.size() < kExhaustiveMeasuringPairs) {
            const auto& p = pairs[pick(rng)];
            if (seen.insert(p).second) chosen.push_back(p);
        }
        pairs = std::move(chosen);
    }
    for (const auto& [i, j] : pairs) {
        int b1 = s.b_ids[i], b2 = s.b_ids[j];
        const SVec* prod = ba.product(b1, b2);
        if (!prod) {
            ++rep.skipped_overflow;
            continue;
        }
        TermAcc lhs, rhs;
        for (const auto& [p, lp] : *prod)
            for (const auto& [c, v] : s.row(p))
                if (c < s.n_c_init)
                    for (const auto& [a, ca] : v) lhs.addmul(pack2(c, a), lp, ca);
        const Row& r1 = s.row(b1);
        const Row& r2 = s.row(b2);
        bool overflow = false;
        for (const auto& [c1, v1] : r1)
            for (const auto& [c2, v2] : r2) {
                auto it = cop_inv.find(pack2(c1, c2));
                if (it == cop_inv.end()) continue;
                for (const auto& [x, cx] : v1)
                    for (const auto& [y, cy] : v2) {
                        const SVec* xy = aa.product(x, y);
                        if (!xy) {
                            overflow = true;
                            continue;
                        }
                        Scalar k = cx * cy;
                        for (const auto& [c, coef] : it->second) {
                            Scalar kc = k * coef;
                            for (const auto& [z, cz] : *xy) rhs.addmul(pack2(c, z), kc, cz);
                        }
                    }
            }
        if (overflow) {
            ++rep.skipped_overflow;
            continue;
        }
        ++rep.measuring_pairs;
        lhs.normalize();
        rhs.normalize();
        if (!(lhs == rhs)) {
            rep.measuring_ok = false;
            auto l = split2(lhs.to_acc(), s.aidx), r = split2(rhs.to_acc(), s.aidx);
            std::set<int> cs;
            for (const auto& [c, e] : l) cs.insert(c);
            for (const auto& [c, e] : r) cs.insert(c);
            for (int c : cs)
                if (l[c] != r[c])
                    push_witness(rep.measuring_witnesses,
                                 {"measuring", {s.bidx.key(b1), s.bidx.key(b2), s.cidx.key(c)}, l[c], r[c]});
        }
    }

    // Coalgebra map: Delta_A f = (f (x) f) Delta_{B (x) C}, and eps_A f = eps_B (x) eps_C.
    std::vector<SVec> values;
    for (int b : s.b_ids) {
        const Row& rb = s.row(b);
        TermAcc lhs, rhs;
        for (const auto& [c, v] : rb) {
            if (c >= s.n_c_init) continue;
            ++rep.value_pairs;
            values.push_back(v);
            for (const auto& [a, ca] : v)
                for (const auto& t : ac.delta(a)) lhs.addmul(pack3(c, t.a, t.b), ca, t.c);
        }
        for (const auto& t : bc.delta_uncached(b)) {
            const Row& ra = s.row(t.a);
            if (ra.empty()) continue;
            const Row& rc = s.row(t.b);
            for (const auto& [c1, v1] : ra)
                for (const auto& [c2, v2] : rc) {
                    auto it = cop_inv.find(pack2(c1, c2));
                    if (it == cop_inv.end()) continue;
                    for (const auto& [c, coef] : it->second) {
                        Scalar k = t.c * coef;
                        for (const auto& [x, cx] : v1) {
                            Scalar kx = k * cx;
                            for (const auto& [y, cy] : v2) rhs.addmul(pack3(c, x, y), kx, cy);
                        }
                    }
                }
        }
        lhs.normalize();
        rhs.normalize();
        if (!(lhs == rhs)) {
            rep.coalgebra_map_ok = false;
            auto l = split3(lhs.to_acc(), s.aidx), r = split3(rhs.to_acc(), s.aidx);
            std::set<int> cs;
            for (const auto& [c, e] : l) cs.insert(c);
            for (const auto& [c, e] : r) cs.insert(c);
            for (int c : cs)
                if (l[c] != r[c])
                    push_witness(rep.coalgebra_witnesses,
                                 {"comultiplicative", {s.bidx.key(b), s.cidx.key(c)}, l[c], r[c]});
        }
        // Counit.
        const Scalar& eb = bc.counit(b);
        std::map<int, Scalar> eps;
        for (const auto& [c, v] : rb) {
            if (c >= s.n_c_init) continue;
            Scalar e = 0;
            for (const auto& [a, ca] : v) e += ca * ac.counit(a);
            eps[c] = e;
        }
        for (int c = 0; c < s.n_c_init; ++c) {
            Scalar want = sgn(eb) == 0 ? Scalar(0) : Scalar(eb * cc.counit(c));
            auto it = eps.find(c);
            Scalar got = it == eps.end() ? Scalar(0) : it->second;
            if (got != want) {
                rep.coalgebra_map_ok = false;
                push_witness(rep.coalgebra_witnesses, {"counit", {s.bidx.key(b), s.cidx.key(c)},
                                                       Element(BasisKey::point("eps"), got),
                                                       Element(BasisKey::point("eps"), want)});
            }
        }
    }

    auto surj = surjectivity(*cov.A, values, s.aidx, N);
    rep.ranks = surj.ranks;
    rep.first_nonsurjective_degree = surj.first_bad;
    rep.surjectivity_witness = surj.witness;
    rep.surjective_ok = surj.first_bad < 0;
    return rep;
}

std::vector<DegreeRank> image_ranks(const PartialCovering& cov, int N) {
    Context s(cov, N);
    std::vector<SVec> values;
    for (int b : s.b_ids)
        for (const auto& [c, v] : s.row(b))
            if (c < s.n_c_init) values.push_back(v);
    return surjectivity(*cov.A, values, s.aidx, N).ranks;
}

// ---- grading ----

std::string to_string(GradingStatus s) {
    switch (s) {
        case GradingStatus::Certified: return "certified";
        case GradingStatus::TrueUpToN: return "true up to N";
        case GradingStatus::False: return "false";
        case GradingStatus::NotApplicable: return "n/a";
    }
    return "?";
}

GradingReport grading_report(const PartialCovering& cov, int N) {
    GradingReport r;
    if (!cov.A->flags.graded || !cov.B->flags.graded) {
        r.notes.push_back("A or B is not graded");
        return r;
    }
    auto t = tabulate_values(cov, N);
    bool c_graded = cov.C->flags.graded || (cov.C->flags.finite_type && cov.C->top_degree == 0);
    r.graded = GradingStatus::TrueUpToN;
    r.bigraded = c_graded ? GradingStatus::TrueUpToN : GradingStatus::NotApplicable;
    if (!c_graded) r.notes.push_back("C is not graded; bigraded check skipped");
    else if (!cov.C->flags.graded) r.notes.push_back("C is concentrated in degree 0; bigraded uses the strict reading");
    for (std::size_t i = 0; i < t.b_keys.size(); ++i) {
        const BasisKey& b = t.b_keys[i];
        int db = cov.B->degree(b);
        for (const auto& [j, v] : t.rows[i]) {
            const BasisKey& c = t.c_keys[j];
            Element wrong;
            for (const auto& [a, ca] : v.terms())
                if (cov.A->degree(a) != db) wrong.add(a, ca);
            if (!wrong.is_zero() && r.graded != GradingStatus::False) {
                r.graded = GradingStatus::False;
                r.graded_witness = Witness{"graded", {b, c}, v, v - wrong};
            }
            if (c_graded && cov.C->degree(c) != db && r.bigraded != GradingStatus::False) {
                r.bigraded = GradingStatus::False;
                r.bigraded_witness = Witness{"bigraded", {b, c}, v, Element()};
            }
        }
    }
    if (r.graded == GradingStatus::False && r.bigraded == GradingStatus::TrueUpToN) r.bigraded = GradingStatus::False;
    if (!cov.locally_finite_reason.empty()) {
        r.locally_finite = GradingStatus::Certified;
        r.notes.push_back("locally finite: " + cov.locally_finite_reason);
        return r;
    }
    r.locally_finite = GradingStatus::TrueUpToN;
    for (std::size_t i = 0; i < t.b_keys.size(); ++i) {
        if (cov.B->degree(t.b_keys[i]) != N) continue;
        for (const auto& [j, v] : t.rows[i]) {
            const BasisKey& c = t.c_keys[j];
            if (cov.C->degree(c) < N) {
                r.locally_finite = GradingStatus::False;
                r.locally_finite_witness = Witness{"locally finite", {t.b_keys[i], c}, v, Element()};
                r.notes.push_back("a key of C below degree N still meets B at the top checked degree");
                return r;
            }
        }
    }
    return r;
}

}  // namespace meas
