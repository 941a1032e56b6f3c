#include "meas/instances.hpp"

#include <json.hpp>

#include <algorithm>
#include <mutex>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace meas {

using json = nlohmann::json;

// ---- monoid tables ----

const std::string& MonoidTable::mul(const std::string& x, const std::string& y) const {
    auto it = table.find({x, y});
    if (it == table.end()) throw std::invalid_argument(name + ": no table entry for " + x + "*" + y);
    return it->second;
}

void MonoidTable::validate() const {
    if (elements.empty()) throw std::invalid_argument(name + ": no elements");
    std::set<std::string> seen;
    for (const auto& e : elements)
        if (!seen.insert(e).second) throw std::invalid_argument(name + ": duplicate element '" + e + "'");
    if (!seen.count(identity)) throw std::invalid_argument(name + ": identity '" + identity + "' is not an element");
    for (const auto& x : elements)
        for (const auto& y : elements) {
            auto it = table.find({x, y});
            if (it == table.end()) throw std::invalid_argument(name + ": table[" + x + "][" + y + "] missing");
            if (!seen.count(it->second))
                throw std::invalid_argument(name + ": table[" + x + "][" + y + "] = '" + it->second +
                                            "' is not an element");
        }
    for (const auto& x : elements) {
        if (mul(identity, x) != x || mul(x, identity) != x)
            throw std::invalid_argument(name + ": identity law fails at '" + x + "'");
        for (const auto& y : elements)
            for (const auto& z : elements)
                if (mul(mul(x, y), z) != mul(x, mul(y, z)))
                    throw std::invalid_argument(name + ": associativity fails at (" + x + "," + y + "," + z + ")");
    }
}

std::string MonoidTable::inverse(const std::string& x) const {
    for (const auto& y : elements)
        if (mul(x, y) == identity && mul(y, x) == identity) return y;
    return {};
}

bool MonoidTable::is_group() const {
    for (const auto& x : elements)
        if (inverse(x).empty()) return false;
    return true;
}

bool MonoidTable::is_commutative() const {
    for (const auto& x : elements)
        for (const auto& y : elements)
            if (mul(x, y) != mul(y, x)) return false;
    return true;
}

MonoidTable load_monoid_table(const std::string& json_text, const std::string& source) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }
    auto where = [&](const std::string& field) { return source + ": field '" + field + "'"; };
    MonoidTable t;
    t.name = j.value("name", source);
    if (!j.contains("elements") || !j["elements"].is_array()) throw std::invalid_argument(where("elements") + " must be an array");
    for (const auto& e : j["elements"]) {
        if (!e.is_string()) throw std::invalid_argument(where("elements") + " entries must be strings");
        t.elements.push_back(e.get<std::string>());
    }
    if (!j.contains("identity") || !j["identity"].is_string()) throw std::invalid_argument(where("identity") + " must be a string");
    t.identity = j["identity"].get<std::string>();
    if (!j.contains("table") || !j["table"].is_object()) throw std::invalid_argument(where("table") + " must be an object");
    for (const auto& [x, row] : j["table"].items()) {
        if (!row.is_object()) throw std::invalid_argument(where("table." + x) + " must be an object");
        for (const auto& [y, v] : row.items()) {
            if (!v.is_string()) throw std::invalid_argument(where("table." + x + "." + y) + " must be a string");
            t.table[{x, y}] = v.get<std::string>();
        }
    }
    t.validate();
    return t;
}

MonoidTable load_monoid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open monoid table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_monoid_table(ss.str(), path);
}

std::string monoid_table_json(const MonoidTable& t) {
    json j;
    j["name"] = t.name;
    j["elements"] = t.elements;
    j["identity"] = t.identity;
    json tab = json::object();
    for (const auto& x : t.elements)
        for (const auto& y : t.elements) tab[x][y] = t.mul(x, y);
    j["table"] = tab;
    return j.dump(2);
}

MonoidTable cyclic_group(int n) {
    if (n < 1) throw std::invalid_argument("cyclic group order must be positive");
    MonoidTable t;
    t.name = "Z/" + std::to_string(n);
    auto nm = [](int i) { return i == 0 ? std::string("e") : "r" + std::to_string(i); };
    for (int i = 0; i < n; ++i) t.elements.push_back(nm(i));
    t.identity = "e";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.table[{nm(i), nm(j)}] = nm((i + j) % n);
    t.validate();
    return t;
}

MonoidTable symmetric_group_s3() {
    MonoidTable t;
    t.name = "S3";
    // Permutations of {0,1,2} as images; composition (xy)(i) = x(y(i)).
    std::vector<std::pair<std::string, std::vector<int>>> perms = {
        {"e", {0, 1, 2}},   {"s1", {1, 0, 2}}, {"s2", {0, 2, 1}},
        {"r1", {1, 2, 0}},  {"r2", {2, 0, 1}}, {"t", {2, 1, 0}}};
    for (const auto& p : perms) t.elements.push_back(p.first);
    t.identity = "e";
    for (const auto& [xn, x] : perms)
        for (const auto& [yn, y] : perms) {
            std::vector<int> z = {x[static_cast<std::size_t>(y[0])], x[static_cast<std::size_t>(y[1])],
                                  x[static_cast<std::size_t>(y[2])]};
            for (const auto& [zn, zp] : perms)
                if (zp == z) t.table[{xn, yn}] = zn;
        }
    t.validate();
    return t;
}

MonoidTable right_zero_monoid() {
    MonoidTable t;
    t.name = "M";
    t.elements = {"e", "a", "b"};
    t.identity = "e";
    for (const auto& x : t.elements)
        for (const auto& y : t.elements) t.table[{x, y}] = (x == "e") ? y : (y == "e" ? x : y);
    t.validate();
    return t;
}

// ---- helpers ----

namespace {

Scalar binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Scalar(r);
}

std::vector<BasisKey> sorted(std::vector<BasisKey> v) {
    std::sort(v.begin(), v.end());
    return v;
}

int sum(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

// Multiplies two elements of a tensor square of a free-monoid-like basis, given
// the product of left factors and right factors as keys.
template <class Mul>
Element tensor_square_product(const Element& x, const Element& y, Mul mul) {
    Element out;
    for (const auto& [s, cs] : x.terms())
        for (const auto& [t, ct] : y.terms()) {
            Element l = mul(s.left(), t.left());
            Element r = mul(s.right(), t.right());
            Scalar c = cs * ct;
            for (const auto& [a, ca] : l.terms())
                for (const auto& [b, cb] : r.terms()) out.add(BasisKey::tensor(a, b), c * ca * cb);
        }
    return out;
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

// ---- Sym ----

Bialg build_sym() {
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "Sym";
    h->flags = {true, true, true, true, true, false};
    h->degree = [](const BasisKey& k) { return sum(k.parts()); };
    h->contains = [](const BasisKey& k) { return k.kind() == KeyKind::Partition; };
    h->basis = [](int n) {
        std::vector<BasisKey> out;
        for (auto& p : partitions_of(n)) out.push_back(BasisKey::partition(p));
        return sorted(out);
    };
    h->product = [](const BasisKey& a, const BasisKey& b) {
        return Element(BasisKey::partition(concat(a.parts(), b.parts())));
    };
    h->coproduct = memoize([](const BasisKey& k) {
        std::map<int, int> mult;
        for (int p : k.parts()) ++mult[p];
        Element acc(BasisKey::tensor(BasisKey::partition({}), BasisKey::partition({})));
        for (const auto& [part, m] : mult) {
            Element next;
            for (const auto& [t, c] : acc.terms())
                for (int i = 0; i <= m; ++i) {
                    std::vector<int> l = t.left().parts(), r = t.right().parts();
                    l.insert(l.end(), static_cast<std::size_t>(i), part);
                    r.insert(r.end(), static_cast<std::size_t>(m - i), part);
                    next.add(BasisKey::tensor(BasisKey::partition(l), BasisKey::partition(r)), c * binom(m, i));
                }
            acc = std::move(next);
        }
        return acc;
    });
    h->counit = [](const BasisKey& k) { return Scalar(k.parts().empty() ? 1 : 0); };
    h->unit = Element(BasisKey::partition({}));
    h->is_generator = [](const BasisKey& k) { return k.parts().size() == 1; };
    h->factor = [](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        std::vector<BasisKey> out;
        for (int p : k.parts()) out.push_back(BasisKey::partition({p}));
        return out;
    };
    h->free_on_generators = false;
    h->antipode = [](const BasisKey& k) {
        return Element(k, k.parts().size() % 2 ? Scalar(-1) : Scalar(1));
    };
    return h;
}

// ---- NSym ----

Bialg build_nsym() {
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "NSym";
    h->flags = {true, true, true, false, true, false};
    h->degree = [](const BasisKey& k) { return sum(k.parts()); };
    h->contains = [](const BasisKey& k) { return k.kind() == KeyKind::Composition && k.family() == 'H'; };
    h->basis = [](int n) {
        std::vector<BasisKey> out;
        for (auto& c : compositions_of(n)) out.push_back(BasisKey::composition('H', c));
        return sorted(out);
    };
    h->product = [](const BasisKey& a, const BasisKey& b) {
        return Element(BasisKey::composition('H', concat(a.parts(), b.parts())));
    };
    h->coproduct = memoize([](const BasisKey& k) {
        Element acc(BasisKey::tensor(BasisKey::composition('H', {}), BasisKey::composition('H', {})));
        for (int part : k.parts()) {
            Element next;
            for (const auto& [t, c] : acc.terms())
                for (int i = 0; i <= part; ++i) {
                    std::vector<int> l = t.left().parts(), r = t.right().parts();
                    if (i > 0) l.push_back(i);
                    if (part - i > 0) r.push_back(part - i);
                    next.add(BasisKey::tensor(BasisKey::composition('H', l), BasisKey::composition('H', r)), c);
                }
            acc = std::move(next);
        }
        return acc;
    });
    h->counit = [](const BasisKey& k) { return Scalar(k.parts().empty() ? 1 : 0); };
    h->unit = Element(BasisKey::composition('H', {}));
    h->is_generator = [](const BasisKey& k) { return k.parts().size() == 1; };
    h->factor = [](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        std::vector<BasisKey> out;
        for (int p : k.parts()) out.push_back(BasisKey::composition('H', {p}));
        return out;
    };
    h->free_on_generators = true;
    return h;
}

// ---- QSym ----

namespace {

void shuffles(const std::vector<int>& a, std::size_t i, const std::vector<int>& b, std::size_t j,
              std::vector<int>& cur, std::map<std::vector<int>, int>& out) {
    if (i == a.size() && j == b.size()) {
        ++out[cur];
        return;
    }
    if (i < a.size()) {
        cur.push_back(a[i]);
        shuffles(a, i + 1, b, j, cur, out);
        cur.pop_back();
    }
    if (j < b.size()) {
        cur.push_back(b[j]);
        shuffles(a, i, b, j + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

Bialg build_qsym() {
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "QSym";
    h->flags = {true, true, false, true, true, false};
    h->degree = [](const BasisKey& k) { return sum(k.parts()); };
    h->contains = [](const BasisKey& k) { return k.kind() == KeyKind::Composition && k.family() == 'M'; };
    h->basis = [](int n) {
        std::vector<BasisKey> out;
        for (auto& c : compositions_of(n)) out.push_back(BasisKey::composition('M', c));
        return sorted(out);
    };
    h->product = [](const BasisKey& a, const BasisKey& b) {
        std::map<std::vector<int>, int> words;
        std::vector<int> cur;
        shuffles(a.parts(), 0, b.parts(), 0, cur, words);
        Element out;
        for (const auto& [w, n] : words) out.add(BasisKey::composition('M', w), n);
        return out;
    };
    h->coproduct = [](const BasisKey& k) {
        Element out;
        const auto& p = k.parts();
        for (std::size_t i = 0; i <= p.size(); ++i)
            out.add(BasisKey::tensor(BasisKey::composition('M', {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i)}),
                                     BasisKey::composition('M', {p.begin() + static_cast<std::ptrdiff_t>(i), p.end()})),
                    1);
        return out;
    };
    h->counit = [](const BasisKey& k) { return Scalar(k.parts().empty() ? 1 : 0); };
    h->unit = Element(BasisKey::composition('M', {}));
    h->is_generator = [](const BasisKey&) { return false; };
    h->factor = [](const BasisKey&) -> std::optional<std::vector<BasisKey>> { return std::nullopt; };
    return h;
}

// ---- OMP ----

namespace {

class SetWords {
public:
    explicit SetWords(int m) : m_(m) {}

    std::vector<std::vector<std::vector<int>>> of(int n) {
        std::lock_guard<std::mutex> lock(mu_);
        return build(n);
    }

private:
    const std::vector<std::vector<std::vector<int>>>& build(int n) {
        auto it = memo_.find(n);
        if (it != memo_.end()) return it->second;
        std::vector<std::vector<std::vector<int>>> out;
        if (n == 0) out.push_back({});
        for (int s = 1; s <= std::min(n, m_); ++s)
            for (const auto& first : subsets_of_size(s, m_))
                for (const auto& rest : build(n - s)) {
                    std::vector<std::vector<int>> w = {first};
                    w.insert(w.end(), rest.begin(), rest.end());
                    out.push_back(std::move(w));
                }
        return memo_.emplace(n, std::move(out)).first->second;
    }

    int m_;
    std::mutex mu_;
    std::map<int, std::vector<std::vector<std::vector<int>>>> memo_;
};

}  // namespace

Bialg build_omp(AlphabetBound bound) {
    if (bound.max_letter < 1) throw std::invalid_argument("alphabet bound must be at least 1");
    int m = bound.max_letter;
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "OMP(m=" + std::to_string(m) + ")";
    h->flags = {true, true, true, false, true, false};
    h->degree = [](const BasisKey& k) {
        int d = 0;
        for (const auto& b : k.blocks()) d += static_cast<int>(b.size());
        return d;
    };
    h->contains = [m](const BasisKey& k) {
        if (k.kind() != KeyKind::SetWord) return false;
        for (const auto& b : k.blocks())
            if (b.back() > m) return false;
        return true;
    };
    auto words = std::make_shared<SetWords>(m);
    h->basis = [words](int n) {
        std::vector<BasisKey> out;
        for (const auto& w : words->of(n)) out.push_back(BasisKey::setword(w));
        return sorted(out);
    };
    h->product = [](const BasisKey& a, const BasisKey& b) {
        auto w = a.blocks();
        auto v = b.blocks();
        w.insert(w.end(), v.begin(), v.end());
        return Element(BasisKey::setword(w));
    };
    h->coproduct = [](const BasisKey& k) {
        const auto& w = k.ints();
        std::vector<int> letters;
        std::vector<std::size_t> starts;
        for (std::size_t i = 0; i < w.size(); i += static_cast<std::size_t>(w[i]) + 1) {
            starts.push_back(letters.size());
            letters.insert(letters.end(), w.begin() + static_cast<std::ptrdiff_t>(i + 1),
                           w.begin() + static_cast<std::ptrdiff_t>(i + 1 + static_cast<std::size_t>(w[i])));
        }
        starts.push_back(letters.size());
        std::map<std::pair<std::vector<int>, std::vector<int>>, int> terms;
        std::vector<int> l, r;
        for (std::size_t mask = 0; mask < (std::size_t{1} << letters.size()); ++mask) {
            l.clear();
            r.clear();
            for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
                std::size_t ls = l.size(), rs = r.size();
                l.push_back(0);
                r.push_back(0);
                for (std::size_t i = starts[b]; i < starts[b + 1]; ++i) (mask >> i & 1 ? l : r).push_back(letters[i]);
                // Drop empty blocks, otherwise record the block size.
                if (l.size() == ls + 1) l.pop_back(); else l[ls] = static_cast<int>(l.size() - ls - 1);
                if (r.size() == rs + 1) r.pop_back(); else r[rs] = static_cast<int>(r.size() - rs - 1);
            }
            ++terms[{l, r}];
        }
        Element out;
        for (auto& [lr, n] : terms)
            out.add(BasisKey::tensor(BasisKey::setword_packed(lr.first), BasisKey::setword_packed(lr.second)), n);
        return out;
    };
    h->counit = [](const BasisKey& k) { return Scalar(k.ints().empty() ? 1 : 0); };
    // On a block, the signed sum over its ordered set partitions; antimultiplicative on words.
    h->antipode = [](const BasisKey& k) {
        std::map<std::vector<int>, Scalar> acc{{{}, Scalar(1)}};
        auto blocks = k.blocks();
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
            std::map<std::vector<int>, Scalar> next;
            // Ordered set partitions of *it, appended block by block.
            std::vector<std::pair<std::vector<int>, std::vector<int>>> stack;
            for (const auto& [w, c] : acc) {
                stack.assign(1, {w, *it});
                while (!stack.empty()) {
                    auto [word, rest] = std::move(stack.back());
                    stack.pop_back();
                    if (rest.empty()) {
                        next[word] += c;
                        continue;
                    }
                    for (std::size_t mask = 1; mask < (std::size_t{1} << rest.size()); ++mask) {
                        std::vector<int> w2 = word, r2;
                        w2.push_back(0);
                        std::size_t at = w2.size() - 1;
                        for (std::size_t i = 0; i < rest.size(); ++i)
                            (mask >> i & 1 ? w2 : r2).push_back(rest[i]);
                        w2[at] = static_cast<int>(w2.size() - at - 1);
                        stack.emplace_back(std::move(w2), std::move(r2));
                    }
                }
            }
            acc = std::move(next);
        }
        Element out;
        for (auto& [w, c] : acc) {
            int blocks_used = 0;
            for (std::size_t i = 0; i < w.size(); i += static_cast<std::size_t>(w[i]) + 1) ++blocks_used;
            // Sign (-1)^(number of parts).
            out.add(BasisKey::setword_packed(w), blocks_used % 2 ? -c : c);
        }
        return out;
    };
    h->unit = Element(BasisKey::setword({}));
    h->is_generator = [](const BasisKey& k) { return k.blocks().size() == 1; };
    h->factor = [](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        std::vector<BasisKey> out;
        for (const auto& b : k.blocks()) out.push_back(BasisKey::setword({b}));
        return out;
    };
    h->free_on_generators = true;
    return h;
}

// ---- polynomial algebras ----

Bialg build_poly_primitive() {
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "k[x]";
    h->flags = {true, true, true, true, true, false};
    h->degree = [](const BasisKey& k) { return k.exponent(); };
    h->contains = [](const BasisKey& k) {
        return k.kind() == KeyKind::IntPower && k.family() == 'x' && k.exponent() >= 0;
    };
    h->basis = [](int n) { return std::vector<BasisKey>{BasisKey::power('x', n)}; };
    h->product = [](const BasisKey& a, const BasisKey& b) {
        return Element(BasisKey::power('x', a.exponent() + b.exponent()));
    };
    h->coproduct = [](const BasisKey& k) {
        Element out;
        int n = k.exponent();
        for (int i = 0; i <= n; ++i)
            out.add(BasisKey::tensor(BasisKey::power('x', i), BasisKey::power('x', n - i)), binom(n, i));
        return out;
    };
    h->counit = [](const BasisKey& k) { return Scalar(k.exponent() == 0 ? 1 : 0); };
    h->unit = Element(BasisKey::power('x', 0));
    h->is_generator = [](const BasisKey& k) { return k.exponent() == 1; };
    h->factor = [](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        return std::vector<BasisKey>(static_cast<std::size_t>(k.exponent()), BasisKey::power('x', 1));
    };
    h->free_on_generators = true;
    h->antipode = [](const BasisKey& k) { return Element(k, k.exponent() % 2 ? Scalar(-1) : Scalar(1)); };
    return h;
}

Bialg build_poly_point() {
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "k[z]";
    h->flags = {false, false, true, true, false, false};
    h->degree = [](const BasisKey& k) { return k.exponent(); };
    h->contains = [](const BasisKey& k) {
        return k.kind() == KeyKind::IntPower && k.family() == 'z' && k.exponent() >= 0;
    };
    h->basis = [](int n) { return std::vector<BasisKey>{BasisKey::power('z', n)}; };
    h->product = [](const BasisKey& a, const BasisKey& b) {
        return Element(BasisKey::power('z', a.exponent() + b.exponent()));
    };
    h->coproduct = [](const BasisKey& k) { return Element(BasisKey::tensor(k, k)); };
    h->counit = [](const BasisKey&) { return Scalar(1); };
    h->unit = Element(BasisKey::power('z', 0));
    h->is_generator = [](const BasisKey& k) { return k.exponent() == 1; };
    h->factor = [](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        return std::vector<BasisKey>(static_cast<std::size_t>(k.exponent()), BasisKey::power('z', 1));
    };
    h->free_on_generators = true;
    return h;
}

Bialg build_laurent_point(int window) {
    if (window < 1) throw std::invalid_argument("laurent window must be at least 1");
    auto h = std::make_shared<BialgebraHandle>();
    h->name = "k[z,z^-1](w=" + std::to_string(window) + ")";
    h->flags = {false, false, true, true, true, true};
    h->top_degree = 0;
    h->degree = [](const BasisKey&) { return 0; };
    h->contains = [window](const BasisKey& k) {
        return k.kind() == KeyKind::IntPower && k.family() == 'z' && std::abs(k.exponent()) <= window;
    };
    h->basis = [window](int n) {
        std::vector<BasisKey> out;
        if (n != 0) return out;
        for (int i = -window; i <= window; ++i) out.push_back(BasisKey::power('z', i));
        return sorted(out);
    };
    h->product = [window](const BasisKey& a, const BasisKey& b) {
        int e = a.exponent() + b.exponent();
        if (std::abs(e) > window) throw WindowOverflow(e);
        return Element(BasisKey::power('z', e));
    };
    h->coproduct = [](const BasisKey& k) { return Element(BasisKey::tensor(k, k)); };
    h->counit = [](const BasisKey&) { return Scalar(1); };
    h->unit = Element(BasisKey::power('z', 0));
    h->is_generator = [](const BasisKey& k) { return std::abs(k.exponent()) == 1; };
    h->factor = [](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        int n = k.exponent();
        return std::vector<BasisKey>(static_cast<std::size_t>(std::abs(n)), BasisKey::power('z', n > 0 ? 1 : -1));
    };
    h->free_on_generators = false;
    h->antipode = [window](const BasisKey& k) {
        if (std::abs(k.exponent()) > window) throw WindowOverflow(-k.exponent());
        return Element(BasisKey::power('z', -k.exponent()));
    };
    return h;
}

// ---- monoid algebras and duals ----

namespace {

std::shared_ptr<BialgebraHandle> finite_handle(const MonoidTable& t, char family) {
    t.validate();
    auto h = std::make_shared<BialgebraHandle>();
    h->top_degree = 0;
    h->degree = [](const BasisKey&) { return 0; };
    std::set<std::string> names(t.elements.begin(), t.elements.end());
    h->contains = [names, family](const BasisKey& k) {
        return k.kind() == KeyKind::MonoidElem && k.family() == family && names.count(k.name());
    };
    std::vector<BasisKey> keys;
    for (const auto& e : t.elements) keys.push_back(BasisKey::monoid(family, e));
    keys = sorted(keys);
    h->basis = [keys](int n) { return n == 0 ? keys : std::vector<BasisKey>{}; };
    return h;
}

}  // namespace

Bialg build_monoid_algebra(const MonoidTable& t) {
    auto h = finite_handle(t, 'g');
    h->name = "k" + t.name;
    h->flags = {false, false, true, t.is_commutative(), t.is_group(), true};
    h->product = [t](const BasisKey& a, const BasisKey& b) {
        return Element(BasisKey::monoid('g', t.mul(a.name(), b.name())));
    };
    h->coproduct = [](const BasisKey& k) { return Element(BasisKey::tensor(k, k)); };
    h->counit = [](const BasisKey&) { return Scalar(1); };
    h->unit = Element(BasisKey::monoid('g', t.identity));
    h->is_generator = [t](const BasisKey& k) { return k.name() != t.identity; };
    h->factor = [t](const BasisKey& k) -> std::optional<std::vector<BasisKey>> {
        if (k.name() == t.identity) return std::vector<BasisKey>{};
        return std::vector<BasisKey>{k};
    };
    return h;
}

Bialg build_group_algebra(const MonoidTable& t) {
    if (!t.is_group()) throw std::invalid_argument(t.name + " is not a group: some element has no inverse");
    auto base = build_monoid_algebra(t);
    auto h = std::make_shared<BialgebraHandle>(*base);
    h->antipode = [t](const BasisKey& k) { return Element(BasisKey::monoid('g', t.inverse(k.name()))); };
    return h;
}

Bialg build_monoid_dual(const MonoidTable& t) {
    auto h = finite_handle(t, 'x');
    h->name = "(k" + t.name + ")*";
    h->flags = {false, false, t.is_commutative(), true, t.is_group(), true};
    h->product = [](const BasisKey& a, const BasisKey& b) { return a == b ? Element(b) : Element(); };
    h->coproduct = [t](const BasisKey& k) {
        Element out;
        for (const auto& x : t.elements)
            for (const auto& y : t.elements)
                if (t.mul(x, y) == k.name())
                    out.add(BasisKey::tensor(BasisKey::monoid('x', x), BasisKey::monoid('x', y)), 1);
        return out;
    };
    h->counit = [t](const BasisKey& k) { return Scalar(k.name() == t.identity ? 1 : 0); };
    Element rho;
    for (const auto& e : t.elements) rho.add(BasisKey::monoid('x', e), 1);
    h->unit = rho;
    h->is_generator = [](const BasisKey&) { return false; };
    h->factor = [](const BasisKey&) -> std::optional<std::vector<BasisKey>> { return std::nullopt; };
    return h;
}

// ---- coalgebras ----

Coalg build_matrix_coalgebra(int n) {
    if (n < 1) throw std::invalid_argument("matrix coalgebra size must be at least 1");
    auto h = std::make_shared<CoalgebraHandle>();
    h->name = "M" + std::to_string(n) + "*";
    h->flags.finite_type = true;
    h->flags.cocommutative = n == 1;
    h->top_degree = 0;
    h->degree = [](const BasisKey&) { return 0; };
    h->contains = [n](const BasisKey& k) {
        return k.kind() == KeyKind::MatrixCell && k.row() <= n && k.col() <= n;
    };
    std::vector<BasisKey> keys;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) keys.push_back(BasisKey::cell(i, j));
    h->basis = [keys](int d) { return d == 0 ? keys : std::vector<BasisKey>{}; };
    h->coproduct = [n](const BasisKey& k) {
        Element out;
        for (int m = 1; m <= n; ++m)
            out.add(BasisKey::tensor(BasisKey::cell(k.row(), m), BasisKey::cell(m, k.col())), 1);
        return out;
    };
    h->counit = [](const BasisKey& k) { return Scalar(k.row() == k.col() ? 1 : 0); };
    return h;
}

Coalg build_pointed_coalgebra(const std::vector<std::string>& names) {
    if (names.empty()) throw std::invalid_argument("pointed coalgebra needs at least one point");
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate point name '" + n + "'");
    auto h = std::make_shared<CoalgebraHandle>();
    std::string nm = "k{";
    for (std::size_t i = 0; i < names.size(); ++i) nm += (i ? "," : "") + names[i];
    h->name = nm + "}";
    h->flags.finite_type = true;
    h->flags.graded = true;
    h->flags.connected = names.size() == 1;
    h->flags.cocommutative = true;
    h->top_degree = 0;
    h->degree = [](const BasisKey&) { return 0; };
    h->contains = [seen](const BasisKey& k) { return k.kind() == KeyKind::PointSym && seen.count(k.name()); };
    std::vector<BasisKey> keys;
    for (const auto& n : names) keys.push_back(BasisKey::point(n));
    keys = sorted(keys);
    h->basis = [keys](int d) { return d == 0 ? keys : std::vector<BasisKey>{}; };
    h->coproduct = [](const BasisKey& k) { return Element(BasisKey::tensor(k, k)); };
    h->counit = [](const BasisKey&) { return Scalar(1); };
    return h;
}

Coalg build_nsym_coalgebra_N() {
    auto h = std::make_shared<CoalgebraHandle>();
    h->name = "N";
    h->flags.graded = true;
    h->flags.connected = true;
    h->flags.cocommutative = true;
    h->degree = [](const BasisKey& k) { return k.exponent(); };
    h->contains = [](const BasisKey& k) {
        return k.kind() == KeyKind::IntPower && k.family() == 'H' && k.exponent() >= 0;
    };
    h->basis = [](int n) { return std::vector<BasisKey>{BasisKey::power('H', n)}; };
    h->coproduct = [](const BasisKey& k) {
        Element out;
        int n = k.exponent();
        for (int i = 0; i <= n; ++i) out.add(BasisKey::tensor(BasisKey::power('H', i), BasisKey::power('H', n - i)), 1);
        return out;
    };
    h->counit = [](const BasisKey& k) { return Scalar(k.exponent() == 0 ? 1 : 0); };
    return h;
}

Coalg build_point() {
    auto h = std::const_pointer_cast<CoalgebraHandle>(build_pointed_coalgebra({"pt"}));
    h->name = "k";
    return h;
}

}  // namespace meas
