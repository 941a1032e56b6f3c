#include "meas/freemod.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace meas {

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

const char* kTensorSep = " \xE2\x8A\x97 ";  // " ⊗ "

}  // namespace

BasisKey BasisKey::partition(std::vector<int> parts) {
    for (int p : parts)
        if (p <= 0) throw std::invalid_argument("partition part must be positive");
    std::sort(parts.begin(), parts.end(), std::greater<int>());
    BasisKey k;
    k.kind_ = KeyKind::Partition;
    k.ints_ = std::move(parts);
    return k;
}

BasisKey BasisKey::composition(char letter, std::vector<int> parts) {
    for (int p : parts)
        if (p <= 0) throw std::invalid_argument("composition part must be positive");
    BasisKey k;
    k.kind_ = KeyKind::Composition;
    k.family_ = letter;
    k.ints_ = std::move(parts);
    return k;
}

BasisKey BasisKey::finset(std::vector<int> elems) {
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (elems[i] < 1) throw std::invalid_argument("finite set entries start at 1");
        if (i && elems[i - 1] >= elems[i])
            throw std::invalid_argument("finite set entries must be strictly increasing");
    }
    BasisKey k;
    k.kind_ = KeyKind::FinSet;
    k.ints_ = std::move(elems);
    return k;
}

BasisKey BasisKey::setword(const std::vector<std::vector<int>>& blocks) {
    BasisKey k;
    k.kind_ = KeyKind::SetWord;
    for (const auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("set word blocks must be nonempty");
        (void)finset(b);
        k.ints_.push_back(static_cast<int>(b.size()));
        k.ints_.insert(k.ints_.end(), b.begin(), b.end());
    }
    return k;
}

BasisKey BasisKey::setword_packed(std::vector<int> packed) {
    BasisKey k;
    k.kind_ = KeyKind::SetWord;
    k.ints_ = std::move(packed);
    return k;
}

BasisKey BasisKey::power(char letter, int n) {
    BasisKey k;
    k.kind_ = KeyKind::IntPower;
    k.family_ = letter;
    k.ints_ = {n};
    return k;
}

BasisKey BasisKey::monoid(char family, std::string sym) {
    if (sym.empty()) throw std::invalid_argument("empty monoid symbol");
    BasisKey k;
    k.kind_ = KeyKind::MonoidElem;
    k.family_ = family;
    k.name_ = std::move(sym);
    return k;
}

BasisKey BasisKey::cell(int i, int j) {
    if (i < 1 || j < 1) throw std::invalid_argument("matrix cell indices start at 1");
    BasisKey k;
    k.kind_ = KeyKind::MatrixCell;
    k.ints_ = {i, j};
    return k;
}

BasisKey BasisKey::point(std::string name) {
    if (name.empty()) throw std::invalid_argument("empty point name");
    BasisKey k;
    k.kind_ = KeyKind::PointSym;
    k.name_ = std::move(name);
    return k;
}

BasisKey BasisKey::tensor(BasisKey a, BasisKey b) {
    BasisKey k;
    k.kind_ = KeyKind::Tensor;
    k.kids_.reserve(2);
    k.kids_.push_back(std::move(a));
    k.kids_.push_back(std::move(b));
    return k;
}

BasisKey BasisKey::tensor3(BasisKey a, BasisKey b, BasisKey c) {
    return tensor(std::move(a), tensor(std::move(b), std::move(c)));
}

BasisKey BasisKey::summand(int slot, BasisKey inner) {
    BasisKey k;
    k.kind_ = KeyKind::Summand;
    k.ints_ = {slot};
    k.kids_.push_back(std::move(inner));
    return k;
}

BasisKey BasisKey::cls(std::string quotient, int index) {
    BasisKey k;
    k.kind_ = KeyKind::Class;
    k.ints_ = {index};
    k.name_ = std::move(quotient);
    return k;
}

std::vector<std::vector<int>> BasisKey::blocks() const {
    if (kind_ != KeyKind::SetWord) throw std::logic_error("blocks() on a non set-word key");
    std::vector<std::vector<int>> out;
    std::size_t i = 0;
    while (i < ints_.size()) {
        auto len = static_cast<std::size_t>(ints_[i]);
        out.emplace_back(ints_.begin() + static_cast<std::ptrdiff_t>(i + 1),
                         ints_.begin() + static_cast<std::ptrdiff_t>(i + 1 + len));
        i += len + 1;
    }
    return out;
}

std::vector<BasisKey> BasisKey::factors() const {
    std::vector<BasisKey> out;
    const BasisKey* k = this;
    while (k->kind_ == KeyKind::Tensor) {
        out.push_back(k->kids_[0]);
        k = &k->kids_[1];
    }
    out.push_back(*k);
    return out;
}

bool operator==(const BasisKey& a, const BasisKey& b) {
    return a.kind_ == b.kind_ && a.family_ == b.family_ && a.ints_ == b.ints_ &&
           a.name_ == b.name_ && a.kids_ == b.kids_;
}

bool operator<(const BasisKey& a, const BasisKey& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.family_ != b.family_) return a.family_ < b.family_;
    if (a.ints_ != b.ints_) return a.ints_ < b.ints_;
    if (a.name_ != b.name_) return a.name_ < b.name_;
    return a.kids_ < b.kids_;
}

std::size_t BasisKey::hash() const {
    std::size_t h = static_cast<std::size_t>(kind_) * 31 + static_cast<unsigned char>(family_);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (int x : ints_) mix(static_cast<std::size_t>(x));
    if (!name_.empty()) mix(std::hash<std::string>{}(name_));
    for (const auto& k : kids_) mix(k.hash());
    return h;
}

std::string BasisKey::render() const {
    switch (kind_) {
        case KeyKind::Partition: return "p[" + join_ints(ints_) + "]";
        case KeyKind::Composition: return std::string(1, family_) + "[" + join_ints(ints_) + "]";
        case KeyKind::FinSet: return "S{" + join_ints(ints_) + "}";
        case KeyKind::SetWord: {
            std::string s = "w[";
            auto bs = blocks();
            for (std::size_t i = 0; i < bs.size(); ++i) {
                if (i) s += '|';
                s += "{" + join_ints(bs[i]) + "}";
            }
            return s + "]";
        }
        case KeyKind::IntPower:
            if (family_ == 'H') return "H" + std::to_string(ints_[0]);
            return std::string(1, family_) + "^" + std::to_string(ints_[0]);
        case KeyKind::MonoidElem: return std::string(1, family_) + "[" + name_ + "]";
        case KeyKind::MatrixCell:
            return "e(" + std::to_string(ints_[0]) + "," + std::to_string(ints_[1]) + ")";
        case KeyKind::PointSym: return "<" + name_ + ">";
        case KeyKind::Tensor: return "(" + kids_[0].render() + kTensorSep + kids_[1].render() + ")";
        case KeyKind::Summand: return "in" + std::to_string(ints_[0]) + "(" + kids_[0].render() + ")";
        case KeyKind::Class: return "[" + name_ + ":" + std::to_string(ints_[0]) + "]";
    }
    return "?";
}

// ---- parsing ----

namespace {

class KeyParser {
public:
    explicit KeyParser(const std::string& s) : s_(s) {}

    BasisKey parse_all() {
        BasisKey k = parse();
        if (pos_ != s_.size()) fail("trailing characters");
        return k;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("cannot parse basis key '" + s_ + "' at offset " +
                                    std::to_string(pos_) + ": " + why);
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    bool eat(const std::string& lit) {
        if (s_.compare(pos_, lit.size(), lit) == 0) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }
    int integer() {
        std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_ || (s_[start] == '-' && pos_ == start + 1)) fail("expected integer");
        return std::stoi(s_.substr(start, pos_ - start));
    }
    std::vector<int> int_list(char close) {
        std::vector<int> v;
        if (peek() == close) { ++pos_; return v; }
        for (;;) {
            v.push_back(integer());
            if (peek() == ',') { ++pos_; continue; }
            expect(close);
            return v;
        }
    }
    std::string symbol(char close) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != close) ++pos_;
        if (start == pos_) fail("empty symbol");
        std::string out = s_.substr(start, pos_ - start);
        expect(close);
        return out;
    }

    BasisKey parse() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            BasisKey a = parse();
            if (!eat(kTensorSep)) fail("expected tensor separator");
            BasisKey b = parse();
            expect(')');
            return BasisKey::tensor(std::move(a), std::move(b));
        }
        if (c == '<') {
            ++pos_;
            return BasisKey::point(symbol('>'));
        }
        if (c == '[') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < s_.size() && s_[pos_] != ':') ++pos_;
            std::string q = s_.substr(start, pos_ - start);
            expect(':');
            int idx = integer();
            expect(']');
            return BasisKey::cls(q, idx);
        }
        if (eat("in")) {
            int slot = integer();
            expect('(');
            BasisKey inner = parse();
            expect(')');
            return BasisKey::summand(slot, std::move(inner));
        }
        if (eat("S{")) return BasisKey::finset(int_list('}'));
        if (eat("e(")) {
            auto v = int_list(')');
            if (v.size() != 2) fail("matrix cell needs two indices");
            return BasisKey::cell(v[0], v[1]);
        }
        if (eat("w[")) {
            std::vector<std::vector<int>> blocks;
            if (peek() == ']') { ++pos_; return BasisKey::setword(blocks); }
            for (;;) {
                expect('{');
                blocks.push_back(int_list('}'));
                if (peek() == '|') { ++pos_; continue; }
                expect(']');
                return BasisKey::setword(blocks);
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            ++pos_;
            char n = peek();
            if (n == '[') {
                ++pos_;
                if (c == 'p') return BasisKey::partition(int_list(']'));
                if (c == 'H' || c == 'M') return BasisKey::composition(c, int_list(']'));
                return BasisKey::monoid(c, symbol(']'));
            }
            if (n == '^') {
                ++pos_;
                return BasisKey::power(c, integer());
            }
            if (c == 'H' && std::isdigit(static_cast<unsigned char>(n))) return BasisKey::power('H', integer());
        }
        fail("unrecognized key");
    }
};

}  // namespace

BasisKey parse_key(const std::string& text) { return KeyParser(text).parse_all(); }

// ---- Element ----

Element::Element(const BasisKey& k, const Scalar& c) {
    if (sgn(c) != 0) terms_.emplace(k, c);
}

Scalar Element::coeff(const BasisKey& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Scalar(0) : it->second;
}

void Element::add(const BasisKey& k, const Scalar& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (sgn(it->second) == 0) terms_.erase(it);
    }
}

Element& Element::operator+=(const Element& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
}

Element& Element::operator-=(const Element& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
}

Element& Element::operator*=(const Scalar& c) {
    if (sgn(c) == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
}

std::string Element::render() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        Scalar a = abs(c);
        if (first) {
            if (sgn(c) < 0) out += "-";
        } else {
            out += sgn(c) < 0 ? " - " : " + ";
        }
        if (a != 1) out += a.get_str() + "*";
        out += k.render();
        first = false;
    }
    return out;
}

Element parse_element(const std::string& text) {
    if (text == "0") return {};
    Element out;
    std::size_t i = 0;
    int sign = 1;
    if (!text.empty() && text[0] == '-') {
        sign = -1;
        i = 1;
    }
    while (i <= text.size()) {
        int depth = 0;
        std::size_t j = i;
        std::size_t next = std::string::npos;
        int next_sign = 1;
        for (; j < text.size(); ++j) {
            char ch = text[j];
            if (ch == '(' || ch == '[' || ch == '{' || ch == '<') ++depth;
            if (ch == ')' || ch == ']' || ch == '}' || ch == '>') --depth;
            if (depth == 0 && ch == ' ' && j + 2 < text.size() && text[j + 2] == ' ' &&
                (text[j + 1] == '+' || text[j + 1] == '-')) {
                next = j + 3;
                next_sign = text[j + 1] == '-' ? -1 : 1;
                break;
            }
        }
        std::string term = text.substr(i, j - i);
        if (term.empty()) throw std::invalid_argument("cannot parse element '" + text + "': empty term");
        Scalar coef(sign);
        std::size_t star = std::string::npos;
        int d = 0;
        for (std::size_t t = 0; t < term.size(); ++t) {
            char ch = term[t];
            if (ch == '(' || ch == '[' || ch == '{' || ch == '<') ++d;
            if (ch == ')' || ch == ']' || ch == '}' || ch == '>') --d;
            if (d == 0 && ch == '*') { star = t; break; }
        }
        std::string keytext = term;
        if (star != std::string::npos) {
            Scalar c;
            if (c.set_str(term.substr(0, star), 10) != 0)
                throw std::invalid_argument("cannot parse coefficient in '" + term + "'");
            c.canonicalize();
            coef *= c;
            keytext = term.substr(star + 1);
        }
        out.add(parse_key(keytext), coef);
        if (next == std::string::npos) break;
        i = next;
        sign = next_sign;
    }
    return out;
}

Element linear_combine(const std::vector<std::pair<Scalar, Element>>& pairs) {
    Element out;
    for (const auto& [c, x] : pairs)
        for (const auto& [k, v] : x.terms()) out.add(k, c * v);
    return out;
}

Element tensor(const Element& x, const Element& y) {
    Element out;
    for (const auto& [a, ca] : x.terms())
        for (const auto& [b, cb] : y.terms()) out.add(BasisKey::tensor(a, b), ca * cb);
    return out;
}

Element tensor3(const Element& x, const Element& y, const Element& z) {
    return tensor(x, tensor(y, z));
}

Element twist(const Element& x) {
    Element out;
    for (const auto& [k, c] : x.terms()) {
        if (k.kind() != KeyKind::Tensor) throw std::invalid_argument("twist of a non-tensor key " + k.render());
        out.add(BasisKey::tensor(k.right(), k.left()), c);
    }
    return out;
}

Element apply_linear(const Element& x, const std::function<Element(const BasisKey&)>& f) {
    Element out;
    for (const auto& [k, c] : x.terms()) {
        Element y = f(k);
        for (const auto& [k2, c2] : y.terms()) out.add(k2, c * c2);
    }
    return out;
}

Element homogeneous_component(const Element& x, int n, const GradedBasis& g) {
    Element out;
    for (const auto& [k, c] : x.terms()) {
        if (g.contains && !g.contains(k)) throw std::invalid_argument("unknown key " + k.render());
        if (g.degree(k) == n) out.add(k, c);
    }
    return out;
}

std::vector<std::vector<int>> compositions_of(int n) {
    std::vector<std::vector<int>> out;
    if (n == 0) return {{}};
    for (int first = 1; first <= n; ++first)
        for (auto rest : compositions_of(n - first)) {
            rest.insert(rest.begin(), first);
            out.push_back(std::move(rest));
        }
    return out;
}

static void partitions_rec(int n, int maxpart, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(n, maxpart); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(n - p, p, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> partitions_of(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    partitions_rec(n, n, cur, out);
    return out;
}

std::vector<std::vector<int>> subsets_of_size(int k, int m) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > m) return out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int e = start; e <= m; ++e) {
            cur.push_back(e);
            rec(e + 1);
            cur.pop_back();
        }
    };
    rec(1);
    return out;
}

}  // namespace meas
