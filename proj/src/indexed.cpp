#include "meas/indexed.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <stdexcept>

namespace meas {

int KeyIndex::id(const BasisKey& k) {
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    int n = static_cast<int>(keys_.size());
    if (n >= (1 << 21)) throw std::length_error("key index exhausted");
    keys_.push_back(k);
    ids_.emplace(k, n);
    return n;
}

int KeyIndex::find(const BasisKey& k) const {
    auto it = ids_.find(k);
    return it == ids_.end() ? -1 : it->second;
}

void acc_normalize(Acc& acc) {
    for (auto it = acc.begin(); it != acc.end();) {
        if (sgn(it->second) == 0) it = acc.erase(it); else ++it;
    }
}

void TermAcc::normalize() {
    if (!big_.empty()) {
        for (const auto& [k, v] : ints_) big_[k] += v;
        ints_.clear();
        acc_normalize(big_);
        return;
    }
    if (merged_) return;
    std::sort(ints_.begin(), ints_.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < ints_.size();) {
        std::uint64_t k = ints_[r].first;
        __int128 s = 0;
        for (; r < ints_.size() && ints_[r].first == k; ++r) s += ints_[r].second;
        if (s == 0) continue;
        if (s > INT64_MAX || s < INT64_MIN) {
            // Spill into rationals; the remaining terms follow.
            mpz_class big_s = static_cast<long>(s >> 64);
            big_s <<= 64;
            big_s += static_cast<unsigned long>(static_cast<unsigned __int128>(s) & ~0UL);
            big_[k] += Scalar(big_s);
            continue;
        }
        ints_[w++] = {k, static_cast<std::int64_t>(s)};
    }
    ints_.resize(w);
    merged_ = true;
    if (!big_.empty()) normalize();
}

bool TermAcc::operator==(const TermAcc& o) const {
    if (big_.empty() && o.big_.empty()) return ints_ == o.ints_;
    return acc_equal(to_acc(), o.to_acc());
}

Acc TermAcc::to_acc() const {
    Acc a = big_;
    for (const auto& [k, v] : ints_) a[k] += v;
    acc_normalize(a);
    return a;
}

bool acc_equal(const Acc& a, const Acc& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it == b.end() || it->second != v) return false;
    }
    return true;
}

const std::vector<IdTerm>& IndexedCoalgebra::delta(int id) {
    auto it = delta_.find(id);
    if (it != delta_.end()) return it->second;
    return delta_.emplace(id, delta_uncached(id)).first->second;
}

std::vector<IdTerm> IndexedCoalgebra::delta_uncached(int id) {
    auto it = delta_.find(id);
    if (it != delta_.end()) return it->second;
    Element d = h_.coproduct(idx_.key(id));
    std::vector<IdTerm> terms;
    terms.reserve(d.size());
    for (const auto& [k, c] : d.terms()) {
        if (k.kind() != KeyKind::Tensor)
            throw std::logic_error("coproduct of " + idx_.key(id).render() + " has non-tensor key " + k.render());
        int a = idx_.id(k.left());
        int b = idx_.id(k.right());
        terms.push_back({a, b, c});
    }
    return terms;
}

const Scalar& IndexedCoalgebra::counit(int id) {
    auto it = counit_.find(id);
    if (it != counit_.end()) return it->second;
    return counit_.emplace(id, h_.counit(idx_.key(id))).first->second;
}

SVec IndexedCoalgebra::to_svec(const Element& x) { return svec_from_element(x, idx_); }
Element IndexedCoalgebra::to_element(const SVec& v) const { return element_from_svec(v, idx_); }

const SVec* IndexedAlgebra::product(int a, int b) {
    std::uint64_t key = pack2(a, b);
    auto it = cache_.find(key);
    if (it != cache_.end()) return &it->second;
    if (overflow_.count(key)) return nullptr;
    Element p;
    try {
        p = h_.product(idx_.key(a), idx_.key(b));
    } catch (const WindowOverflow&) {
        overflow_.emplace(key, true);
        return nullptr;
    }
    return &cache_.emplace(key, svec_from_element(p, idx_)).first->second;
}

SVec svec_from_element(const Element& x, KeyIndex& idx) {
    SVec v;
    v.reserve(x.size());
    for (const auto& [k, c] : x.terms()) v.emplace_back(idx.id(k), c);
    return v;
}

Element element_from_svec(const SVec& v, const KeyIndex& idx) {
    Element e;
    for (const auto& [i, c] : v) e.add(idx.key(i), c);
    return e;
}

}  // namespace meas
