#pragma once

#include "meas/hopf.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace meas {

// Dense integer ids for basis keys, assigned on first sight.
class KeyIndex {
public:
    int id(const BasisKey& k);
    int find(const BasisKey& k) const;
    const BasisKey& key(int id) const { return keys_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return keys_.size(); }

private:
    std::vector<BasisKey> keys_;
    std::unordered_map<BasisKey, int, BasisKeyHash> ids_;
};

using SVec = std::vector<std::pair<int, Scalar>>;

struct IdTerm {
    int a;
    int b;
    Scalar c;
};

inline std::uint64_t pack2(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}
inline std::uint64_t pack3(int a, int b, int c) {
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) |
           static_cast<std::uint64_t>(c);
}

using Acc = std::unordered_map<std::uint64_t, Scalar>;

inline void acc_add(Acc& acc, std::uint64_t k, const Scalar& c) {
    auto [it, ins] = acc.emplace(k, c);
    if (!ins) {
        it->second += c;
    }
}
// Integer value of a when it is an integer of at most 31 bits.
inline bool small_int(const Scalar& a, long& out) {
    if (mpz_cmp_ui(a.get_den_mpz_t(), 1) != 0) return false;
    const mpz_srcptr n = a.get_num_mpz_t();
    if (mpz_sizeinbase(n, 2) > 31) return false;
    out = mpz_get_si(n);
    return true;
}

// Sum of keyed terms: machine integers where possible, rationals otherwise.
class TermAcc {
public:
    void addmul(std::uint64_t k, const Scalar& a, const Scalar& b) {
        long x, y;
        merged_ = false;
        if (small_int(a, x) && small_int(b, y)) ints_.emplace_back(k, static_cast<std::int64_t>(x) * y);
        else big_[k] += a * b;
    }
    void addmul(std::uint64_t k, const Scalar& a, const Scalar& b, const Scalar& c) {
        long x, y, z;
        merged_ = false;
        if (small_int(a, x) && small_int(b, y) && small_int(c, z) && std::labs(x * y) < (1L << 31))
            ints_.emplace_back(k, static_cast<std::int64_t>(x) * y * z);
        else big_[k] += a * b * c;
    }
    // Combines duplicate keys and drops zeros; idempotent.
    void normalize();
    bool operator==(const TermAcc& o) const;
    Acc to_acc() const;

private:
    std::vector<std::pair<std::uint64_t, std::int64_t>> ints_;
    Acc big_;
    bool merged_ = false;
};

// Drops zero entries so two accumulators compare by value.
void acc_normalize(Acc& acc);
bool acc_equal(const Acc& a, const Acc& b);

// Coalgebra structure in id form over a shared index.
class IndexedCoalgebra {
public:
    IndexedCoalgebra(const CoalgebraHandle& h, KeyIndex& index) : h_(h), idx_(index) {}

    int id(const BasisKey& k) { return idx_.id(k); }
    const BasisKey& key(int id) const { return idx_.key(id); }
    KeyIndex& index() { return idx_; }
    const std::vector<IdTerm>& delta(int id);
    // Same terms as delta(id), not retained.
    std::vector<IdTerm> delta_uncached(int id);
    const Scalar& counit(int id);
    SVec to_svec(const Element& x);
    Element to_element(const SVec& v) const;

private:
    const CoalgebraHandle& h_;
    KeyIndex& idx_;
    std::unordered_map<int, std::vector<IdTerm>> delta_;
    std::unordered_map<int, Scalar> counit_;
};

// Product structure in id form; overflowing products are reported as nullptr.
class IndexedAlgebra {
public:
    IndexedAlgebra(const BialgebraHandle& h, KeyIndex& index) : h_(h), idx_(index) {}
    const SVec* product(int a, int b);

private:
    const BialgebraHandle& h_;
    KeyIndex& idx_;
    std::unordered_map<std::uint64_t, SVec> cache_;
    std::unordered_map<std::uint64_t, bool> overflow_;
};

SVec svec_from_element(const Element& x, KeyIndex& idx);
Element element_from_svec(const SVec& v, const KeyIndex& idx);

}  // namespace meas
