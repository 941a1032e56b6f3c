#pragma once

#include "meas/exactlin.hpp"

#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace meas {

enum class KeyKind : unsigned char {
    Partition,
    Composition,
    FinSet,
    SetWord,
    IntPower,
    MonoidElem,
    MatrixCell,
    PointSym,
    Tensor,
    Summand,
    Class
};

// One basis vector. Value type with a total order: kind, family letter,
// integer payload, symbol, then children.
class BasisKey {
public:
    BasisKey() = default;

    static BasisKey partition(std::vector<int> parts);
    static BasisKey composition(char letter, std::vector<int> parts);
    static BasisKey finset(std::vector<int> elems);
    static BasisKey setword(const std::vector<std::vector<int>>& blocks);
    // From the packed form of ints(): each block as its size followed by its elements. Unchecked.
    static BasisKey setword_packed(std::vector<int> packed);
    static BasisKey power(char letter, int n);
    static BasisKey monoid(char family, std::string sym);
    static BasisKey cell(int i, int j);
    static BasisKey point(std::string name);
    static BasisKey tensor(BasisKey a, BasisKey b);
    static BasisKey tensor3(BasisKey a, BasisKey b, BasisKey c);
    static BasisKey summand(int slot, BasisKey inner);
    static BasisKey cls(std::string quotient, int index);

    KeyKind kind() const { return kind_; }
    char family() const { return family_; }
    const std::vector<int>& ints() const { return ints_; }
    const std::string& name() const { return name_; }

    // Partition / Composition / FinSet entries.
    const std::vector<int>& parts() const { return ints_; }
    std::vector<std::vector<int>> blocks() const;
    int exponent() const { return ints_.at(0); }
    int row() const { return ints_.at(0); }
    int col() const { return ints_.at(1); }
    int slot() const { return ints_.at(0); }
    int index() const { return ints_.at(0); }

    const BasisKey& left() const { return kids_.at(0); }
    const BasisKey& right() const { return kids_.at(1); }
    const BasisKey& inner() const { return kids_.at(0); }
    // Flattened factors of a right-nested tensor.
    std::vector<BasisKey> factors() const;

    std::string render() const;
    std::size_t hash() const;

    friend bool operator==(const BasisKey& a, const BasisKey& b);
    friend bool operator<(const BasisKey& a, const BasisKey& b);
    friend bool operator!=(const BasisKey& a, const BasisKey& b) { return !(a == b); }

private:
    KeyKind kind_ = KeyKind::PointSym;
    char family_ = 0;
    std::vector<int> ints_;
    std::string name_;
    std::vector<BasisKey> kids_;
};

BasisKey parse_key(const std::string& text);

struct BasisKeyHash {
    std::size_t operator()(const BasisKey& k) const { return k.hash(); }
};

class Element {
public:
    using Terms = std::map<BasisKey, Scalar>;

    Element() = default;
    explicit Element(const BasisKey& k, const Scalar& c = Scalar(1));

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    Scalar coeff(const BasisKey& k) const;

    void add(const BasisKey& k, const Scalar& c);
    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    Element& operator*=(const Scalar& c);

    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(const Scalar& c, Element a) { return a *= c; }
    friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

    std::string render() const;

private:
    Terms terms_;
};

Element parse_element(const std::string& text);

Element linear_combine(const std::vector<std::pair<Scalar, Element>>& pairs);
Element tensor(const Element& x, const Element& y);
Element tensor3(const Element& x, const Element& y, const Element& z);
Element twist(const Element& x);
// Applies a linear map keywise and sums.
Element apply_linear(const Element& x, const std::function<Element(const BasisKey&)>& f);

struct GradedBasis {
    std::function<int(const BasisKey&)> degree;
    std::function<std::vector<BasisKey>(int)> enumerate;
    std::function<bool(const BasisKey&)> contains;
};

Element homogeneous_component(const Element& x, int n, const GradedBasis& g);

// Compositions, partitions and finite subsets used by several instances.
std::vector<std::vector<int>> compositions_of(int n);
std::vector<std::vector<int>> partitions_of(int n);
std::vector<std::vector<int>> subsets_of_size(int k, int m);

}  // namespace meas
