#pragma once

#include "meas/freemod.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace meas {

struct Flags {
    bool graded = false;
    bool connected = false;
    bool cocommutative = false;
    bool commutative = false;
    bool hopf = false;
    bool finite_type = false;
};

class AntipodeUnavailable : public std::runtime_error {
public:
    explicit AntipodeUnavailable(const std::string& who)
        : std::runtime_error("antipode unavailable for " + who) {}
};

// Thrown by windowed products whose result leaves the stored basis.
class WindowOverflow : public std::runtime_error {
public:
    explicit WindowOverflow(int exponent)
        : std::runtime_error("window overflow at exponent " + std::to_string(exponent)),
          exponent_(exponent) {}
    int exponent() const { return exponent_; }

private:
    int exponent_;
};

struct CoalgebraHandle {
    std::string name;
    Flags flags;
    // Enumeration weight; equals the grading when flags.graded.
    std::function<int(const BasisKey&)> degree;
    std::function<std::vector<BasisKey>(int)> basis;
    std::function<bool(const BasisKey&)> contains;
    std::function<Element(const BasisKey&)> coproduct;
    std::function<Scalar(const BasisKey&)> counit;
    // Largest weight carrying keys when flags.finite_type; -1 otherwise.
    int top_degree = -1;
    // Optional override of keys_upto, e.g. bounding each tensor factor separately.
    std::function<std::vector<BasisKey>(int)> keys_within;

    virtual ~CoalgebraHandle() = default;

    std::vector<BasisKey> keys_upto(int n) const;
    GradedBasis graded_basis() const;
    Element coproduct_of(const Element& x) const;
    Scalar counit_of(const Element& x) const;
    // Terms of the (k-1)-fold iterated coproduct, as lists of k keys.
    std::vector<std::pair<std::vector<BasisKey>, Scalar>> iterated_coproduct(const BasisKey& c, int k) const;
};

struct BialgebraHandle : CoalgebraHandle {
    std::function<Element(const BasisKey&, const BasisKey&)> product;
    Element unit;
    // Factorization of a basis key as an ordered product of generators, or nullopt.
    std::function<std::optional<std::vector<BasisKey>>(const BasisKey&)> factor;
    std::function<bool(const BasisKey&)> is_generator;
    // True when there are no relations among the generators.
    bool free_on_generators = false;
    // Closed-form antipode when known.
    std::function<Element(const BasisKey&)> antipode;

    Element multiply(const Element& x, const Element& y) const;
};

using Coalg = std::shared_ptr<const CoalgebraHandle>;
using Bialg = std::shared_ptr<const BialgebraHandle>;

// Wraps a key function in a thread-safe memo.
std::function<Element(const BasisKey&)> memoize(std::function<Element(const BasisKey&)> f);

struct LinMap {
    std::string name;
    Coalg source;
    Bialg target;
    int bound = 0;
    std::map<BasisKey, Element> table;

    Element operator()(const BasisKey& k) const;
    Element apply(const Element& x) const;
};

LinMap tabulate(std::string name, Coalg source, Bialg target, int bound,
                const std::function<Element(const BasisKey&)>& f);
LinMap identity_map(const Bialg& h, int bound);
LinMap unit_counit(const Coalg& source, const Bialg& target, int bound);
LinMap convolution(const LinMap& f, const LinMap& g);
LinMap convolution_power(const Bialg& h, int n, int bound);
LinMap takeuchi_antipode(const Bialg& h, int bound);
LinMap eulerian_projection(const Bialg& h, int bound);
// outer after inner; both must act on the same handle.
LinMap compose_maps(const LinMap& outer, const LinMap& inner);

// Independent antipode: degreewise convolution-inverse solve for graded
// connected handles, full-basis solve for finite-type ones. nullopt when the
// convolution inverse of the identity does not exist.
std::optional<LinMap> antipode_solve(const Bialg& h, int bound);
// Closed form, else Takeuchi, else the full solve. Throws AntipodeUnavailable.
LinMap antipode(const Bialg& h, int bound);

std::vector<Element> primitive_basis(const Bialg& h, int n);
Element cocommutative_defect(const CoalgebraHandle& h, const Element& x);

struct AxiomFailure {
    std::string identity;
    std::vector<BasisKey> inputs;
    Element lhs;
    Element rhs;
};

struct AxiomReport {
    std::string name;
    int bound = 0;
    bool ok = true;
    std::size_t keys = 0;
    std::size_t pairs = 0;
    std::size_t triples = 0;
    std::size_t skipped_overflow = 0;
    std::vector<AxiomFailure> failures;
};

AxiomReport verify_coalgebra(const CoalgebraHandle& c, int bound);
AxiomReport verify_bialgebra(const BialgebraHandle& h, int bound);

Coalg tensor_coalgebra(const Coalg& c, const Coalg& d);
Coalg diagonal_tensor(const Coalg& c, const Coalg& d);
Coalg direct_sum_coalgebra(const Coalg& c, const Coalg& d);
// Copy of a handle with a replaced coproduct value at one key (fault injection).
Bialg with_corrupted_coproduct(const Bialg& h, const BasisKey& at, const Element& value);

}  // namespace meas
