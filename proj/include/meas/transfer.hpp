#pragma once

#include "meas/covering.hpp"
#include "meas/hopf.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meas {

// Column order used by the section solver. Reversed yields a second, generally different section.
enum class SectionOrder { Canonical, Reversed };

// iota : A -> B (x) C with f(iota(a)) = a for every key a of A up to verified_degree.
struct LinearSection {
    PartialCovering covering;
    std::map<BasisKey, Element> table;
    int verified_degree = 0;

    Element operator()(const BasisKey& a) const;
};

// Throws std::invalid_argument naming the first degree with a key outside the image.
LinearSection linear_section(const PartialCovering& f, int N, SectionOrder order = SectionOrder::Canonical);

bool is_primitive(const BialgebraHandle& h, const Element& x);

// f(p, c); throws std::invalid_argument if p is not primitive in B.
Element transfer_primitive(const PartialCovering& f, const Element& p, const BasisKey& c);

struct PrimitiveContainment {
    bool ok = true;
    // Per degree n: rank of the transferred span, and dimension of P(A)_n.
    std::vector<std::pair<std::size_t, std::size_t>> ranks;
    std::vector<Witness> witnesses;
};
// Transfers every primitive basis element of B up to degree N against every key of C
// and checks the span lies in primitive_basis(A). Needs B and A graded connected.
PrimitiveContainment primitive_containment(const PartialCovering& f, int N);

struct AntipodeTransfer {
    LinMap antipode;
    std::string oracle;
    bool matches_oracle = false;
    std::vector<Witness> mismatches;
};
// S_A = f o (S_B (x) id) o iota. Throws AntipodeUnavailable when B has no antipode.
LinMap transferred_antipode(const PartialCovering& f, const LinearSection& iota, int N);
// The transferred antipode compared with an oracle: Takeuchi on generators extended
// anti-multiplicatively (free graded connected A), Takeuchi (graded connected A), or the
// convolution-inverse solve.
AntipodeTransfer transfer_antipode(const PartialCovering& f, const LinearSection& iota, int N);

struct SwapReport {
    bool ok = true;
    std::size_t triples = 0;
    // Triples whose c has a cocommutative coproduct, where both sides agree term by term.
    std::size_t symmetric = 0;
    std::optional<Witness> witness;
};
// f(b', c2) (x) f(b, c1) = f(b', c1) (x) f(b, c2) for all keys b, b', c up to N.
SwapReport swap_identity_check(const PartialCovering& f, int N);

struct CocommutativityReport {
    bool b_hopf = false;
    std::size_t checked = 0;
    std::vector<Witness> violations;
    // Violations are failures only when B is Hopf.
    bool ok() const { return !b_hopf || violations.empty(); }
};
CocommutativityReport image_cocommutativity_check(const PartialCovering& f, int N);

struct CharacterTransport {
    // b -> functional on C, written on the dual basis of C keys up to N.
    std::map<BasisKey, Element> table;
    bool multiplicative = true;
    std::vector<Witness> witnesses;
};
// chi is an algebra character of A given on keys. Throws std::invalid_argument with a
// witness pair when chi is not multiplicative on keys up to N.
CharacterTransport character_transport(const PartialCovering& f, const std::function<Scalar(const BasisKey&)>& chi,
                                       int N);
// Convolution product of two transported characters in Alg(B, C*).
std::map<BasisKey, Element> convolve_characters(const PartialCovering& f, const std::map<BasisKey, Element>& x,
                                                const std::map<BasisKey, Element>& y);

struct GaloisReport {
    std::size_t dimension = 0;
    std::size_t beta_rank = 0;
    bool bijective = false;
    bool hopf = false;
    // bijective agrees with the existence of an antipode.
    bool consistent = false;
    bool gamma_surjective = false;
};
// beta(a (x) a') = a1 (x) a2 a' on a finite-dimensional bialgebra.
GaloisReport galois_check(const Bialg& a);

struct GammaReport {
    std::size_t triples = 0;
    bool right_inverse = true;
    bool intertwines = true;
    std::vector<Witness> witnesses;
    bool ok() const { return right_inverse && intertwines; }
};
// gamma(b, c, a) = b1 (x) c1 (x) f(b2, c2) a and gamma'(b, c, a) = b1 (x) c1 (x) f(S b2, c2) a.
// Checks gamma o gamma' = id and beta (f (x) id) = (f (x) id) gamma on keys up to N.
GammaReport gamma_surjectivity(const PartialCovering& f, int N);

struct PointInverse {
    BasisKey z;
    BasisKey z_inverse;
    LinMap phi;
    LinMap phibar;
    bool inverse_ok = true;
    bool coalgebra_maps = true;
    std::vector<Witness> witnesses;
};
// phi = f(z, .) and phibar = f(z^-1, .) on C keys up to N.
PointInverse point_convolution_inverse(const PartialCovering& f, const BasisKey& z, int N);

struct InvertibilityReport {
    bool ok = true;
    bool upper_triangular = false;
    std::vector<Witness> witnesses;
};
// For a matrix coalgebra C: phi(e_ii) phibar(e_ii) = 1 = phibar(e_ii) phi(e_ii), and
// phibar(e_ji) = 0 for j > i when phi is upper triangular. Throws if phi and phibar are
// not mutually convolution inverse.
InvertibilityReport point_invertibility_check(const LinMap& phi, const LinMap& phibar);

struct ConclusionReport {
    bool hypotheses = false;
    bool antipode_found = false;
    std::string note;
};
ConclusionReport pointed_cover_conclusion_check(const PartialCovering& f, int N);

// A grouplike key b of B and a key c with f(b, c) outside the span of the grouplike keys
// of A, or nullopt.
std::optional<Witness> grouplike_image_witness(const PartialCovering& f, int N);

}  // namespace meas
