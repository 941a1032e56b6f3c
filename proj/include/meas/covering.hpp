#pragma once

#include "meas/hopf.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace meas {

enum class CoveringMode { Decree, Table };

// Builder name plus parameters, as written in a declaration file.
struct HandleSpec {
    std::string builder;
    std::map<std::string, std::string> params;
    // Coalgebra specs of kind "coalg" wrap a bialgebra spec.
    std::shared_ptr<HandleSpec> of;
};

struct CoveringSource {
    HandleSpec B;
    HandleSpec A;
    HandleSpec C;
};

// f : B (x) C -> A. In decree mode `rule` is consulted on generators of B only and
// all other values follow from the measuring identities; in table mode `rule` is total.
struct PartialCovering {
    std::string name;
    Bialg B;
    Bialg A;
    Coalg C;
    CoveringMode mode = CoveringMode::Decree;
    int degree_bound = 6;
    std::function<Element(const BasisKey& b, const BasisKey& c)> rule;
    // Set by constructions whose output is locally finite by construction.
    std::string locally_finite_reason;
    // Builders the handles came from, when known; needed for export.
    std::optional<CoveringSource> source;

    Element value(const BasisKey& b, const BasisKey& c) const;
    Element apply(const Element& b, const Element& c) const;

    // Shared between copies: give a copy a fresh memo before changing its rule.
    std::shared_ptr<std::map<std::pair<BasisKey, BasisKey>, Element>> memo =
        std::make_shared<std::map<std::pair<BasisKey, BasisKey>, Element>>();
    std::shared_ptr<std::mutex> memo_mutex = std::make_shared<std::mutex>();
};

// The value forced by the measuring identities on a factorization of b into generators.
// Throws std::invalid_argument when b has no factorization.
Element extend_from_generators(const PartialCovering& c, const BasisKey& b, const BasisKey& x);

struct Witness {
    std::string identity;
    std::vector<BasisKey> inputs;
    Element lhs;
    Element rhs;
};

struct DegreeRank {
    int degree = 0;
    std::size_t achieved = 0;
    std::size_t dimension = 0;
};

struct VerificationReport {
    std::string covering;
    int checked_degree = 0;
    bool measuring_ok = true;
    bool coalgebra_map_ok = true;
    bool surjective_ok = true;
    bool measuring_exhaustive = true;
    std::size_t measuring_pairs = 0;
    std::size_t value_pairs = 0;
    std::size_t skipped_overflow = 0;
    std::vector<Witness> measuring_witnesses;
    std::vector<Witness> coalgebra_witnesses;
    std::vector<DegreeRank> ranks;
    int first_nonsurjective_degree = -1;
    std::optional<BasisKey> surjectivity_witness;

    bool ok() const { return measuring_ok && coalgebra_map_ok && surjective_ok; }
};

// Pair budget above which the measuring check switches to generator pairs plus a
// fixed-seed sample.
inline constexpr std::size_t kExhaustiveMeasuringPairs = 200000;

VerificationReport verify_covering(const PartialCovering& c, int N);

// All values f(b, c) for basis keys of B and C of degree at most N, with zeros dropped.
struct ValueTable {
    std::vector<BasisKey> b_keys;
    std::vector<BasisKey> c_keys;
    // rows[i] lists (index into c_keys, value) for b_keys[i].
    std::vector<std::vector<std::pair<std::size_t, Element>>> rows;
};
ValueTable tabulate_values(const PartialCovering& c, int N);

// Image rank per degree of A, by exact elimination.
std::vector<DegreeRank> image_ranks(const PartialCovering& c, int N);

enum class GradingStatus { Certified, TrueUpToN, False, NotApplicable };
std::string to_string(GradingStatus s);

struct GradingReport {
    GradingStatus graded = GradingStatus::NotApplicable;
    GradingStatus bigraded = GradingStatus::NotApplicable;
    GradingStatus locally_finite = GradingStatus::NotApplicable;
    std::vector<std::string> notes;
    std::optional<Witness> graded_witness;
    std::optional<Witness> bigraded_witness;
    std::optional<Witness> locally_finite_witness;
};

GradingReport grading_report(const PartialCovering& c, int N);

// Linear map between coalgebras, given on basis keys.
struct CoalgebraMap {
    std::string name;
    Coalg source;
    Coalg target;
    std::function<Element(const BasisKey&)> f;

    Element operator()(const BasisKey& k) const { return f(k); }
    Element apply(const Element& x) const { return apply_linear(x, f); }
};

struct CoveringMorphism {
    PartialCovering source;
    PartialCovering target;
    CoalgebraMap t;
};

struct MorphismReport {
    bool coalgebra_map_ok = true;
    bool triangle_ok = true;
    std::vector<Witness> witnesses;
    bool ok() const { return coalgebra_map_ok && triangle_ok; }
};

MorphismReport verify_coalgebra_map(const CoalgebraMap& t, int N);
MorphismReport verify_morphism(const CoveringMorphism& m, int N);
// Rank of t on C_source keys <= N against dim of C_target keys <= N.
bool is_surjective(const CoalgebraMap& t, int N);

PartialCovering identity_covering(const Bialg& a);
PartialCovering from_morphism_family(const Bialg& B, const Bialg& A, const std::vector<LinMap>& maps, int N);
PartialCovering compose(const PartialCovering& outer, const PartialCovering& inner);
PartialCovering direct_sum(const PartialCovering& f, const PartialCovering& g);
CoveringMorphism identity_morphism(const PartialCovering& f);

struct PushoutResult {
    PartialCovering k;
    CoveringMorphism from_g;
    CoveringMorphism from_h;
    // Representative of each class: a key of C_g (+) C_h.
    std::vector<BasisKey> representatives;
    std::size_t relation_rank = 0;
    bool propagates_surjectivity = true;
    std::function<Element(const BasisKey&)> project;
};

// Throws std::invalid_argument if the relation space is not a coideal within N.
PushoutResult pushout(const CoveringMorphism& s, const CoveringMorphism& t, int N);

struct UniversalReport {
    bool exists = false;
    bool unique = false;
    std::optional<CoalgebraMap> map;
};
// Solves for the map out of the pushout determined by u : g -> k' and v : h -> k'.
UniversalReport pushout_universal(const PushoutResult& p, const CoveringMorphism& u, const CoveringMorphism& v, int N);

PartialCovering locally_finitize(const PartialCovering& c);
PartialCovering canonical_nsym_covering(const Bialg& a);

struct FactorReport {
    bool ok = false;
    std::optional<CoalgebraMap> fbar;
    std::optional<BasisKey> divergent;
    std::vector<Witness> witnesses;
};
FactorReport factor_through_can(const PartialCovering& f, int N);

struct EquivalenceReport {
    bool equivalent = false;
    bool s_ok = false;
    bool t_ok = false;
    bool s_surjective = false;
    bool t_surjective = false;
    bool ranges_coincide = false;
    std::vector<std::string> notes;
};
EquivalenceReport equivalent_via(const PartialCovering& f, const PartialCovering& g, const PartialCovering& h,
                                 const CoveringMorphism& s, const CoveringMorphism& t, int N);

struct PointSearchReport {
    std::size_t forward_maps = 0;   // point maps C_f -> C_g tried
    std::size_t backward_maps = 0;  // point maps C_g -> C_f tried
    std::size_t forward_2cells = 0;
    std::size_t backward_2cells = 0;
    std::optional<std::pair<CoveringMorphism, CoveringMorphism>> inverse_pair;
};
// Exhaustive search over set maps between the grouplike bases of pointed C_f and C_g
// for 2-cells f -> g and g -> f composing to identities. Throws if a basis key is not grouplike.
PointSearchReport search_invertible_2cells(const PartialCovering& f, const PartialCovering& g, int N);

struct NondegeneracyReport {
    bool nondegenerate = true;
    std::vector<Element> kernel;
};
NondegeneracyReport nondegeneracy_report(const PartialCovering& f, int N);

}  // namespace meas
