#pragma once

#include "meas/covering.hpp"
#include "meas/instances.hpp"

#include <string>
#include <vector>

namespace meas {

struct RegistryParams {
    int m = 4;
    int window = 4;
};

// Builder names: sym, nsym, qsym, omp{m}, kx, kz, laurent{window}, z2-group,
// z3-group, s3-group, monoid-algebra, monoid-dual, group{table}, monoid{table}.
Bialg build_bialgebra(const HandleSpec& spec);
// Builder names: N, point, pointed{names}, matrix{n}, coalg{of}.
Coalg build_coalgebra(const HandleSpec& spec);

HandleSpec bialgebra_spec(const std::string& name, const RegistryParams& p = {});
HandleSpec coalg_of(const HandleSpec& of);

std::vector<std::string> bialgebra_names();
Bialg bialgebra_by_name(const std::string& name, const RegistryParams& p = {});

// Named coverings, plus identity-<bialgebra> for every bialgebra name.
std::vector<std::string> covering_names();
PartialCovering covering_by_name(const std::string& name, const RegistryParams& p = {});

// f(K, H_k) = [|K| = k] H_k on generators K of OMP, with C the coalgebra N.
// The scaled variant uses k! H_k.
PartialCovering build_omp_covering(AlphabetBound bound, bool scaled = false);

// The monoid {e, a, b} whose dual is not Hopf.
MonoidTable example_monoid();

// f on C = {x, y} and g on D = {z}, both through phi = id, with t(x) = t(y) = z.
struct TwoPointExample {
    PartialCovering f;
    PartialCovering g;
    CoveringMorphism t;
};
TwoPointExample two_point_example(const Bialg& a);

}  // namespace meas
