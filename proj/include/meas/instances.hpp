#pragma once

#include "meas/hopf.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace meas {

struct MonoidTable {
    std::string name;
    std::vector<std::string> elements;
    std::string identity;
    std::map<std::pair<std::string, std::string>, std::string> table;

    const std::string& mul(const std::string& x, const std::string& y) const;
    // Throws std::invalid_argument naming the offending entry.
    void validate() const;
    bool is_group() const;
    bool is_commutative() const;
    std::string inverse(const std::string& x) const;
};

// {"elements": [...], "identity": "...", "table": {"x": {"y": "xy", ...}, ...}}
MonoidTable load_monoid_table(const std::string& json_text, const std::string& source = "<string>");
MonoidTable load_monoid_file(const std::string& path);
std::string monoid_table_json(const MonoidTable& t);

MonoidTable cyclic_group(int n);
MonoidTable symmetric_group_s3();
// {e, a, b} with xy = y on {a, b}.
MonoidTable right_zero_monoid();

struct AlphabetBound {
    int max_letter = 4;
};

Bialg build_sym();
Bialg build_nsym();
Bialg build_qsym();
Bialg build_omp(AlphabetBound bound);
Bialg build_poly_primitive();
Bialg build_poly_point();
Bialg build_laurent_point(int window);
Bialg build_monoid_algebra(const MonoidTable& t);
Bialg build_group_algebra(const MonoidTable& t);
Bialg build_monoid_dual(const MonoidTable& t);
Coalg build_matrix_coalgebra(int n);
Coalg build_pointed_coalgebra(const std::vector<std::string>& names);
Coalg build_nsym_coalgebra_N();
// The ground field as a coalgebra with one grouplike.
Coalg build_point();

}  // namespace meas
