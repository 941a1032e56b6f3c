#pragma once

#include "meas/covering.hpp"

#include <string>
#include <vector>

namespace meas {

struct TableEntry {
    BasisKey b;
    BasisKey c;
    Element value;
};

// On-disk form of a covering:
// {"name": ..., "B": spec, "C": spec, "A": spec, "mode": "decree" | "table",
//  "degree_bound": N, "gen_table": [{"b": key, "c": key, "value": element}, ...]}
// with spec = {"builder": ..., "params": {...}, "of": spec}. Entries absent from the
// table are zero.
struct CoveringDeclaration {
    std::string name;
    CoveringSource source;
    CoveringMode mode = CoveringMode::Decree;
    int degree_bound = 6;
    std::vector<TableEntry> gen_table;
};

std::string declaration_json(const CoveringDeclaration& d);
// Throws std::invalid_argument naming the source and the offending field.
CoveringDeclaration parse_declaration(const std::string& text, const std::string& source = "<string>");
CoveringDeclaration load_declaration_file(const std::string& path);

PartialCovering instantiate(const CoveringDeclaration& d);
// Tabulates generators of B (all keys in table mode) against C keys up to N.
// Throws if the covering does not record its builders.
CoveringDeclaration export_declaration(const PartialCovering& f, int N);

}  // namespace meas
