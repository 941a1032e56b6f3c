#include "meas/declaration.hpp"

#include "meas/catalog.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace meas {

using nlohmann::ordered_json;

namespace {

ordered_json spec_json(const HandleSpec& s) {
    ordered_json j;
    j["builder"] = s.builder;
    if (!s.params.empty()) {
        ordered_json p = ordered_json::object();
        for (const auto& [k, v] : s.params) p[k] = v;
        j["params"] = p;
    }
    if (s.of) j["of"] = spec_json(*s.of);
    return j;
}

HandleSpec spec_from(const ordered_json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("builder") || !j["builder"].is_string())
        throw std::invalid_argument(where + ": expected an object with a string \"builder\"");
    HandleSpec s;
    s.builder = j["builder"].get<std::string>();
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw std::invalid_argument(where + ".params: expected an object");
        for (const auto& [k, v] : j["params"].items()) {
            if (v.is_string()) s.params[k] = v.get<std::string>();
            else if (v.is_number_integer()) s.params[k] = std::to_string(v.get<long long>());
            else throw std::invalid_argument(where + ".params." + k + ": expected a string or integer");
        }
    }
    if (j.contains("of")) s.of = std::make_shared<HandleSpec>(spec_from(j["of"], where + ".of"));
    return s;
}

const ordered_json& field(const ordered_json& j, const char* key, const std::string& src) {
    if (!j.contains(key)) throw std::invalid_argument(src + ": missing field \"" + key + "\"");
    return j[key];
}

}  // namespace

std::string declaration_json(const CoveringDeclaration& d) {
    ordered_json j;
    j["name"] = d.name;
    j["B"] = spec_json(d.source.B);
    j["C"] = spec_json(d.source.C);
    j["A"] = spec_json(d.source.A);
    j["mode"] = d.mode == CoveringMode::Decree ? "decree" : "table";
    j["degree_bound"] = d.degree_bound;
    ordered_json rows = ordered_json::array();
    for (const auto& e : d.gen_table)
        rows.push_back(ordered_json{{"b", e.b.render()}, {"c", e.c.render()}, {"value", e.value.render()}});
    j["gen_table"] = rows;
    return j.dump(2) + "\n";
}

CoveringDeclaration parse_declaration(const std::string& text, const std::string& src) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::invalid_argument(src + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument(src + ": expected a JSON object");
    CoveringDeclaration d;
    const auto& name = field(j, "name", src);
    if (!name.is_string()) throw std::invalid_argument(src + ": \"name\" must be a string");
    d.name = name.get<std::string>();
    d.source.B = spec_from(field(j, "B", src), src + ".B");
    d.source.C = spec_from(field(j, "C", src), src + ".C");
    d.source.A = spec_from(field(j, "A", src), src + ".A");
    if (j.contains("mode")) {
        std::string m = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
        if (m == "decree") d.mode = CoveringMode::Decree;
        else if (m == "table") d.mode = CoveringMode::Table;
        else throw std::invalid_argument(src + ": \"mode\" must be \"decree\" or \"table\"");
    }
    if (j.contains("degree_bound")) {
        if (!j["degree_bound"].is_number_integer() || j["degree_bound"].get<int>() < 0)
            throw std::invalid_argument(src + ": \"degree_bound\" must be a non-negative integer");
        d.degree_bound = j["degree_bound"].get<int>();
    }
    const auto& rows = field(j, "gen_table", src);
    if (!rows.is_array()) throw std::invalid_argument(src + ": \"gen_table\" must be an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::string where = src + ".gen_table[" + std::to_string(i) + "]";
        if (!r.is_object()) throw std::invalid_argument(where + ": expected an object");
        try {
            d.gen_table.push_back({parse_key(field(r, "b", where).get<std::string>()),
                                   parse_key(field(r, "c", where).get<std::string>()),
                                   parse_element(field(r, "value", where).get<std::string>())});
        } catch (const ordered_json::type_error&) {
            throw std::invalid_argument(where + ": b, c and value must be strings");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + ": " + e.what());
        }
    }
    return d;
}

CoveringDeclaration load_declaration_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_declaration(ss.str(), path);
}

PartialCovering instantiate(const CoveringDeclaration& d) {
    PartialCovering f;
    f.name = d.name;
    f.B = build_bialgebra(d.source.B);
    f.C = build_coalgebra(d.source.C);
    f.A = build_bialgebra(d.source.A);
    f.mode = d.mode;
    f.degree_bound = d.degree_bound;
    f.source = d.source;
    auto table = std::make_shared<std::map<std::pair<BasisKey, BasisKey>, Element>>();
    for (const auto& e : d.gen_table) {
        if (!f.B->contains(e.b)) throw std::invalid_argument(d.name + ": " + e.b.render() + " is not a key of " + f.B->name);
        if (!f.C->contains(e.c)) throw std::invalid_argument(d.name + ": " + e.c.render() + " is not a key of " + f.C->name);
        for (const auto& [k, c] : e.value.terms())
            if (!f.A->contains(k)) throw std::invalid_argument(d.name + ": " + k.render() + " is not a key of " + f.A->name);
        if (d.mode == CoveringMode::Decree && f.B->is_generator && !f.B->is_generator(e.b))
            throw std::invalid_argument(d.name + ": " + e.b.render() + " is not a generator of " + f.B->name);
        if (!table->emplace(std::make_pair(e.b, e.c), e.value).second)
            throw std::invalid_argument(d.name + ": duplicate entry for (" + e.b.render() + ", " + e.c.render() + ")");
    }
    f.rule = [table](const BasisKey& b, const BasisKey& c) {
        auto it = table->find({b, c});
        return it == table->end() ? Element() : it->second;
    };
    return f;
}

CoveringDeclaration export_declaration(const PartialCovering& f, int N) {
    if (!f.source) throw std::invalid_argument(f.name + " does not record its builders and cannot be exported");
    CoveringDeclaration d;
    d.name = f.name;
    d.source = *f.source;
    d.mode = f.mode;
    d.degree_bound = N;
    auto cs = f.C->keys_upto(N);
    for (const auto& b : f.B->keys_upto(N)) {
        if (f.mode == CoveringMode::Decree && !(f.B->is_generator && f.B->is_generator(b))) continue;
        for (const auto& c : cs) {
            Element v = f.mode == CoveringMode::Decree ? f.rule(b, c) : f.value(b, c);
            if (!v.is_zero()) d.gen_table.push_back({b, c, v});
        }
    }
    return d;
}

}  // namespace meas
