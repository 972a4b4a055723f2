#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "ggeval/graph.hpp"

namespace ggeval {

// One JSON object per line:
//   {"edges":[[u,v],...],"label":int,"n":int,"provenance":{...}}
// Keys serialize alphabetically, u < v, so equal sets give equal bytes.

inline nlohmann::json provenance_to_json(const Provenance& p) {
    nlohmann::json j;
    j["generator"] = p.generator;
    j["params"] = p.params;
    j["seed"] = p.seed;
    return j;
}

inline Provenance provenance_from_json(const nlohmann::json& j) {
    Provenance p;
    p.generator = j.value("generator", std::string{});
    if (j.contains("params"))
        for (const auto& [key, value] : j.at("params").items()) p.params[key] = value.get<double>();
    p.seed = j.value("seed", std::uint64_t{0});
    return p;
}

inline void write_graphset(const GraphSet& gs, std::ostream& out) {
    const nlohmann::json prov = provenance_to_json(gs.provenance);
    for (const auto& g : gs.graphs) {
        nlohmann::json j;
        j["label"] = gs.label;
        j["n"] = g.n;
        j["edges"] = g.edges;
        j["provenance"] = prov;
        out << j.dump() << '\n';
    }
}

inline void write_graphset(const GraphSet& gs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("write_graphset: cannot open '" + path + "' for writing");
    write_graphset(gs, out);
    out.flush();
    if (!out) throw ValidationError("write_graphset: write failed for '" + path + "'");
}

inline GraphSet read_graphset(std::istream& in, const std::string& name = "<stream>") {
    GraphSet gs;
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(name + ": malformed JSON at line " + std::to_string(line_no) + ": " + e.what());
        }
        auto require = [&](const char* field) -> const nlohmann::json& {
            if (!j.contains(field))
                throw ValidationError(name + ": missing field '" + field + "' at line " + std::to_string(line_no));
            return j.at(field);
        };
        const int label = require("label").get<int>();
        const int n = require("n").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& pair : require("edges")) {
            if (!pair.is_array() || pair.size() != 2)
                throw ValidationError(name + ": field 'edges' entry is not a pair at line " +
                                      std::to_string(line_no));
            const int u = pair[0].get<int>();
            const int v = pair[1].get<int>();
            if (u == v)
                throw ValidationError(name + ": self-loop at line " + std::to_string(line_no));
            edges.emplace_back(u, v);
        }
        Graph g;
        try {
            g = make_graph(n, std::move(edges));
        } catch (const ValidationError& e) {
            throw ValidationError(name + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        if (first) {
            gs.label = label;
            if (j.contains("provenance")) gs.provenance = provenance_from_json(j.at("provenance"));
            first = false;
        } else if (label != gs.label) {
            throw ValidationError(name + ": mixed labels in one set, field 'label' at line " +
                                  std::to_string(line_no));
        }
        gs.graphs.push_back(std::move(g));
    }
    if (gs.graphs.empty()) throw ValidationError(name + ": empty graph set");
    return gs;
}

inline GraphSet read_graphset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("read_graphset: cannot open '" + path + "'");
    return read_graphset(in, path);
}

} // namespace ggeval
