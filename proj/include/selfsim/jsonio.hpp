#pragma once

#include "json.hpp"

#include "selfsim/blowup.hpp"
#include "selfsim/cellgraph.hpp"

namespace selfsim {

using nlohmann::json;

// JSON mirror of the cell format: {vertices, edges, boundary, cliques}
inline json cell_to_json(const CellGraph& g) {
    json j;
    j["vertices"] = g.n;
    j["edges"] = json::array();
    for (auto [a, b] : g.edges) j["edges"].push_back({a, b});
    j["boundary"] = g.boundary;
    j["cliques"] = g.cliques;
    return j;
}

inline CellGraph cell_from_json(const json& j) {
    CellGraph g;
    try {
        g.n = j.at("vertices").get<int>();
        for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        g.boundary = j.at("boundary").get<std::vector<int>>();
        if (j.contains("cliques")) g.cliques = j.at("cliques").get<std::vector<std::vector<int>>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("cell JSON: ") + e.what());
    }
    validate_cell(g);
    return g;
}

/// Accepts either the plain cell format or its JSON mirror.
inline CellGraph load_cell_any(const std::string& text) {
    size_t i = text.find_first_not_of(" \t\r\n");
    if (i != std::string::npos && text[i] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(std::string("cell JSON: ") + e.what());
        }
        return cell_from_json(j);
    }
    return load_cell_graph(text);
}

// adjacency-JSON of a blow-up: lossless for ids, edges, level sets, origin
inline json blowup_to_json(const BlowupGraph& b, const CellGraph& cell) {
    json j;
    j["vertices"] = b.n_vertices;
    j["edges"] = json::array();
    for (auto [a, c] : b.edge_list(cell)) j["edges"].push_back({a, c});
    j["levels"] = b.levels;
    j["level_sets"] = json::array();
    for (int k = 1; k <= b.levels; ++k) j["level_sets"].push_back(b.level_set(k));
    if (b.origin >= 0)
        j["origin"] = b.origin;
    else
        j["origin"] = nullptr;
    return j;
}

struct BlowupJsonView {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;
    int levels = 0;
    std::vector<std::vector<int>> level_sets;
    int origin = -1;
};

inline BlowupJsonView blowup_from_json(const json& j) {
    BlowupJsonView v;
    try {
        v.vertices = j.at("vertices").get<int>();
        for (const auto& e : j.at("edges")) v.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        v.levels = j.at("levels").get<int>();
        v.level_sets = j.at("level_sets").get<std::vector<std::vector<int>>>();
        if (!j.at("origin").is_null()) v.origin = j.at("origin").get<int>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("blow-up JSON: ") + e.what());
    }
    return v;
}

inline std::string export_graph(const BlowupGraph& b, const CellGraph& cell, GraphFormat fmt) {
    switch (fmt) {
        case GraphFormat::EdgeList: return export_edge_list(b, cell);
        case GraphFormat::CellFormat: return export_cell_format(b, cell);
        case GraphFormat::AdjacencyJson: return blowup_to_json(b, cell).dump(2) + "\n";
    }
    throw InternalError("unreachable");
}

} // namespace selfsim
