#pragma once

#include <string>
#include <vector>

#include "gfp/graph_store.hpp"

namespace gfp::testing {

inline Transaction tx(std::string id, std::string src, std::string dst, Timestamp ts,
                      std::vector<double> attrs = {}) {
    return Transaction{std::move(id), std::move(src), std::move(dst), ts, std::move(attrs)};
}

inline VertexId vid(const GraphStore& g, const std::string& key) { return g.find_vertex(key).value(); }

}  // namespace gfp::testing
