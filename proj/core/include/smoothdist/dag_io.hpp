#pragma once

#include <string>

#include "smoothdist/dag.hpp"

namespace smoothdist {

// Versioned JSON snapshot of a built structure.  Only the covering shape of
// each node is written; packing and half-covering scalings, patch shadows,
// and the original-frame polytope are recomputed on load.  Keys are sorted
// and numbers use shortest round-trip form, so equal structures serialize
// to equal bytes.
std::string dag_to_json_text(const DistanceDag& dag);
DistanceDag dag_from_json_text(const std::string& text);

void save_dag(const DistanceDag& dag, const std::string& path);
DistanceDag load_dag(const std::string& path);

}  // namespace smoothdist
