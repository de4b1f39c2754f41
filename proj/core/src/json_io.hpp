#pragma once
// Internal glue between domain structs and nlohmann::json. Not installed;
// the public surface returns strings (see report.hpp).

#include <json.hpp>

#include "marketdef/cla.hpp"
#include "marketdef/clustering.hpp"
#include "marketdef/concentration.hpp"

namespace marketdef::detail {

using json = nlohmann::json; // std::map keys, so dumps are lexicographic

json cluster_to_json(const ClusterAssignment& a);
json kselection_to_json(const KSelectionReport& r);
json verdict_to_json(const ClaVerdict& v);
json screening_to_json(const ScreeningReport& r);

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace marketdef::detail
