#pragma once
// Canonical JSON serialization for analysis results: object keys ordered
// lexicographically, numbers in shortest round-trip form, two-space indent.
// Identical values always produce identical bytes.

#include <string>

#include "marketdef/cla.hpp"
#include "marketdef/clustering.hpp"
#include "marketdef/concentration.hpp"

namespace marketdef {

std::string to_json(const ClusterAssignment& a);
std::string to_json(const KSelectionReport& r);
std::string to_json(const ClaVerdict& v);
std::string to_json(const ScreeningReport& r);

// FNV-1a 64-bit digest in hex; the provenance fingerprint for input files.
std::string fnv1a_hex(const std::string& bytes);

} // namespace marketdef
