#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "conesheaf/finspace.hpp"
#include "conesheaf/groups.hpp"
#include "conesheaf/matstar.hpp"
#include "conesheaf/piecewise.hpp"

namespace conesheaf {

using Json = nlohmann::json;

inline constexpr std::string_view kSchemaTag = "conesheaf/1";

/// FNV-1a 64-bit over raw bytes, rendered as "fnv1a64:<hex>".
std::string digest(std::string_view bytes);

/// Loads a file and checks the "schema" header. Throws InvalidInput on a
/// missing file, malformed JSON or schema mismatch.
Json load_json_file(const std::string& path);

// Parsers; all throw InvalidInput with a description on malformed data.
FinSpace parse_finspace(const Json& j);
/// Maps reference spaces by name or carry them inline; `resolve` supplies
/// the named spaces in scope (apex and cone spaces).
FinMap parse_finmap(const Json& j, const std::vector<FinSpace>& scope);
Cone parse_cone(const Json& j);
CMatrix parse_matrix(const Json& j);
PartitionOfUnity parse_partition(const Json& j, const FinSpace& space,
                                 const Tolerances& tols = {});
MatrixFamily parse_matrix_family(const Json& j, const Tolerances& tols = {});
FiniteGroup parse_cayley(const Json& j);
RaySystem parse_ray_system(const Json& j);
SpectrumTable parse_spectrum_table(const Json& j);

// Serializers (canonical forms; objects keep sorted keys).
Json to_json(const FinSpace& s);
Json to_json(const FinMap& m);
Json to_json(const Cone& c);
Json to_json(const CMatrix& m);
Json to_json(const PartitionOfUnity& p);
Json to_json(const CompatibleFamily& fam, const Cone& cone);

/// Pretty-printed with sorted keys and a trailing newline; the canonical
/// report rendering whose bytes reruns must reproduce.
std::string render_report(const Json& report);

}  // namespace conesheaf
