#include "conesheaf/json_io.hpp"

#include <fstream>
#include <sstream>

namespace conesheaf {

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::InvalidInput, "cannot open file: " + path);
  }
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidInput, path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != kSchemaTag) {
    throw Error(Errc::InvalidInput,
                path + ": missing or unsupported \"schema\" header, expected \"" +
                    std::string(kSchemaTag) + "\"");
  }
  return j;
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(Errc::InvalidInput, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

Complex parse_complex(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(Errc::InvalidInput, "complex values are [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

FinSpace parse_finspace(const Json& j) {
  std::vector<std::string> points;
  for (const Json& p : field(j, "points")) {
    if (!p.is_string()) throw Error(Errc::InvalidInput, "point labels are strings");
    points.push_back(p.get<std::string>());
  }
  return FinSpace(field(j, "name").get<std::string>(), std::move(points));
}

FinMap parse_finmap(const Json& j, const std::vector<FinSpace>& scope) {
  auto resolve = [&](const Json& ref) -> FinSpace {
    if (ref.is_object()) return parse_finspace(ref);
    if (ref.is_string()) {
      for (const FinSpace& s : scope) {
        if (s.name() == ref.get<std::string>()) return s;
      }
      throw Error(Errc::InvalidInput,
                  "unknown space name \"" + ref.get<std::string>() + "\"");
    }
    throw Error(Errc::InvalidInput, "space reference must be a name or an object");
  };
  FinSpace domain = resolve(field(j, "domain"));
  FinSpace codomain = resolve(field(j, "codomain"));
  const Json& table = field(j, "map");
  if (!table.is_object()) {
    throw Error(Errc::InvalidInput, "\"map\" must be an object point -> point");
  }
  std::vector<std::size_t> assignment(domain.size(), codomain.size());
  for (const auto& [key, value] : table.items()) {
    auto from = domain.index_of(key);
    if (!from) {
      throw Error(Errc::InvalidInput, "map key \"" + key + "\" is not a domain point");
    }
    if (!value.is_string()) {
      throw Error(Errc::InvalidInput, "map values are point labels");
    }
    auto to = codomain.index_of(value.get<std::string>());
    if (!to) {
      throw Error(Errc::InvalidInput, "map value \"" + value.get<std::string>() +
                                          "\" is not a codomain point");
    }
    assignment[*from] = *to;
  }
  for (std::size_t x = 0; x < domain.size(); ++x) {
    if (assignment[x] == codomain.size()) {
      throw Error(Errc::InvalidInput,
                  "map is not total: no image for \"" + domain.label(x) + "\"");
    }
  }
  return FinMap(std::move(domain), std::move(codomain), std::move(assignment));
}

Cone parse_cone(const Json& j) {
  FinSpace apex = parse_finspace(field(j, "apex"));
  std::vector<FinSpace> scope{apex};
  if (j.contains("spaces")) {
    for (const Json& s : j.at("spaces")) scope.push_back(parse_finspace(s));
  }
  std::vector<FinMap> legs;
  for (const Json& leg : field(j, "legs")) {
    legs.push_back(parse_finmap(leg, scope));
    if (!legs.back().domain().same_points(apex)) {
      throw Error(Errc::InvalidInput, "cone leg domain differs from apex");
    }
  }
  if (legs.empty()) return Cone::empty_cone(std::move(apex));
  return Cone(std::move(apex), std::move(legs));
}

CMatrix parse_matrix(const Json& j) {
  const std::size_t dim = field(j, "dim").get<std::size_t>();
  const Json& entries = field(j, "entries");
  if (!entries.is_array() || entries.size() != dim) {
    throw Error(Errc::InvalidInput, "matrix entries must be dim rows");
  }
  CMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const Json& row = entries[r];
    if (!row.is_array() || row.size() != dim) {
      throw Error(Errc::InvalidInput, "matrix rows must have dim entries");
    }
    for (std::size_t c = 0; c < dim; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_complex(row[c]);
    }
  }
  return m;
}

PartitionOfUnity parse_partition(const Json& j, const FinSpace& space,
                                 const Tolerances& tols) {
  const Json& projections = field(j, "projections");
  if (!projections.is_object()) {
    throw Error(Errc::InvalidInput, "\"projections\" must map points to matrices");
  }
  std::vector<CMatrix> mats(space.size());
  std::vector<char> seen(space.size(), 0);
  for (const auto& [key, value] : projections.items()) {
    auto idx = space.index_of(key);
    if (!idx) {
      throw Error(Errc::InvalidInput,
                  "projection key \"" + key + "\" is not a point of " + space.name());
    }
    mats[*idx] = parse_matrix(value);
    seen[*idx] = 1;
  }
  for (std::size_t p = 0; p < space.size(); ++p) {
    if (!seen[p]) {
      throw Error(Errc::InvalidInput,
                  "missing projection for point \"" + space.label(p) + "\"");
    }
  }
  return PartitionOfUnity(space, std::move(mats), tols);
}

MatrixFamily parse_matrix_family(const Json& j, const Tolerances& tols) {
  Cone cone = parse_cone(field(j, "cone"));
  const Json& members = field(j, "members");
  if (!members.is_array() || members.size() != cone.size()) {
    throw Error(Errc::InvalidInput, "family needs one member per cone leg");
  }
  std::vector<PartitionOfUnity> parsed;
  for (std::size_t i = 0; i < cone.size(); ++i) {
    parsed.push_back(parse_partition(members[i], cone.leg(i).codomain(), tols));
  }
  return MatrixFamily{std::move(cone), std::move(parsed)};
}

FiniteGroup parse_cayley(const Json& j) {
  const std::size_t order = field(j, "order").get<std::size_t>();
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const Json& l : j.at("labels")) labels.push_back(l.get<std::string>());
  } else {
    for (std::size_t i = 0; i < order; ++i) labels.push_back(std::to_string(i));
  }
  const Json& table = field(j, "table");
  if (!table.is_array() || table.size() != order) {
    throw Error(Errc::InvalidInput, "Cayley table must have `order` rows");
  }
  std::vector<std::vector<std::size_t>> rows;
  for (const Json& row : table) {
    rows.push_back(row.get<std::vector<std::size_t>>());
  }
  return FiniteGroup(std::move(labels), std::move(rows));
}

RaySystem parse_ray_system(const Json& j) {
  RaySystem rays;
  rays.dim = field(j, "dim").get<std::size_t>();
  for (const Json& ray : field(j, "rays")) {
    Eigen::VectorXcd v(rays.dim);
    if (!ray.is_array() || ray.size() != rays.dim) {
      throw Error(Errc::InvalidInput, "each ray needs dim components");
    }
    for (std::size_t c = 0; c < rays.dim; ++c) {
      v(static_cast<Eigen::Index>(c)) = parse_complex(ray[c]);
    }
    rays.rays.push_back(std::move(v));
  }
  for (const Json& basis : field(j, "bases")) {
    rays.bases.push_back(basis.get<std::vector<std::size_t>>());
  }
  return rays;
}

SpectrumTable parse_spectrum_table(const Json& j) {
  SpectrumTable table;
  if (!j.is_array()) {
    throw Error(Errc::InvalidInput, "spectrum table must be an array of pairs");
  }
  for (const Json& row : j) {
    if (!row.is_array() || row.size() != 2) {
      throw Error(Errc::InvalidInput, "table rows are [point, value] pairs");
    }
    table.emplace_back(parse_complex(row[0]), parse_complex(row[1]));
  }
  return table;
}

Json to_json(const FinSpace& s) {
  return Json{{"name", s.name()}, {"points", s.points()}};
}

Json to_json(const FinMap& m) {
  Json table = Json::object();
  for (std::size_t x = 0; x < m.domain().size(); ++x) {
    table[m.domain().label(x)] = m.codomain().label(m.apply(x));
  }
  return Json{{"domain", to_json(m.domain())},
              {"codomain", to_json(m.codomain())},
              {"map", table}};
}

Json to_json(const Cone& c) {
  Json legs = Json::array();
  for (const FinMap& leg : c.legs()) legs.push_back(to_json(leg));
  return Json{{"apex", to_json(c.apex())}, {"legs", legs}};
}

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return Json{{"dim", m.rows()}, {"entries", rows}};
}

Json to_json(const PartitionOfUnity& p) {
  Json projections = Json::object();
  for (std::size_t pt = 0; pt < p.space().size(); ++pt) {
    projections[p.space().label(pt)] = to_json(p.projection(pt));
  }
  return Json{{"space", p.space().name()}, {"projections", projections}};
}

Json to_json(const CompatibleFamily& fam, const Cone& cone) {
  Json picks = Json::array();
  for (std::size_t i = 0; i < fam.picks.size(); ++i) {
    picks.push_back(cone.leg(i).codomain().label(fam.picks[i]));
  }
  return picks;
}

std::string render_report(const Json& report) {
  return report.dump(2) + "\n";
}

}  // namespace conesheaf
