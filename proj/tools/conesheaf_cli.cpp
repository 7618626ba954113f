// Batch verification surface over the conesheaf core: cone classification,
// matrix-family checks and searches, functional calculus, free-group and
// finite-group explorations. All subcommands emit JSON reports with sorted
// keys; fixed seeds make reruns byte-identical (timing field aside).

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "conesheaf/almost.hpp"
#include "conesheaf/cone_analysis.hpp"
#include "conesheaf/groups.hpp"
#include "conesheaf/json_io.hpp"
#include "conesheaf/piecewise.hpp"
#include "conesheaf/words.hpp"

namespace cs = conesheaf;
using cs::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBudget = 1;
constexpr int kExitInput = 2;

struct Options {
  std::uint64_t seed = 0;
  std::uint64_t budget = 10'000'000;
  std::uint64_t trials = 10'000;
  std::uint64_t samples = 10'000;
  unsigned jobs = 1;
  std::string out;
  bool no_timing = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cs::Error(cs::Errc::InvalidInput, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Report {
 public:
  Report(const std::string& command, const Options& opts)
      : start_(std::chrono::steady_clock::now()), opts_(opts) {
    // No jobs echo: reports must be byte-identical at any parallelism.
    body_["schema"] = std::string(cs::kSchemaTag);
    body_["command"] = command;
    body_["seed"] = opts.seed;
    body_["budget"] = opts.budget;
    body_["inputs"] = Json::object();
  }

  void add_input(const std::string& path) {
    body_["inputs"][path] = cs::digest(slurp(path));
  }
  void arg(const std::string& key, const Json& value) { body_["arguments"][key] = value; }
  Json& verdicts() { return body_["verdicts"]; }
  void flag_budget_exhausted() { exit_code_ = kExitBudget; }

  int finish() {
    if (!opts_.no_timing) {
      std::chrono::duration<double, std::milli> elapsed =
          std::chrono::steady_clock::now() - start_;
      body_["wall_time_ms"] = elapsed.count();
    }
    std::string text = cs::render_report(body_);
    if (opts_.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(opts_.out, std::ios::binary);
      out << text;
    }
    return exit_code_;
  }

 private:
  std::chrono::steady_clock::time_point start_;
  Options opts_;
  Json body_;
  int exit_code_ = kExitOk;
};

Json family_json(const cs::CompatibleFamily& fam, const cs::Cone& cone) {
  return cs::to_json(fam, cone);
}

Json em_json(const cs::ConeVerdict& v, const cs::Cone& cone) {
  Json j;
  switch (v.status) {
    case cs::EmStatus::Yes: j["status"] = "YES"; break;
    case cs::EmStatus::No: j["status"] = "NO"; break;
    case cs::EmStatus::Budget: j["status"] = "BUDGET"; break;
  }
  j["apex_points"] = cone.apex().size();
  if (v.status != cs::EmStatus::Budget) j["families"] = v.family_count;
  j["nodes"] = v.nodes;
  if (v.witness) {
    j["witness"]["family"] = family_json(*v.witness, cone);
    j["witness"]["kind"] = v.witness_kind == cs::ConeVerdict::WitnessKind::MissingFamily
                               ? "MISSING_FAMILY"
                               : "DUPLICATED_FAMILY";
    if (!v.duplicate_points.empty()) {
      Json pts = Json::array();
      for (std::size_t x : v.duplicate_points) pts.push_back(cone.apex().label(x));
      j["witness"]["apex_points"] = pts;
    }
  }
  return j;
}

Json directedness_json(const cs::DirectednessVerdict& v) {
  Json j;
  switch (v.status) {
    case cs::DirectednessVerdict::Status::Directed: j["status"] = "DIRECTED"; break;
    case cs::DirectednessVerdict::Status::NotDirected:
      j["status"] = "NOT_DIRECTED";
      break;
    case cs::DirectednessVerdict::Status::Unknown: j["status"] = "UNKNOWN"; break;
  }
  j["note"] = v.note;
  if (v.status == cs::DirectednessVerdict::Status::Directed) {
    Json witness = Json::array();
    for (const auto& per_leg : v.witness) {
      Json cones = Json::array();
      for (const cs::FinMap& g : per_leg) cones.push_back(cs::to_json(g));
      witness.push_back(cones);
    }
    j["witness"] = witness;
  }
  return j;
}

Json noncommuting_json(const cs::NoncommutingWitness& w) {
  Json j;
  j["trial"] = w.trial;
  j["legs"] = Json::array({w.leg_i, w.leg_j});
  j["points"] = Json::array({w.point_i, w.point_j});
  j["commutator_norm"] = w.residual;
  Json members = Json::array();
  for (const cs::PartitionOfUnity& m : w.family.members) members.push_back(cs::to_json(m));
  j["family"] = members;
  return j;
}

Json lift_json(const cs::LiftResult& lift) {
  Json j;
  switch (lift.status) {
    case cs::LiftResult::Status::Ok: j["status"] = "OK"; break;
    case cs::LiftResult::Status::NotCompatible: j["status"] = "NOT_COMPATIBLE"; break;
    case cs::LiftResult::Status::NotSeparating: j["status"] = "NOT_SEPARATING"; break;
    case cs::LiftResult::Status::Noncommuting: j["status"] = "NONCOMMUTING"; break;
    case cs::LiftResult::Status::NotALift: j["status"] = "NOT_A_LIFT"; break;
  }
  if (lift.status == cs::LiftResult::Status::Ok) {
    j["partition"] = cs::to_json(*lift.partition);
    j["residual"] = lift.residual;
  } else if (lift.status == cs::LiftResult::Status::Noncommuting) {
    j["legs"] = Json::array({lift.leg_i, lift.leg_j});
    j["points"] = Json::array({lift.point_i, lift.point_j});
    j["commutator_norm"] = lift.residual;
  } else if (lift.status != cs::LiftResult::Status::NotSeparating) {
    j["residual"] = lift.residual;
  }
  return j;
}

int cmd_cone_analyze(const std::string& file, const Options& opts,
                     const std::vector<std::size_t>& dims) {
  Report report("cone_analyze", opts);
  report.add_input(file);
  cs::Cone cone = cs::parse_cone(cs::load_json_file(file));
  Json& v = report.verdicts();

  v["jointly_injective"] = cs::is_jointly_injective(cone);
  if (cone.size() == 2) {
    v["malcev"] = cs::malcev_check(cone);
  } else {
    v["malcev"] = nullptr;
  }
  cs::SearchLimits limits{opts.budget};
  cs::ConeVerdict em = cs::is_effective_monic(cone, limits);
  v["effective_monic"] = em_json(em, cone);
  if (em.status == cs::EmStatus::Budget) report.flag_budget_exhausted();

  v["locally_injective"] = cs::is_locally_injective(cone);

  cs::DirectedSearchLimits dlimits;
  dlimits.node_budget = opts.budget;
  cs::DirectednessVerdict directed = cs::is_directed(cone, dlimits);
  v["directedness"] = directedness_json(directed);

  if (em.status == cs::EmStatus::Yes) {
    cs::GuaranteeSearchParams params;
    params.dims = dims;
    params.trials = opts.trials;
    params.seed = opts.seed;
    params.jobs = opts.jobs;
    cs::GuaranteeVerdict g = cs::classify_guarantee(cone, params);
    Json gj;
    switch (g.status) {
      case cs::GuaranteeVerdict::Status::Guaranteed: gj["status"] = "GUARANTEED"; break;
      case cs::GuaranteeVerdict::Status::Refuted: gj["status"] = "REFUTED"; break;
      case cs::GuaranteeVerdict::Status::Unknown:
        gj["status"] = "UNKNOWN";
        gj["note"] =
            "no certificate and no refutation within the sampled trials; "
            "sample-based evidence, not a proof";
        break;
    }
    gj["dims"] = dims;
    gj["trials"] = opts.trials;
    if (g.refutation) gj["witness"] = noncommuting_json(*g.refutation);
    v["guarantee"] = gj;
  } else {
    v["guarantee"] = Json{{"status", "NOT_EFFECTIVE_MONIC"}};
  }
  return report.finish();
}

int cmd_cone_refine(const std::string& file, const std::string& quotient_file,
                    const Options& opts, std::size_t max_codomain,
                    std::size_t max_legs, bool directed) {
  Report report("cone_refine", opts);
  report.add_input(file);
  report.add_input(quotient_file);
  report.arg("max_codomain", max_codomain);
  report.arg("max_legs", max_legs);
  report.arg("directed", directed);

  cs::Cone cone = cs::parse_cone(cs::load_json_file(file));
  Json qj = cs::load_json_file(quotient_file);
  cs::FinMap h = cs::parse_finmap(qj, {cone.apex()});

  cs::RefinementLimits limits;
  limits.max_codomain = max_codomain;
  limits.max_legs = max_legs;
  limits.require_directed = directed;
  limits.node_budget = opts.budget;
  limits.jobs = opts.jobs;
  cs::RefinementResult r = cs::search_refinement(cone, h, limits);

  Json& v = report.verdicts();
  switch (r.status) {
    case cs::RefinementResult::Status::Found: v["status"] = "FOUND"; break;
    case cs::RefinementResult::Status::Self: v["status"] = "SELF"; break;
    case cs::RefinementResult::Status::None: v["status"] = "NONE"; break;
    case cs::RefinementResult::Status::Budget: v["status"] = "BUDGET"; break;
  }
  if (r.witness) v["witness"] = cs::to_json(*r.witness);
  v["certificate"] = Json{{"candidate_partitions", r.candidate_partitions},
                          {"sets_examined", r.sets_examined},
                          {"max_codomain", max_codomain},
                          {"max_legs", max_legs},
                          {"requested_class",
                           directed ? "directed_effective_monic" : "effective_monic"}};
  if (r.status == cs::RefinementResult::Status::Budget) report.flag_budget_exhausted();
  return report.finish();
}

int cmd_mat_check(const std::string& file, const Options& opts) {
  Report report("mat_check", opts);
  report.add_input(file);
  cs::MatrixFamily fam = cs::parse_matrix_family(cs::load_json_file(file));
  Json& v = report.verdicts();

  cs::CompatibilityResult compat = cs::check_compatibility(fam);
  v["compatible"] = compat.compatible;
  if (!compat.compatible) {
    v["violation"] = Json{{"legs", Json::array({compat.leg_i, compat.leg_j})},
                          {"residual", compat.residual}};
  }
  v["lift"] = lift_json(cs::lift_family(fam));
  return report.finish();
}

int cmd_mat_search(const std::string& file, const Options& opts, std::size_t dim) {
  Report report("mat_search", opts);
  report.add_input(file);
  report.arg("dim", dim);
  report.arg("trials", opts.trials);
  cs::Cone cone = cs::parse_cone(cs::load_json_file(file));

  cs::NoncommutingSearchParams params;
  params.dim = dim;
  params.trials = opts.trials;
  params.seed = opts.seed;
  params.jobs = opts.jobs;
  auto witness = cs::search_noncommuting_family(cone, params);

  Json& v = report.verdicts();
  v["witness_found"] = witness.has_value();
  if (witness) {
    v["witness"] = noncommuting_json(*witness);
  } else {
    v["note"] = "no witness within the sampled trials; not a proof of absence";
  }
  return report.finish();
}

int cmd_fc_apply(const std::string& file, const Options& opts) {
  Report report("fc_apply", opts);
  report.add_input(file);
  Json j = cs::load_json_file(file);
  cs::NormalMatrix alpha(cs::parse_matrix(j.at("matrix")));

  const Json& fn = j.at("function");
  std::string type = fn.at("type").get<std::string>();
  cs::NormalMatrix result = [&] {
    if (type == "identity") {
      return cs::apply_function(alpha, [](cs::Complex z) { return z; });
    }
    if (type == "square") {
      return cs::apply_function(alpha, [](cs::Complex z) { return z * z; });
    }
    if (type == "conjugate") {
      return cs::apply_function(alpha, [](cs::Complex z) { return std::conj(z); });
    }
    if (type == "table") {
      return cs::apply_function(alpha, cs::parse_spectrum_table(fn.at("pairs")));
    }
    throw cs::Error(cs::Errc::InvalidInput, "unknown function type \"" + type + "\"");
  }();

  Json& v = report.verdicts();
  v["result"] = cs::to_json(result.get());
  cs::SpectralDecomposition dec = cs::spectral_decompose(alpha);
  Json spectrum = Json::array();
  for (cs::Complex lambda : dec.eigenvalues) {
    spectrum.push_back(Json::array({lambda.real(), lambda.imag()}));
  }
  v["input_spectrum"] = spectrum;
  return report.finish();
}

int cmd_group_zeta(const std::string& word, const Options& opts) {
  Report report("group_zeta", opts);
  report.arg("word", word);
  cs::FreeWord w = cs::FreeWord::parse(word);
  Json& v = report.verdicts();
  v["reduced"] = w.str();
  v["cyclic"] = cs::cyclic_reduce(w).str();
  v["zeta"] = cs::zeta(w);
  return report.finish();
}

int cmd_group_verify(const Options& opts) {
  Report report("group_verify", opts);
  report.arg("samples", opts.samples);
  cs::ZetaReport r = cs::verify_zeta_counterexample(opts.samples, opts.seed);
  Json& v = report.verdicts();
  v["power_law"] = Json{{"pass", r.power_law_pass}, {"samples", r.power_law_samples}};
  v["conjugation_invariance"] =
      Json{{"pass", r.conjugation_invariance_pass}, {"samples", r.conjugation_samples}};
  v["inversion_antisymmetry"] = Json{{"pass", r.inversion_antisymmetry_pass}};
  v["additivity_failure"] = Json{{"zeta_a", r.zeta_a},
                                 {"zeta_b", r.zeta_b},
                                 {"zeta_ab", r.zeta_ab},
                                 {"not_a_homomorphism", r.not_additive}};
  v["all_pass"] = r.all_pass();
  v["note"] = "sampled properties are evidence on the seeded words, not a proof";
  return report.finish();
}

int cmd_group_explore(const std::string& file, const Options& opts) {
  Report report("group_explore", opts);
  report.add_input(file);
  cs::FiniteGroup g = cs::parse_cayley(cs::load_json_file(file));
  cs::AlmostEndoResult r = cs::enumerate_almost_endos(g, opts.budget);

  Json& v = report.verdicts();
  v["order"] = g.order();
  v["complete"] = r.complete;
  v["nodes"] = r.nodes;
  Json endos = Json::array();
  std::size_t hom_count = 0;
  for (const cs::AlmostEndoEntry& e : r.entries) {
    Json table = Json::object();
    for (std::size_t x = 0; x < g.order(); ++x) {
      table[g.labels()[x]] = g.labels()[e.table[x]];
    }
    endos.push_back(Json{{"map", table},
                         {"classification", e.group_hom ? "IS_GROUP_HOM" : "NOT_GROUP_HOM"}});
    hom_count += e.group_hom ? 1 : 0;
  }
  v["almost_endomorphisms"] = endos;
  v["count"] = r.entries.size();
  v["group_hom_count"] = hom_count;
  if (!r.complete) report.flag_budget_exhausted();
  return report.finish();
}

int cmd_ks_search(const std::string& file, const Options& opts, bool count_all) {
  Report report("ks_search", opts);
  report.add_input(file);
  report.arg("count_all", count_all);
  cs::RaySystem rays = cs::parse_ray_system(cs::load_json_file(file));
  cs::KsLimits limits;
  limits.node_budget = opts.budget;
  limits.count_all = count_all;
  cs::KsResult r = cs::ks_assignment_search(rays, limits);

  Json& v = report.verdicts();
  switch (r.status) {
    case cs::KsResult::Status::Sat: v["status"] = "SAT"; break;
    case cs::KsResult::Status::Unsat: v["status"] = "UNSAT"; break;
    case cs::KsResult::Status::Budget: v["status"] = "BUDGET"; break;
  }
  v["nodes"] = r.nodes;
  if (r.status == cs::KsResult::Status::Sat) {
    v["assignment"] = r.assignment;
    if (count_all) v["solutions"] = r.solutions;
  }
  if (r.status == cs::KsResult::Status::Budget) report.flag_budget_exhausted();
  return report.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite cone-sheaf and matrix functional-calculus verifier"};
  app.require_subcommand(1);

  Options opts;
  app.add_option("--seed", opts.seed, "PRNG seed for all randomized checks");
  app.add_option("--budget", opts.budget, "node budget for exhaustive searches");
  app.add_option("--trials", opts.trials, "trial count for randomized searches");
  app.add_option("--samples", opts.samples, "sample count for property checks");
  app.add_option("--jobs", opts.jobs, "worker threads (results are jobs-invariant)");
  app.add_option("--out", opts.out, "write the report to a file instead of stdout");
  app.add_flag("--no-timing", opts.no_timing, "omit wall_time_ms from the report");

  std::string file, quotient_file, word;
  std::size_t dim = 2, max_codomain = 4, max_legs = 6;
  std::vector<std::size_t> dims = {2, 3};
  bool directed = false, count_all = false;

  CLI::App* analyze = app.add_subcommand("cone_analyze", "classify a cone");
  analyze->add_option("file", file, "cone JSON")->required();
  analyze->add_option("--dims", dims, "matrix dimensions for the guarantee search");

  CLI::App* refine = app.add_subcommand("cone_refine", "search for refinements");
  refine->add_option("file", file, "cone JSON")->required();
  refine->add_option("--quotient", quotient_file, "quotient map JSON")->required();
  refine->add_option("--max-codomain", max_codomain, "codomain size bound");
  refine->add_option("--max-legs", max_legs, "cone size bound");
  refine->add_flag("--directed", directed, "require a directed refinement");

  CLI::App* check = app.add_subcommand("mat_check", "compatibility and lift");
  check->add_option("file", file, "matrix family JSON")->required();

  CLI::App* search = app.add_subcommand("mat_search", "noncommuting-family search");
  search->add_option("file", file, "cone JSON")->required();
  search->add_option("--dim", dim, "matrix dimension");

  CLI::App* fc = app.add_subcommand("fc_apply", "univariate functional calculus");
  fc->add_option("file", file, "matrix + function JSON")->required();

  CLI::App* gz = app.add_subcommand("group_zeta", "evaluate the cyclic pair count");
  gz->add_option("word", word, "word over {a, A, b, B}")->required();

  app.add_subcommand("group_verify", "check the counterexample properties");

  CLI::App* ge = app.add_subcommand("group_explore", "enumerate almost endomorphisms");
  ge->add_option("file", file, "Cayley table JSON")->required();

  CLI::App* ks = app.add_subcommand("ks_search", "noncontextual assignment search");
  ks->add_option("file", file, "ray system JSON")->required();
  ks->add_flag("--count-all", count_all, "count all satisfying assignments");

  // Global options may follow the subcommand.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_cone_analyze(file, opts, dims);
    if (refine->parsed()) {
      return cmd_cone_refine(file, quotient_file, opts, max_codomain, max_legs,
                             directed);
    }
    if (check->parsed()) return cmd_mat_check(file, opts);
    if (search->parsed()) return cmd_mat_search(file, opts, dim);
    if (fc->parsed()) return cmd_fc_apply(file, opts);
    if (gz->parsed()) return cmd_group_zeta(word, opts);
    if (app.get_subcommand("group_verify")->parsed()) return cmd_group_verify(opts);
    if (ge->parsed()) return cmd_group_explore(file, opts);
    if (ks->parsed()) return cmd_ks_search(file, opts, count_all);
  } catch (const cs::Error& e) {
    std::cerr << "error [" << cs::to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == cs::Errc::SearchBudgetExceeded ? kExitBudget : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
