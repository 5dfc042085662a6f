#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "blpp/continuum_ic.hpp"
#include "blpp/discrete_model.hpp"
#include "blpp/records.hpp"
#include "blpp/scaling.hpp"
#include "json.hpp"

namespace blpp {

// One fully resolved experiment. Every field has an explicit default and the
// echoed config in the output record lists all of them, so a record is
// rerunnable without knowing which defaults were in force when it was made.
struct ExperimentConfig {
  std::string id = "run";

  // model
  double q = 0.5;
  double theta = 0.5;
  int m = 1;
  int N = 100;  // lattice size (mc-glpp, scaling checks)

  // event: times and thresholds. t.size() == a.size() asks for the joint
  // probability at one threshold vector; a single t with several a sweeps the
  // one-time distribution function. Same convention on (n, a) for the
  // discrete chain; empty n defaults to round(N t).
  std::vector<double> t{1.0};
  std::vector<double> a{0.0};
  std::vector<int> n;

  // initial data
  std::string ic = "narrow_wedge";  // narrow_wedge | flat | piecewise_linear
  double level = 0.0;
  std::vector<double> knot_t, knot_v;

  // continuum quadrature
  int nodes = 0;  // 0: ladder from the solver default; else starting count
  int max_nodes = 256;
  double length = 12.0;
  double tol = 1e-4;

  // discrete window
  long window = 32;
  long max_window = 512;
  double window_tol = 1e-8;

  // sampling
  uint64_t samples = 100000;
  double mesh = 1e-3;
  int workers = 0;  // 0: read BLPP_WORKERS

  // scaling checks
  std::vector<int> Ns{100, 400, 1600};
  int lemma = 0;  // 0: every family; 1..4: one limit

  // kernel-eval probe
  std::string kernel = "s_mt";  // s_mt | heat | s_hypo | k_extended |
                                // s_star | s_bar | q_pow | r_pm | k_geometric
  double s = 0.0;               // earlier time (continuum kernels)
  double x = 0.0, y = 0.0;      // continuum coordinates
  long z1 = 0, z2 = 0;          // lattice coordinates
  int n1 = 0, n2 = 1;           // lattice times

  uint64_t seed = 1;
  std::string out = "out";
  bool quick = false;  // shrink sample counts / grids to smoke-test size

  void validate() const;
};

// strict parse: unknown keys and mistyped values are errors
ExperimentConfig config_from_json(const nlohmann::json& j);
// full echo, every default explicit (round-trips through config_from_json)
nlohmann::json config_echo(const ExperimentConfig& c);

ContinuumIC make_ic(const ExperimentConfig& c);
GeomParams geom_params(const ExperimentConfig& c);

// one runner's output: the record payload plus any tables it wants on disk
struct RunOutput {
  std::string kind;
  nlohmann::json data;
  std::vector<CsvTable> tables;
};

RunOutput run_kernel_eval(const ExperimentConfig& c);
RunOutput run_fredholm_discrete(const ExperimentConfig& c);
RunOutput run_fredholm_continuum(const ExperimentConfig& c);
RunOutput run_mc_blpp(const ExperimentConfig& c);
RunOutput run_mc_glpp(const ExperimentConfig& c);
RunOutput run_gue_oracle(const ExperimentConfig& c);
RunOutput run_lemma_check(const ExperimentConfig& c);
RunOutput run_product_check(const ExperimentConfig& c);

// the standard probe grids behind lemma-check / product-check defaults and
// validate-all; chosen inside the limits' validity zones (step data for the
// composed kernel, probes off kernel nodes) so the observed rates mean
// something
struct LemmaFamily {
  std::string name;
  int lemma = 0;
  ContinuumIC ic = ContinuumIC::narrow_wedge();
  std::vector<LemmaProbe> probes;
};
std::vector<LemmaFamily> standard_lemma_families();
std::vector<LemmaProbe> standard_product_grid();  // step data, well conditioned
// flat-data probe whose composed sum cancels catastrophically past N ~ 100;
// exercises the reliability flag rather than the rate
LemmaProbe embedded_product_probe();

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double runtime_sec = 0.0;
};

// cross-validation suite: determinants against enumeration, samplers and
// closed forms, kernels against their oracles, limits against their rates,
// plus determinism of the record stream. quick shrinks everything to smoke
// size; the full run mirrors the acceptance gates.
std::vector<CheckResult> run_validate_all(const ExperimentConfig& c);

}  // namespace blpp
