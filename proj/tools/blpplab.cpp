#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blpp/experiments.hpp"
#include "blpp/records.hpp"
#include "json.hpp"

using namespace blpp;
using nlohmann::json;

namespace {

struct CliValues {
  std::string config_path;
  std::string out;
  uint64_t seed = 0;
  uint64_t samples = 0;
  int nodes = 0;
  int scale = 0;
  bool quick = false;
};

void add_common_flags(CLI::App* sub, CliValues& v) {
  sub->add_option("--config", v.config_path, "JSON config file (defaults apply to absent keys)");
  sub->add_option("--seed", v.seed, "base RNG seed (64-bit)");
  sub->add_option("--out", v.out, "output directory for records.jsonl and CSV tables");
  sub->add_flag("--quick", v.quick, "shrink sample counts and grids to smoke-test size");
  sub->add_option("--samples", v.samples, "Monte Carlo sample count");
  sub->add_option("--nodes", v.nodes, "starting quadrature node count");
  sub->add_option("--scale", v.scale, "lattice size N");
}

// per-point console lines so a run is legible without opening the record
void print_points(const json& data) {
  if (!data.contains("points")) return;
  for (const auto& pt : data["points"]) {
    std::string a;
    for (const auto& v : pt["a"]) {
      if (!a.empty()) a += ", ";
      a += fmt17(v.get<double>());
    }
    std::printf("  P[a = %s] = %.6f", a.c_str(), pt["value"].get<double>());
    if (pt.contains("stderr")) std::printf("  (stderr %.2e)", pt["stderr"].get<double>());
    if (pt.contains("budget")) std::printf("  (budget %.2e)", pt["budget"].get<double>());
    std::printf("\n");
  }
}

void print_rates(const json& data) {
  if (data.contains("families"))
    for (const auto& fam : data["families"]) {
      if (fam.contains("median_rate"))
        std::printf("  %-14s median rate %.3f\n", fam["name"].get<std::string>().c_str(),
                    fam["median_rate"].get<double>());
      else
        std::printf("  %-14s (rate not measurable on this grid)\n",
                    fam["name"].get<std::string>().c_str());
    }
  if (data.contains("step") && data["step"].contains("median_rate"))
    std::printf("  step-data product median rate %.3f\n", data["step"]["median_rate"].get<double>());
}

int run_validate(const ExperimentConfig& c, double* elapsed_out) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckResult> checks = run_validate_all(c);
  bool all = true;
  json arr = json::array();
  CsvTable tab{"validate_all", {"check", "pass", "runtime_sec", "detail"}, {}};
  for (const CheckResult& ck : checks) {
    all = all && ck.pass;
    std::printf("%-28s %s  (%.1fs)  %s\n", ck.name.c_str(), ck.pass ? "PASS" : "FAIL",
                ck.runtime_sec, ck.detail.c_str());
    arr.push_back(json{{"name", ck.name},
                       {"pass", ck.pass},
                       {"runtime_sec", ck.runtime_sec},
                       {"detail", ck.detail}});
    tab.rows.push_back({ck.name, ck.pass ? "1" : "0", fmt17(ck.runtime_sec), ck.detail});
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed_out) *elapsed_out = dt;
  RecordWriter w(c.out, RunInfo{"validate-all", c.seed, config_echo(c)});
  w.write("validate-all", json{{"checks", arr}, {"pass", all}}, dt);
  w.write_csv(tab);
  std::printf("%s (%.1fs total) -> %s/records.jsonl\n",
              all ? "all checks passed" : "FAILURES present", dt, c.out.c_str());
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"last passage percolation laboratory: determinants, samplers, scaling checks"};
  app.require_subcommand(1);
  CliValues v;
  add_common_flags(app.add_subcommand("kernel-eval", "evaluate one kernel at one probe"), v);
  add_common_flags(
      app.add_subcommand("fredholm-discrete", "lattice event probability (windowed determinant)"),
      v);
  add_common_flags(
      app.add_subcommand("fredholm-continuum", "continuum event probability (Nystrom determinant)"),
      v);
  add_common_flags(app.add_subcommand("mc-blpp", "path sampler for the continuum passage value"),
                   v);
  add_common_flags(app.add_subcommand("mc-glpp", "environment sampler for the lattice chain"), v);
  add_common_flags(
      app.add_subcommand("gue-oracle", "empirical law of the largest eigenvalue (m x m)"), v);
  add_common_flags(app.add_subcommand("lemma-check", "kernel limit convergence tables"), v);
  add_common_flags(app.add_subcommand("product-check", "composed kernel convergence table"), v);
  add_common_flags(app.add_subcommand("validate-all", "run the cross-validation suite"), v);
  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    ExperimentConfig c;
    if (sub->count("--config")) {
      std::ifstream in(v.config_path);
      if (!in) throw std::runtime_error("cannot open config file " + v.config_path);
      c = config_from_json(json::parse(in));
    }
    if (sub->count("--seed")) c.seed = v.seed;
    if (sub->count("--out")) c.out = v.out;
    if (sub->count("--quick")) c.quick = true;
    if (sub->count("--samples")) c.samples = v.samples;
    if (sub->count("--nodes")) c.nodes = v.nodes;
    if (sub->count("--scale")) c.N = v.scale;
    c.validate();

    if (name == "validate-all") return run_validate(c, nullptr);

    auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    if (name == "kernel-eval")
      out = run_kernel_eval(c);
    else if (name == "fredholm-discrete")
      out = run_fredholm_discrete(c);
    else if (name == "fredholm-continuum")
      out = run_fredholm_continuum(c);
    else if (name == "mc-blpp")
      out = run_mc_blpp(c);
    else if (name == "mc-glpp")
      out = run_mc_glpp(c);
    else if (name == "gue-oracle")
      out = run_gue_oracle(c);
    else if (name == "lemma-check")
      out = run_lemma_check(c);
    else
      out = run_product_check(c);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RecordWriter w(c.out, RunInfo{name, c.seed, config_echo(c)});
    w.write(out.kind, out.data, dt);
    for (const auto& t : out.tables) w.write_csv(t);
    if (out.data.contains("value"))
      std::printf("  %s = %s\n", c.kernel.c_str(), fmt17(out.data["value"].get<double>()).c_str());
    print_points(out.data);
    print_rates(out.data);
    std::printf("%s: %.1fs -> %s/records.jsonl (+%zu tables)\n", name.c_str(), dt, c.out.c_str(),
                out.tables.size());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
