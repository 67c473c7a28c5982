#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "appletaste/adversaries.hpp"
#include "appletaste/combinatorics.hpp"
#include "appletaste/errors.hpp"
#include "appletaste/harness.hpp"

using namespace appletaste;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string depth_text(const DepthResult& r) {
  return r.cap_exceeded ? ">=" + std::to_string(r.value) + " (cap)" : std::to_string(r.value);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Apple-tasting learners, adversaries and class tools"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a sweep config and write the result CSV");
  std::string config_path, run_output;
  run->add_option("config", config_path, "Sweep config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", run_output, "Output CSV (overrides the config; '-' for stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit log M = log a + alpha log T per group of a run CSV");
  std::string fit_input, group_by = "learner,adversary,k";
  fit->add_option("csv", fit_input, "Run CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("-g,--group-by", group_by, "Comma-separated grouping columns");

  // dims
  auto* dims = app.add_subcommand("dims", "Report Littlestone dimension, width depths and trichotomy label");
  std::string dims_file, dims_k = "0,1";
  std::size_t dims_cap = 12;
  dims->add_option("class", dims_file, "Class file")->required()->check(CLI::ExistingFile);
  dims->add_option("-k", dims_k, "Comma-separated budgets for D_1^(k)");
  dims->add_option("--cap", dims_cap, "Depth cap for width searches");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact minimax mistakes M*(H, T, k)");
  std::string oracle_file;
  std::optional<std::size_t> universal_n;
  std::size_t oracle_T = 1, oracle_k = 0;
  auto* ofile = oracle->add_option("class", oracle_file, "Class file")->check(CLI::ExistingFile);
  auto* ouni = oracle->add_option("-u,--universal", universal_n, "Use the universal class U_n");
  ofile->excludes(ouni);
  oracle->add_option("-T", oracle_T, "Horizon")->required();
  oracle->add_option("-k", oracle_k, "Realizability budget");

  // sample-class
  auto* sample = app.add_subcommand("sample-class", "Sample a random class and write it as a class file");
  std::size_t s_d = 2, s_T = 64;
  double s_c = 1.0;
  std::uint64_t s_seed = 1;
  std::string s_out;
  sample->add_option("-d", s_d, "Dimension parameter d");
  sample->add_option("-T", s_T, "Domain size / horizon T");
  sample->add_option("-c", s_c, "Density constant c");
  sample->add_option("--seed", s_seed, "Seed");
  sample->add_option("-o,--output", s_out, "Output class file (default stdout)");

  // verify-class
  auto* verify = app.add_subcommand("verify-class", "Check the random-class properties of a class file");
  std::string v_file;
  std::size_t v_d = 2, v_T = 64;
  double v_c = 1.0;
  std::optional<double> v_ones, v_decay;
  std::uint64_t v_seed = 1;
  verify->add_option("class", v_file, "Class file")->required()->check(CLI::ExistingFile);
  verify->add_option("-d", v_d, "Dimension parameter d");
  verify->add_option("-T", v_T, "Horizon T");
  verify->add_option("-c", v_c, "Density constant c (scales the default thresholds)");
  verify->add_option("--ones-threshold", v_ones, "Minimum ones per hypothesis");
  verify->add_option("--decay", v_decay, "Maximum surviving fraction per zero restriction");
  verify->add_option("--seed", v_seed, "Seed for the audited chains");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      SweepConfig cfg = load_sweep_config(config_path);
      if (!run_output.empty()) cfg.output = run_output == "-" ? "" : run_output;
      const std::size_t failed = cmd_run(cfg, std::cout);
      if (failed) std::cerr << failed << " row(s) failed a bound or certificate check\n";
      return failed ? 1 : 0;
    }
    if (*fit) {
      std::ifstream in(fit_input);
      write_fit_csv(std::cout, cmd_fit(in, split_list(group_by)));
      return 0;
    }
    if (*dims) {
      const FiniteClass H = read_class_file(dims_file);
      std::cout << "hypotheses " << H.size() << "\ndomain " << H.domain_size() << '\n';
      std::cout << "littlestone " << littlestone_dim(H) << '\n';
      std::cout << "D_1 " << depth_text(width_depth(H, 1, dims_cap)) << '\n';
      for (const auto& ks : split_list(dims_k)) {
        const std::size_t k = std::stoul(ks);
        std::cout << "D_1^(" << k << ") " << depth_text(d1_k(H, k, dims_cap)) << '\n';
      }
      const auto w = effective_width(H, dims_cap);
      std::cout << "effective_width " << (w ? std::to_string(*w) : std::string("none at cap")) << '\n';
      std::cout << "label " << to_string(classify(w)) << '\n';
      return 0;
    }
    if (*oracle) {
      if (oracle_file.empty() && !universal_n) throw ParameterError("oracle needs a class file or -u n");
      const FiniteClass H = universal_n ? universal_class(*universal_n) : read_class_file(oracle_file);
      std::cout << minimax_oracle(H, oracle_T, oracle_k) << '\n';
      return 0;
    }
    if (*sample) {
      RandomClassSpec spec;
      spec.d = s_d;
      spec.T = s_T;
      spec.c = s_c;
      spec.seed = s_seed;
      const SampledClass sc = sample_random_class(spec);
      if (s_out.empty()) {
        write_class(std::cout, sc.H, sc.header());
      } else {
        std::ofstream out(s_out);
        if (!out) throw ParameterError("cannot write '" + s_out + "'");
        write_class(out, sc.H, sc.header());
      }
      std::cerr << "hypotheses " << sc.H.size() << " (requested " << sc.requested << "), p=" << fmt(sc.p) << '\n';
      return 0;
    }
    if (*verify) {
      const FiniteClass H = read_class_file(v_file);
      RandomClassCheck check = default_random_class_check(v_d, v_T, v_c);
      if (v_ones) check.ones_threshold = *v_ones;
      if (v_decay) check.decay = *v_decay;
      check.seed = v_seed;
      const RandomClassReport rep = verify_random_class(H, check);
      std::cout << "item1 " << to_string(rep.item1) << " min_ones=" << rep.min_ones
                << " threshold=" << fmt(check.ones_threshold) << '\n';
      std::cout << "item2 " << to_string(rep.item2) << " worst_ratio=" << fmt(rep.worst_ratio)
                << " decay=" << fmt(check.decay) << " audited=" << rep.restrictions_audited << '\n';
      std::cout << "item3 " << to_string(rep.item3) << (rep.item3_note.empty() ? "" : " " + rep.item3_note) << '\n';
      const bool failed = rep.item1 == ItemStatus::fail || rep.item2 == ItemStatus::fail ||
                          rep.item3 == ItemStatus::fail;
      return failed ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
