#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "verify.hpp"

using namespace weilbc::verify;

int main(int argc, char** argv) {
  CLI::App app{"Exact checks of the extended Weil representation and the twisted norm map"};
  RunConfig cfg;
  std::string check;
  std::vector<std::string> pairs{"1:1"};
  std::string sample = "all";
  std::string output;
  app.add_option("check", check, "Check to run")->required()->check(CLI::IsMember(check_names()));
  app.add_option("--p", cfg.p, "Odd prime");
  app.add_option("--base-degree", cfg.base_degree, "q = p^base-degree");
  app.add_option("--n", cfg.n, "Half the symplectic dimension");
  app.add_option("--m", cfg.m, "Degree of F' over F");
  app.add_option("--pairs", pairs, "Twists i:t")->delimiter(',');
  app.add_option("--psi-scale", cfg.psi_scale, "a in F_p^x, psi_a(x) = psi(ax)");
  app.add_option("--sample", sample, "Number of sampled elements, or 'all'");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--ambient-cap", cfg.ambient_cap, "Largest field degree over F_q used by the Lang solver");
  app.add_option("--format", cfg.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
  app.add_option("--cache-dir", cfg.cache_dir, "Directory for the operator cache");
  app.add_option("--workers", cfg.workers, "Worker threads (0: all cores)");
  app.add_option("--output", output, "Write the report here instead of stdout");
  CLI11_PARSE(app, argc, argv);

  cfg.pairs.clear();
  try {
    for (const auto& s : pairs) cfg.pairs.push_back(parse_pair(s));
    if (sample == "all") {
      cfg.sample = 0;
    } else {
      cfg.sample = std::stoull(sample);
      if (cfg.sample == 0) throw std::invalid_argument("sample");
    }
  } catch (const std::exception&) {
    std::cerr << "error: bad --pairs or --sample value\n";
    return 2;
  }

  const Report r = run_check(check, cfg);
  const std::string text = cfg.format == "tsv" ? r.to_tsv() : r.to_json() + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream(output) << text;
  }
  std::cerr << check << ": pass=" << r.pass << " fail=" << r.fail << " (" << r.seconds << " s)";
  if (!r.error.empty()) std::cerr << " error: " << r.error;
  std::cerr << '\n';
  return r.ok() ? 0 : 1;
}
