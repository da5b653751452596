// Random search for a family without log-concavity whose canonical measures
// are not ordered in k. Prints the first hit as a family file plus the
// failing k and the up-set certificate.
//
//   search_efron_counterexample [seed] [max_tries]

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "cli/report_json.hpp"
#include "gibbslab/canonical.hpp"
#include "gibbslab/chains.hpp"

using namespace gibbslab;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240611ULL;
  const long tries = argc > 2 ? std::strtol(argv[2], nullptr, 10) : 100000;
  RngStream rng(seed);

  for (long t = 0; t < tries; ++t) {
    const std::size_t n = rng.uniform() < 0.5 ? 2 : 3;
    std::vector<std::vector<double>> weights(n);
    std::vector<Pmf> members;
    for (auto& w : weights) {
      const int len = 2 + static_cast<int>(rng.uniform() * 4.0);
      for (int x = 0; x < len; ++x) {
        // two decimals keep the frozen fixture readable
        w.push_back(std::round((0.05 + rng.uniform()) * 100.0) / 100.0);
      }
      members.push_back(pmf_from_weights(w));
    }
    const Family family(members);
    long k_max = 0;
    for (const auto& m : members) k_max += m.support_max();
    const EfronReport rep = efron_check(family, n, k_max);
    if (rep.all_hold) continue;

    cli::ojson fam;
    fam["members"] = cli::ojson::array();
    for (const auto& w : weights) fam["members"].push_back({{"kind", "weights"}, {"w", w}});
    fam["repeat"] = n;
    cli::ojson out;
    out["seed"] = seed;
    out["attempt"] = t;
    out["family"] = fam;
    out["all_log_concave"] = rep.all_log_concave;
    for (const auto& p : rep.pairs) {
      if (p.holds) continue;
      out["k"] = p.k;
      out["flow"] = p.flow;
      if (p.certificate) out["certificate"] = cli::to_json(*p.certificate);
      break;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cerr << fmt::format("no counterexample in {} tries\n", tries);
  return 1;
}
