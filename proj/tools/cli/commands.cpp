#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cli/family_io.hpp"
#include "cli/report_json.hpp"
#include "gibbslab/canonical.hpp"
#include "gibbslab/chains.hpp"
#include "gibbslab/gcp.hpp"
#include "gibbslab/pmf.hpp"
#include "gibbslab/sumstats.hpp"

namespace gibbslab::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string family_path;
  std::string out;
  std::string format = "csv";
};

struct Loaded {
  FamilyFile file;
  Family family;
};

Loaded load(const std::string& path) {
  FamilyFile file = load_family_file(path);
  Family family = build_family(file);
  spdlog::debug("family {}: {} distinct members, lambda_max {}, cap {}", path, file.specs.size(),
                family.lambda_max(), family.lambda_cap());
  return {std::move(file), std::move(family)};
}

std::size_t resolve_n(std::size_t n, const FamilyFile& file) {
  if (n > 0) return n;
  if (file.repeat > 0) return file.repeat;
  throw UsageError("-n is required (the family file has no \"repeat\")");
}

std::pair<int, int> parse_pair(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int a = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string rest = text.substr(colon + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError(fmt::format("{} expects A:B with integers, got '{}'", flag, text));
  }
}

OrderingMode parse_ordering(const std::string& mode) {
  if (mode == "both-above") return OrderingMode::kBothAbove;
  if (mode == "both-below") return OrderingMode::kBothBelow;
  if (mode == "below-above") return OrderingMode::kBelowAbove;
  throw UsageError("--mode must be both-above, both-below or below-above");
}

ojson pmf_json(const Pmf& pmf) {
  ojson j;
  j["support_max"] = pmf.support_max();
  j["truncated"] = pmf.is_truncated();
  j["tail_mass_bound"] = num(pmf.tail_mass_bound());
  j["probs"] = pmf.probs();
  return j;
}

// Particles placed from site 0 onward, each site filled to capacity.
Configuration stacked(const ZeroRangeSpec& spec, long total) {
  Configuration x(spec.sites(), 0);
  long left = total;
  for (std::size_t i = 0; i < spec.sites() && left > 0; ++i) {
    const long put = std::min<long>(left, spec.capacity[i]);
    x[i] = static_cast<int>(put);
    left -= put;
  }
  if (left > 0) {
    throw Error(ErrorKind::kInvalidParameter,
                fmt::format("{} particles exceed the total capacity of the sites", total));
  }
  return x;
}

void add_family(CLI::App* sub, Common& c) {
  sub->add_option("--family", c.family_path, "Family specification JSON")
      ->required()
      ->check(CLI::ExistingFile);
}

void add_out(CLI::App* sub, Common& c) {
  sub->add_option("--out,-o", c.out, "Output path (default stdout)");
}

void add_format(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void print_error_json(const ojson& j) {
  std::cerr << j.dump() << "\n";
  std::cerr.flush();
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Exact tilted, canonical and conditioned laws of integer sums; dominance checks; "
               "coupled chain simulation",
               "gibbslab"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  bool verbose = false;
  app.add_flag("--quiet,-q", quiet, "Only errors on stderr");
  app.add_flag("--verbose,-v", verbose, "Debug logging on stderr");

  Common c;
  // Option storage lives for this call only.
  std::vector<std::shared_ptr<void>> arena;
  auto hold = [&arena]<class T>(T init) -> T& {
    auto p = std::make_shared<T>(std::move(init));
    arena.push_back(p);
    return *p;
  };
  std::vector<std::pair<CLI::App*, std::function<void()>>> handlers;
  auto command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    return sub;
  };

  // check-logconcave
  {
    CLI::App* sub = command("check-logconcave", "Log-concavity report for each distinct member");
    add_family(sub, c);
    add_out(sub, c);
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      ojson j;
      j["family"] = to_json(l.file);
      ojson members = ojson::array();
      bool all = true;
      std::size_t i = 0;
      for (const auto& m : l.family.distinct_members()) {
        ojson e;
        e["index"] = i;
        e["kind"] = l.file.specs[i].describe();
        e["support_max"] = m.support_max();
        e["truncated"] = m.is_truncated();
        e["tail_mass_bound"] = num(m.tail_mass_bound());
        const auto rep = check_log_concave(m);
        all = all && rep.is_log_concave;
        e.update(to_json(rep));
        members.push_back(std::move(e));
        ++i;
      }
      j["members"] = std::move(members);
      j["all_log_concave"] = all;
      write_output(c.out, dump(j));
    });
  }

  // tilt
  {
    auto& lambda = hold(double{1.0});
    auto& index = hold(std::size_t{0});
    CLI::App* sub = command("tilt", "Tilted member law nu^lambda_i");
    add_family(sub, c);
    add_out(sub, c);
    add_format(sub, c);
    sub->add_option("--lambda", lambda, "Tilt parameter")->required();
    sub->add_option("--index,-i", index, "Member index (0-based)")->capture_default_str();
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const Pmf& base = l.family.member(index);
      if (lambda > l.family.lambda_cap() * (1.0 + 1e-12)) {
        throw Error(ErrorKind::kInvalidParameter,
                    fmt::format("lambda {} exceeds the family cap {}", lambda, l.family.lambda_cap()));
      }
      const Pmf t = tilt(base, lambda);
      if (c.format == "csv") {
        write_output(c.out, pmf_csv(t));
        return;
      }
      const Moments mo = moments(t);
      ojson j;
      j["index"] = index;
      j["lambda"] = num(lambda);
      j["log_partition"] = num(log_partition_function(base, lambda));
      j["mean"] = num(mo.mean);
      j["variance"] = num(mo.variance);
      j["pmf"] = pmf_json(t);
      write_output(c.out, dump(j));
    });
  }

  // sumdist
  {
    auto& lambda = hold(double{1.0});
    auto& n = hold(std::size_t{0});
    auto& order = hold(std::string{"sequential"});
    CLI::App* sub = command("sumdist", "Exact law of S^lambda_n");
    add_family(sub, c);
    add_out(sub, c);
    add_format(sub, c);
    sub->add_option("--lambda", lambda, "Tilt parameter")->capture_default_str();
    sub->add_option("-n", n, "Number of summands (default: family repeat)");
    sub->add_option("--order", order, "Convolution order")
        ->check(CLI::IsMember({"sequential", "balanced"}))
        ->capture_default_str();
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const std::size_t nn = resolve_n(n, l.file);
      const SumLaw law = sum_law(l.family, lambda, nn,
                                 order == "balanced" ? ConvolutionOrder::kBalanced
                                                     : ConvolutionOrder::kSequential);
      if (c.format == "csv") {
        write_output(c.out, sum_law_csv(law));
        return;
      }
      ojson j;
      j["n"] = nn;
      j["lambda"] = num(lambda);
      j["mean"] = num(law.mean());
      j["tail_mass_bound"] = num(law.tail_mass_bound);
      std::vector<double> p(law.log_probs.size());
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = law.prob(static_cast<long>(k));
      j["probs"] = std::move(p);
      write_output(c.out, dump(j));
    });
  }

  // cond-check
  {
    auto& lambda_star = hold(double{1.0});
    auto& eps = hold(double{0.1});
    auto& threshold = hold(double{10.0});
    auto& n_list = hold(std::vector<std::size_t>{});
    CLI::App* sub = command("cond-check", "Gap trajectories of M_n around t*");
    add_family(sub, c);
    add_out(sub, c);
    sub->add_option("--lambda-star", lambda_star, "Target tilt")->required();
    sub->add_option("--eps", eps, "Step in t = log lambda")->capture_default_str();
    sub->add_option("--n-list", n_list, "Comma-separated n values")->required()->delimiter(',');
    sub->add_option("--threshold", threshold, "Gap level for the divergence heuristic")
        ->capture_default_str();
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const ConditionTrend t = condition_check(l.family, lambda_star, eps, n_list, threshold);
      write_output(c.out, dump(to_json(t)));
    });
  }

  // canonical
  {
    auto& n = hold(std::size_t{0});
    auto& k = hold(long{0});
    auto& index = hold(std::optional<std::size_t>{});
    CLI::App* sub = command("canonical", "Canonical law mu_n(.|k) (joint or one marginal)");
    add_family(sub, c);
    add_out(sub, c);
    add_format(sub, c);
    sub->add_option("-n", n, "Number of coordinates (default: family repeat)");
    sub->add_option("-k", k, "Conditioned sum")->required();
    sub->add_option("--index,-i", index, "Return only this coordinate's marginal (0-based)");
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const std::size_t nn = resolve_n(n, l.file);
      if (index) {
        const Pmf m = canonical_marginal(l.family, *index, nn, k);
        if (c.format == "csv") {
          write_output(c.out, pmf_csv(m));
        } else {
          ojson j{{"n", nn}, {"k", k}, {"index", *index}};
          j["pmf"] = pmf_json(m);
          write_output(c.out, dump(j));
        }
        return;
      }
      const JointTable t = canonical_joint(l.family, nn, k);
      if (c.format == "csv") {
        write_output(c.out, joint_csv(t));
        return;
      }
      ojson j{{"n", nn}, {"k", k}};
      j["dims"] = std::vector<int>(t.dims().begin(), t.dims().end());
      ojson support = ojson::array();
      for (std::size_t f = 0; f < t.size(); ++f) {
        if (t.prob(f) > 0.0) support.push_back({{"x", t.config(f)}, {"prob", num(t.prob(f))}});
      }
      j["support"] = std::move(support);
      write_output(c.out, dump(j));
    });
  }

  // efron
  {
    auto& n = hold(std::size_t{0});
    auto& k_max = hold(long{1});
    CLI::App* sub = command("efron", "Check mu_n(.|k) below mu_n(.|k+1) for k < k-max");
    add_family(sub, c);
    add_out(sub, c);
    sub->add_option("-n", n, "Number of coordinates (default: family repeat)");
    sub->add_option("--k-max", k_max, "Largest k + 1 checked")->required();
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const EfronReport r = efron_check(l.family, resolve_n(n, l.file), k_max);
      spdlog::info("efron: {} pairs, all hold: {}", r.pairs.size(), r.all_hold);
      write_output(c.out, dump(to_json(r)));
    });
  }

  // dominance
  {
    auto& lambda = hold(double{1.0});
    auto& lambda2 = hold(double{1.0});
    auto& n = hold(std::size_t{0});
    auto& r = hold(double{0.0});
    auto& mode = hold(std::string{"both-above"});
    auto& witness = hold(bool{false});
    CLI::App* sub = command("dominance", "Order conditioned tilted laws by max-flow");
    add_family(sub, c);
    add_out(sub, c);
    sub->add_option("--lambda", lambda, "Lower tilt")->required();
    sub->add_option("--lambda2", lambda2, "Upper tilt (>= lambda)")->required();
    sub->add_option("-n", n, "Number of coordinates (default: family repeat)");
    sub->add_option("--r", r, "Threshold R")->required();
    sub->add_option("--mode", mode, "both-above, both-below or below-above")->capture_default_str();
    sub->add_flag("--witness", witness, "Include the coupling when dominance holds");
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const std::size_t nn = resolve_n(n, l.file);
      const OrderingMode om = parse_ordering(mode);
      const DominanceResult res = tilt_ordering_check(l.family, lambda, lambda2, nn, r, om);
      ojson j{{"lambda", num(lambda)}, {"lambda2", num(lambda2)}, {"n", nn}, {"r", num(r)},
              {"mode", mode}};
      std::optional<JointTable> box;
      if (witness) {
        std::vector<int> dims(nn);
        for (std::size_t i = 0; i < nn; ++i) dims[i] = l.family.member(i).support_max() + 1;
        const std::size_t size = JointTable::checked_size(dims);
        box.emplace(std::move(dims), std::vector<double>(size, kLogZero));
      }
      DominanceResult shown = res;
      if (!witness) shown.witness_coupling.reset();
      j.update(to_json(shown, box ? &*box : nullptr));
      write_output(c.out, dump(j));
    });
  }

  // couple-bd
  {
    auto& index = hold(std::size_t{0});
    auto& lambda = hold(double{1.0});
    auto& lambda2 = hold(double{1.0});
    auto& interval = hold(std::string{});
    auto& solve = hold(bool{false});
    auto& simulate = hold(bool{false});
    auto& t_end = hold(double{1e4});
    auto& seed = hold(std::optional<std::uint64_t>{});
    auto& start = hold(std::string{});
    auto& summary = hold(std::string{});
    auto& event_cap = hold(std::size_t{kDefaultEventCap});
    CLI::App* sub = command("couple-bd", "Coupled constrained birth-death chains");
    add_family(sub, c);
    add_out(sub, c);
    add_format(sub, c);
    sub->add_option("--index,-i", index, "Member used as base law (0-based)")->capture_default_str();
    sub->add_option("--lambda", lambda, "Birth rate of the first chain")->required();
    sub->add_option("--lambda2", lambda2, "Birth rate of the second chain")->required();
    sub->add_option("--interval", interval, "Interval lo:hi")->required();
    auto* s1 = sub->add_flag("--solve", solve, "Stationary law by sparse solve");
    auto* s2 = sub->add_flag("--simulate", simulate, "Simulate one coupled trajectory");
    s1->excludes(s2);
    sub->add_option("--t-end", t_end, "Simulation horizon")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed (required with --simulate)");
    sub->add_option("--start", start, "Initial pair k:k2 (default lo:lo)");
    sub->add_option("--summary", summary, "JSON run summary path (simulate)");
    sub->add_option("--event-cap", event_cap, "Maximum events")->capture_default_str();
    handlers.emplace_back(sub, [&] {
      if (!solve && !simulate) throw UsageError("couple-bd needs --solve or --simulate");
      if (simulate && !seed) throw UsageError("--seed is required with --simulate");
      const auto [lo, hi] = parse_pair(interval, "--interval");
      const Loaded l = load(c.family_path);
      const CoupledBDSpec spec{l.family.member(index), lambda, lambda2, lo, hi};
      if (solve) {
        const CoupledStationary st = coupled_bd_stationary(spec);
        if (c.format == "csv") {
          write_output(c.out, coupled_stationary_csv(st));
          return;
        }
        ojson j = to_json(st);
        j["lambda"] = num(lambda);
        j["lambda2"] = num(lambda2);
        j["first_marginal_error"] = num(tv_distance(st.first_marginal(), bd_stationary(spec.first())));
        j["second_marginal_error"] =
            num(tv_distance(st.second_marginal(), bd_stationary(spec.second())));
        write_output(c.out, dump(j));
        return;
      }
      BDPair init{lo, lo};
      if (!start.empty()) {
        const auto [a, b] = parse_pair(start, "--start");
        init = {a, b};
      }
      SimulationOptions opt;
      opt.t_end = t_end;
      opt.seed = *seed;
      opt.event_cap = event_cap;
      const CoupledBDRun run = coupled_bd_simulate(spec, init, opt);
      std::string csv = "time,k,k2\n";
      for (std::size_t e = 0; e < run.trace.times.size(); ++e) {
        csv += fmt::format("{},{},{}\n", format_double(run.trace.times[e]), run.trace.states[e].k,
                           run.trace.states[e].k2);
      }
      write_output(c.out, csv);
      spdlog::info("couple-bd: {} events, {} order violations", run.trace.events,
                   run.order_violations);
      if (!summary.empty()) {
        ojson j{{"seed", *seed},
                {"events", run.trace.events},
                {"terminal_time", num(run.trace.terminal_time)},
                {"event_cap_hit", run.trace.event_cap_hit},
                {"order_violations", run.order_violations}};
        write_output(summary, dump(j));
      }
    });
  }

  // couple-zr
  {
    auto& n = hold(std::size_t{0});
    auto& k = hold(long{0});
    auto& k2 = hold(std::optional<long>{});
    auto& t_end = hold(double{1e4});
    auto& seed = hold(std::optional<std::uint64_t>{});
    auto& summary = hold(std::string{});
    auto& allow_nonmonotone = hold(bool{false});
    auto& event_cap = hold(std::size_t{kDefaultEventCap});
    CLI::App* sub = command("couple-zr", "Basic coupling of two zero-range/misanthrope systems");
    add_family(sub, c);
    add_out(sub, c);
    sub->add_option("-n", n, "Number of sites (default: family repeat)");
    sub->add_option("-k", k, "Particles in the first system")->required();
    sub->add_option("--k2", k2, "Particles in the second system (default k + 1)");
    sub->add_option("--t-end", t_end, "Simulation horizon")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->required();
    sub->add_option("--summary", summary, "JSON run summary path");
    sub->add_flag("--allow-nonmonotone", allow_nonmonotone,
                  "Simulate even when some g_i decreases");
    sub->add_option("--event-cap", event_cap, "Maximum events")->capture_default_str();
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const std::size_t nn = resolve_n(n, l.file);
      const long kk2 = k2.value_or(k + 1);
      if (k < 0 || kk2 < k) throw UsageError("need 0 <= k <= k2");
      const ZeroRangeSpec spec = zero_range_from_family(l.family, nn);
      SimulationOptions opt;
      opt.t_end = t_end;
      opt.seed = *seed;
      opt.event_cap = event_cap;
      const CoupledZrRun run =
          coupled_zr_simulate(spec, stacked(spec, k), stacked(spec, kk2), opt, allow_nonmonotone);
      std::string csv = "time";
      for (std::size_t i = 0; i < nn; ++i) csv += fmt::format(",x_{}", i + 1);
      for (std::size_t i = 0; i < nn; ++i) csv += fmt::format(",xp_{}", i + 1);
      csv += "\n";
      for (std::size_t e = 0; e < run.trace.times.size(); ++e) {
        csv += format_double(run.trace.times[e]);
        for (int v : run.trace.states[e].first) csv += fmt::format(",{}", v);
        for (int v : run.trace.states[e].second) csv += fmt::format(",{}", v);
        csv += "\n";
      }
      write_output(c.out, csv);
      spdlog::info("couple-zr: {} events, {} order violations", run.trace.events,
                   run.order_violations);
      if (!summary.empty()) {
        ojson j{{"seed", *seed},
                {"n", nn},
                {"k", k},
                {"k2", kk2},
                {"monotone", spec.monotone()},
                {"events", run.trace.events},
                {"terminal_time", num(run.trace.terminal_time)},
                {"event_cap_hit", run.trace.event_cap_hit},
                {"order_violations", run.order_violations}};
        write_output(summary, dump(j));
      }
    });
  }

  // gcp
  {
    auto& lambda_star = hold(double{1.0});
    auto& ell = hold(std::size_t{1});
    auto& mode = hold(std::string{"above"});
    auto& n_list = hold(std::vector<std::size_t>{});
    auto& sidecar = hold(std::string{});
    auto& override_hypothesis = hold(bool{false});
    auto& conditioning_lambda = hold(double{1.0});
    auto& eps = hold(double{0.0});
    auto& seed = hold(std::optional<std::uint64_t>{});
    CLI::App* sub = command("gcp", "TV distance of conditioned laws to the tilted target");
    add_family(sub, c);
    add_out(sub, c);
    sub->add_option("--lambda-star", lambda_star, "Target tilt")->required();
    sub->add_option("--ell", ell, "Leading coordinates compared")->capture_default_str();
    sub->add_option("--mode", mode, "above, below or equal-floor")
        ->check(CLI::IsMember({"above", "below", "equal-floor"}))
        ->capture_default_str();
    sub->add_option("--n-list", n_list, "Comma-separated n values")->required()->delimiter(',');
    sub->add_option("--sidecar", sidecar, "JSON sidecar path (default: <out>.json)");
    sub->add_flag("--override-hypothesis", override_hypothesis,
                  "Allow lambda* on the wrong side of 1 for the mode");
    sub->add_option("--conditioning-lambda", conditioning_lambda,
                    "Tilt of the conditioned variables (1 = base)")
        ->capture_default_str();
    sub->add_option("--eps", eps, "Diagnostic step in log lambda (0 = automatic)");
    sub->add_option("--seed", seed, "Accepted for uniformity; the computation is exact");
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      GcpOptions opt;
      opt.allow_hypothesis_override = override_hypothesis;
      opt.conditioning_lambda = conditioning_lambda;
      opt.diagnostic_eps = eps;
      const ConvergenceTable t =
          gcp_experiment(l.family, lambda_star, ell, n_list, parse_condition_mode(mode), opt);
      write_output(c.out, convergence_csv(t));
      std::string side = sidecar;
      if (side.empty() && !c.out.empty() && c.out != "-") side = c.out + ".json";
      if (!side.empty()) {
        ojson j = to_json(t);
        j["family"] = to_json(l.file);
        j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
        write_output(side, dump(j));
      }
    });
  }

  // sandwich
  {
    auto& lambda_star = hold(double{1.0});
    auto& lambda_lo = hold(double{1.0});
    auto& lambda_hi = hold(double{1.0});
    auto& ell = hold(std::size_t{1});
    auto& n = hold(std::size_t{0});
    auto& mode = hold(std::string{"above"});
    CLI::App* sub = command("sandwich", "Bracket the conditioned base law between tilted laws");
    add_family(sub, c);
    add_out(sub, c);
    sub->add_option("--lambda-star", lambda_star, "Target tilt")->required();
    sub->add_option("--lambda-lo", lambda_lo, "Lower bracket tilt")->required();
    sub->add_option("--lambda-hi", lambda_hi, "Upper bracket tilt")->required();
    sub->add_option("--ell", ell, "Leading coordinates compared")->capture_default_str();
    sub->add_option("-n", n, "Number of coordinates (default: family repeat)");
    sub->add_option("--mode", mode, "above or below")
        ->check(CLI::IsMember({"above", "below"}))
        ->capture_default_str();
    handlers.emplace_back(sub, [&] {
      const Loaded l = load(c.family_path);
      const SandwichReport r = sandwich_check(l.family, lambda_star, lambda_lo, lambda_hi, ell,
                                              resolve_n(n, l.file), parse_condition_mode(mode));
      write_output(c.out, dump(to_json(r)));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  auto logger = spdlog::stderr_logger_st("gibbslab");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%l: %v");
  spdlog::set_level(quiet ? spdlog::level::err
                          : (verbose ? spdlog::level::debug : spdlog::level::warn));

  int code = kExitOk;
  try {
    for (auto& [sub, fn] : handlers) {
      if (sub->parsed()) fn();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    code = kExitUsage;
  } catch (const SchemaError& e) {
    print_error_json({{"error", "SchemaError"}, {"field", e.field()}, {"message", e.what()}});
    code = kExitDomainError;
  } catch (const EmptyConditionError& e) {
    print_error_json({{"error", std::string(to_string(e.kind()))},
                      {"message", e.what()},
                      {"interval", e.interval().to_string()},
                      {"available_mass", num(e.available_mass())}});
    code = kExitDomainError;
  } catch (const Error& e) {
    print_error_json({{"error", std::string(to_string(e.kind()))}, {"message", e.what()}});
    code = kExitDomainError;
  } catch (const std::exception& e) {
    print_error_json({{"error", "InternalError"}, {"message", e.what()}});
    code = kExitDomainError;
  }
  spdlog::drop("gibbslab");
  return code;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gibbslab::cli
