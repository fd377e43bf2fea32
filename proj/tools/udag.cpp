// udag: command-line front end for the samplers, experiments and acceptance
// suites. Exit status: 0 success, 1 acceptance failure, 2 usage or input error.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "udag/chain.hpp"
#include "udag/dag.hpp"
#include "udag/experiments.hpp"
#include "udag/limits.hpp"
#include "udag/parallel.hpp"
#include "udag/stats.hpp"
#include "udag/suites.hpp"
#include "udag/yule.hpp"

namespace {

using nlohmann::json;

constexpr int kUsageError = 2;

struct RunSpec {
  int d = 2;
  std::int64_t n = 1000;
  std::int64_t m = 1;
  bool without = false;
  std::string sampler = "chain";
  std::int64_t count = 1;
  std::uint64_t seed = 7;
  int workers = 1;
  std::string output = "-";
  std::string config;

  udag::DagConfig dag() const {
    return {d, n, m, without ? udag::Replacement::without : udag::Replacement::with};
  }
  udag::ChainParams chain() const {
    udag::ChainParams p;
    p.d = d;
    p.n = n;
    p.m = m;
    p.replacement = dag().replacement;
    return p;
  }
  udag::RunOptions run() const { return {seed, workers}; }
};

// Flags shared by the model-driven commands; remembers which were given so a
// --config file only fills the rest.
struct ModelFlags {
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* cmd, RunSpec& spec, bool with_model = true) {
    if (with_model) {
      options["d"] = cmd->add_option("--d", spec.d, "edges per vertex")->check(CLI::Range(2, 1 << 20));
      options["n"] = cmd->add_option("--n", spec.n, "number of vertices")->check(CLI::PositiveNumber);
      options["m"] = cmd->add_option("--m", spec.m, "number of roots")->check(CLI::PositiveNumber);
      options["replacement"] = cmd->add_flag("--without-replacement", spec.without,
                                             "draw the d endpoints as a set");
    }
    options["count"] = cmd->add_option("--count", spec.count, "samples or runs")->check(CLI::PositiveNumber);
    options["seed"] = cmd->add_option("--seed", spec.seed, "master seed");
    options["workers"] = cmd->add_option("--workers", spec.workers, "worker threads (default $UDAG_WORKERS)")
                             ->check(CLI::PositiveNumber);
    options["output"] = cmd->add_option("-o,--output", spec.output, "output file, - for stdout");
    cmd->add_option("--config", spec.config, "JSON file with any of the flags above")->check(CLI::ExistingFile);
  }

  bool given(const std::string& key) const {
    auto it = options.find(key);
    return it != options.end() && it->second->count() > 0;
  }

  void apply_config(RunSpec& spec) const {
    if (spec.config.empty()) return;
    std::ifstream in(spec.config);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw udag::ParseError(spec.config + ": " + e.what());
    }
    if (!doc.is_object()) throw udag::ParseError(spec.config + ": expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (given(key)) continue;
      try {
        if (key == "d") spec.d = value.get<int>();
        else if (key == "n") spec.n = value.get<std::int64_t>();
        else if (key == "m") spec.m = value.get<std::int64_t>();
        else if (key == "replacement") spec.without = udag::parse_replacement(value.get<std::string>()) == udag::Replacement::without;
        else if (key == "sampler") spec.sampler = value.get<std::string>();
        else if (key == "count") spec.count = value.get<std::int64_t>();
        else if (key == "seed") spec.seed = value.get<std::uint64_t>();
        else if (key == "workers") spec.workers = value.get<int>();
        else if (key == "output") spec.output = value.get<std::string>();
        else if (key != "command") throw udag::ParseError(spec.config + ": unknown key '" + key + "'");
      } catch (const json::exception& e) {
        throw udag::ParseError(spec.config + ": bad value for '" + key + "': " + e.what());
      }
    }
    if (spec.count < 1) throw udag::ConfigError("count must be at least 1");
    if (spec.workers < 1) throw udag::ConfigError("workers must be at least 1");
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// Xi from a forward build, from the crossing count at the phase-I cutoff.
double forward_xi(const udag::Dag& dag, const udag::ChainParams& p) {
  if (p.n <= p.m) return 0.0;
  const std::int64_t n1 = p.phase1_cutoff();
  const auto y = udag::gap_crossings(dag, p.n);
  return udag::rising_factorial(static_cast<double>(n1 + 1), p.d - 1) * static_cast<double>(y[static_cast<std::size_t>(n1)]) /
         std::pow(static_cast<double>(p.n), p.d - 1);
}

int cmd_generate(const RunSpec& spec) {
  udag::Rng rng(spec.seed);
  const udag::Dag dag = udag::build_dag(spec.dag(), rng);
  Output out(spec.output);
  udag::write_dag(out.stream(), dag);
  out.close();
  return 0;
}

int cmd_sample(const RunSpec& spec) {
  const udag::ChainParams p = spec.chain();
  p.validate();
  struct Draw {
    std::int64_t x;
    double xi;
  };
  std::vector<Draw> draws;
  if (spec.sampler == "chain") {
    draws = udag::parallel_map<Draw>(spec.count, spec.workers, spec.seed, [&](std::int64_t, udag::Rng& rng) {
      const auto s = udag::sample_x(p, rng);
      return Draw{s.x, s.xi};
    });
  } else {
    p.dag_config().validate();
    draws = udag::parallel_map<Draw>(spec.count, spec.workers, spec.seed, [&](std::int64_t, udag::Rng& rng) {
      const udag::Dag dag = udag::build_dag(p.dag_config(), rng);
      return Draw{udag::descendants(dag, p.n).size(), forward_xi(dag, p)};
    });
  }
  Output out(spec.output);
  udag::RunningMoments x, xi;
  const std::string replacement(udag::to_string(p.replacement));
  for (std::size_t i = 0; i < draws.size(); ++i) {
    x.add(static_cast<double>(draws[i].x));
    xi.add(draws[i].xi);
    out.stream() << json{{"sample", i}, {"n", p.n}, {"d", p.d}, {"m", p.m}, {"replacement", replacement},
                         {"x", draws[i].x}, {"xi", draws[i].xi}}.dump()
                 << '\n';
  }
  const double scale = std::pow(static_cast<double>(p.n), (p.d - 1.0) / p.d);
  out.stream() << json{{"summary",
                        {{"count", x.count()}, {"sampler", spec.sampler}, {"seed", spec.seed},
                         {"mean_x", x.mean()}, {"se_x", x.standard_error()},
                         {"mean_scaled_x", x.mean() / scale}, {"mean_xi", xi.mean()},
                         {"limit_mean_scaled_x", udag::asymptotic_moment(p.d, 1.0, 1.0)}}}}
                      .dump()
               << '\n';
  out.close();
  return 0;
}

int cmd_paths(const RunSpec& spec, const std::string& method) {
  const udag::ChainParams p = spec.chain();
  p.validate();
  const auto how = method == "stepwise" ? udag::PathMethod::stepwise : udag::PathMethod::jump;
  const auto text = udag::parallel_map<std::string>(spec.count, spec.workers, spec.seed,
                                                    [&](std::int64_t, udag::Rng& rng) {
    std::ostringstream csv;
    udag::write_path_csv(csv, udag::decompose_path(udag::record_path(p, rng, how)));
    return csv.str();
  });
  Output out(spec.output);
  out.stream() << "path,k,Y,Z,J,W,M,A,B,L\n";
  for (std::size_t i = 0; i < text.size(); ++i) {
    std::istringstream rows(text[i]);
    std::string row;
    std::getline(rows, row);  // header
    while (std::getline(rows, row)) out.stream() << i << ',' << row << '\n';
  }
  out.close();
  return 0;
}

int cmd_verify(const std::vector<std::string>& suites, const RunSpec& spec, const std::string& report) {
  std::set<int> ids;
  for (const auto& name : suites) {
    for (int id : udag::suite_criteria(name)) ids.insert(id);
  }
  udag::AcceptanceRunner runner({spec.seed, spec.workers});
  json reports = json::array();
  int failures = 0;
  for (int id : ids) {
    const auto result = runner.run(id);
    std::cout << udag::summary_line(result) << std::endl;
    failures += result.pass ? 0 : 1;
    reports.push_back(result.report);
  }
  if (!report.empty()) {
    Output out(report);
    out.stream() << reports.dump(2) << '\n';
    out.close();
  }
  std::cout << (ids.size() - failures) << '/' << ids.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}

int cmd_density(const RunSpec& spec, double tmax, double step) {
  if (spec.d != 2 || spec.m != 1 || spec.without) throw udag::ConfigError("density is defined for d = 2, m = 1, with replacement");
  udag::ProbeRequest request;
  request.j_at = udag::density_grid(spec.n, udag::t_grid(step, tmax, step));
  if (request.j_at.empty()) throw udag::ConfigError("no grid point k = ceil(t sqrt n) lies below n1");
  const auto paths = udag::probe_paths(spec.chain(), request, spec.count, spec.run());
  const auto table = udag::density_table(spec.n, request, paths);
  Output out(spec.output);
  out.stream().precision(10);
  out.stream() << "k,t,frequency,se,reference\n";
  for (const auto& row : table.rows) {
    out.stream() << row.k << ',' << row.t << ',' << row.frequency << ',' << row.se << ',' << row.reference << '\n';
  }
  out.close();
  std::cerr << "sup |frequency - p(t)| = " << table.sup_deviation << '\n';
  return 0;
}

int cmd_couple(const RunSpec& spec) {
  const auto reports = udag::parallel_map<udag::CouplingReport>(
      spec.count, spec.workers, spec.seed,
      [&](std::int64_t, udag::Rng& rng) { return udag::coupled_prefix(spec.n, spec.d, rng); });
  Output out(spec.output);
  std::int64_t collisions = 0;
  std::int64_t displaced = 0;
  std::int64_t violations = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    collisions += r.collision;
    displaced += r.max_displacement > r.displacement_bound;
    violations += r.floor_bound_violations;
    out.stream() << json{{"run", i}, {"n", r.n}, {"d", r.d}, {"n1", r.n1},
                         {"vertices", r.vertices.size()}, {"max_displacement", r.max_displacement},
                         {"displacement_bound", r.displacement_bound}, {"collision", r.collision},
                         {"collision_label", r.collision_label},
                         {"floor_bound_violations", r.floor_bound_violations}}
                        .dump()
                 << '\n';
  }
  const double runs = static_cast<double>(reports.size());
  out.stream() << json{{"summary",
                        {{"runs", reports.size()}, {"collision_rate", collisions / runs},
                         {"displacement_exceeded_rate", displaced / runs},
                         {"floor_bound_violations", violations}}}}
                      .dump()
               << '\n';
  out.close();
  return 0;
}

int cmd_independence(const RunSpec& spec) {
  const auto r = udag::independence_experiment(spec.n, spec.count, spec.run());
  Output out(spec.output);
  out.stream() << json{{"n", r.n}, {"count", r.count}, {"correlation", r.correlation.r},
                       {"correlation_se", r.correlation.se}, {"grid_dependence", r.grid_dependence},
                       {"upsilon_mean_scaled", r.upsilon_mean}, {"upsilon_se", r.upsilon_se},
                       {"upsilon_upper_bound", udag::upsilon_upper_bound()}}
                      .dump(2)
               << '\n';
  out.close();
  return 0;
}

int cmd_tabulate(const std::string& what, int d, double lo, double hi, double step, const std::string& path) {
  if (!(step > 0.0) || hi < lo || lo < 0.0) throw udag::ConfigError("need 0 <= from <= to and step > 0");
  Output out(path);
  out.stream().precision(15);
  const auto points = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
  if (what == "density") {
    out.stream() << "t,p\n";
    for (std::int64_t i = 0; i <= points; ++i) {
      const double t = lo + static_cast<double>(i) * step;
      out.stream() << t << ',' << udag::descendant_density(t) << '\n';
    }
  } else if (what == "cdf") {
    const udag::LimitLaw law(d);
    out.stream() << "x,cdf,pdf\n";
    for (std::int64_t i = 0; i <= points; ++i) {
      const double x = lo + static_cast<double>(i) * step;
      out.stream() << x << ',' << law.cdf(x) << ',' << law.pdf(x) << '\n';
    }
  } else if (what == "psi") {
    out.stream() << "mu,expected_psi\n";
    for (std::int64_t i = 0; i <= points; ++i) {
      const double mu = lo + static_cast<double>(i) * step;
      if (mu > 0.0) out.stream() << mu << ',' << udag::expected_psi(mu) << '\n';
    }
  } else {
    throw udag::ConfigError("unknown table '" + what + "' (density, cdf, psi)");
  }
  out.close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Descendant counts in uniform random dags: sampling, experiments and checks"};
  app.require_subcommand(1);
  RunSpec spec;
  spec.workers = udag::default_workers();

  std::map<std::string, ModelFlags> flags;

  auto* generate = app.add_subcommand("generate", "build one dag and print it in text form");
  flags["generate"].add(generate, spec);

  auto* sample = app.add_subcommand("sample", "sample the descendant count of the newest vertex");
  flags["sample"].add(sample, spec);
  flags["sample"].options["sampler"] =
      sample->add_option("--sampler", spec.sampler, "chain (backward chain) or direct (forward build)")
          ->check(CLI::IsMember({"chain", "direct"}));

  std::string path_method = "jump";
  auto* paths = app.add_subcommand("paths", "record chain trajectories with their decompositions (CSV)");
  flags["paths"].add(paths, spec);
  paths->add_option("--method", path_method, "jump or stepwise")->check(CLI::IsMember({"jump", "stepwise"}));

  std::vector<std::string> suites;
  std::string report;
  auto* verify = app.add_subcommand("verify", "run acceptance suites");
  verify->add_option("suites", suites, "suite names or 'all'")->required();
  auto* verify_seed = verify->add_option("--seed", spec.seed, "master seed")->required();
  (void)verify_seed;
  verify->add_option("--workers", spec.workers, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--report", report, "write the JSON reports here");

  double tmax = 3.0;
  double step = 0.05;
  auto* density = app.add_subcommand("density", "empirical P(k descends from n) against p(k/sqrt n)");
  flags["density"].add(density, spec);
  density->add_option("--tmax", tmax, "largest t")->check(CLI::PositiveNumber);
  density->add_option("--step", step, "t spacing")->check(CLI::PositiveNumber);

  auto* couple = app.add_subcommand("couple", "couple the dag above n1 with the time-changed Yule tree");
  flags["couple"].add(couple, spec);

  auto* independence = app.add_subcommand("independence", "joint law of X(n) and X(n+1) in one dag");
  flags["independence"].add(independence, spec, false);
  flags["independence"].options["n"] =
      independence->add_option("--n", spec.n, "number of vertices")->check(CLI::Range(2, 1 << 30));

  std::string table;
  int table_d = 2;
  double from = 0.0;
  double to = 3.0;
  auto* tabulate = app.add_subcommand("tabulate", "tables of the limit functions (CSV)");
  tabulate->add_option("table", table, "density, cdf or psi")->required()->check(CLI::IsMember({"density", "cdf", "psi"}));
  tabulate->add_option("--d", table_d, "fan-out for cdf")->check(CLI::Range(2, 1 << 20));
  tabulate->add_option("--from", from, "first argument");
  auto* tmax_opt = tabulate->add_option("--tmax,--to", to, "last argument");
  (void)tmax_opt;
  tabulate->add_option("--step", step, "spacing")->check(CLI::PositiveNumber);
  tabulate->add_option("-o,--output", spec.output, "output file, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    for (auto& [name, f] : flags) {
      if (app.got_subcommand(name)) f.apply_config(spec);
    }
    if (spec.sampler != "chain" && spec.sampler != "direct") throw udag::ConfigError("sampler must be chain or direct");
    if (*generate) return cmd_generate(spec);
    if (*sample) return cmd_sample(spec);
    if (*paths) return cmd_paths(spec, path_method);
    if (*verify) return cmd_verify(suites, spec, report);
    if (*density) return cmd_density(spec, tmax, step);
    if (*couple) return cmd_couple(spec);
    if (*independence) return cmd_independence(spec);
    if (*tabulate) return cmd_tabulate(table, table_d, from, to, step, spec.output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
