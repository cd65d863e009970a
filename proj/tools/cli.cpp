#include "cli.hpp"

#include <CLI11.hpp>
#include <boost/core/demangle.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <typeinfo>

#include "beadlab/bead_dynamics.hpp"
#include "beadlab/config_io.hpp"
#include "beadlab/determinantal.hpp"
#include "beadlab/errors.hpp"
#include "beadlab/experiments.hpp"
#include "beadlab/gibbs_sampler.hpp"
#include "beadlab/hammersley.hpp"
#include "beadlab/render.hpp"

namespace beadlab {

namespace {

struct RunConfig {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  double tol = 1e-6;
  int verbosity = 0;
};

struct Context {
  RunConfig rc;
  ParamFile params;
  std::ostream& out;
  std::ostream& err;

  std::filesystem::path output(const std::string& name) const {
    return std::filesystem::path(rc.out_dir) / name;
  }
};

int to_int(int64_t v, const std::string& key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("'" + key + "' is out of range");
  return static_cast<int>(v);
}

SamplerSpec sampler_spec(const Context& ctx, const std::string& sec) {
  const ParamFile& p = ctx.params;
  SamplerSpec s;
  s.lattice = lattice_from_string(p.get_string(sec + ".lattice", "hex"));
  s.L = to_int(p.get_int(sec + ".L", 16), sec + ".L");
  const double r1 = p.get_double(sec + ".rho1", s.lattice == LatticeKind::kHex ? 1.0 / 3 : 0.125);
  const double r2 = p.get_double(sec + ".rho2", s.lattice == LatticeKind::kHex ? 1.0 / 3 : 0.125);
  if (s.lattice == LatticeKind::kHex)
    s.slope = make_slope(r1, r2);
  else
    s.square_slope = make_square_slope(r1, r2);
  s.burn_in_sweeps = p.get_int(sec + ".burn_in", -1);
  const std::string method = p.get_string(sec + ".method", "heat_bath");
  if (method == "heat_bath")
    s.method = BurnIn::kHeatBath;
  else if (method == "flip")
    s.method = BurnIn::kFlip;
  else
    throw ConfigError("unknown burn-in method '" + method + "' (expected heat_bath or flip)");
  s.seed = ctx.rc.seed;
  return s;
}

void ensure_out_dir(const Context& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.rc.out_dir, ec);
  const auto probe = ctx.output(".beadlab-write-test");
  std::ofstream f(probe);
  if (!f) throw ConfigError("output directory '" + ctx.rc.out_dir + "' is not writable");
  f.close();
  std::filesystem::remove(probe, ec);
}

std::ofstream open_output(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.output(name), std::ios::binary);
  if (!f) throw ConfigError("cannot write " + ctx.output(name).string());
  return f;
}

std::string slope_text(const Slope& s) {
  std::ostringstream os;
  os << std::setprecision(6) << "(" << s.rho1 << "," << s.rho2 << "," << s.rho3 << ")";
  return os.str();
}

// ------------------------------------------------------------ commands

int cmd_sample(Context& ctx) {
  const SamplerSpec spec = sampler_spec(ctx, "sampler");
  SampleDiagnostics diag;
  const TorusBeadConfig c = sample_gibbs(spec, &diag);
  if (const ValidationReport rep = validate(c); !rep.ok())
    throw ConfigError("sample failed validation: " + rep.message);
  save_config(c, ctx.output("sample.cfg").string());
  std::string realized;
  if (spec.lattice == LatticeKind::kHex) {
    realized = slope_text(realized_slope(c));
  } else {
    const SquareWindings w = square_windings(c);
    std::ostringstream os;
    os << "(" << w.w1 / spec.L << "," << w.w2 / spec.L << ")";
    realized = os.str();
  }
  ctx.out << "lattice " << to_string(spec.lattice) << " L=" << spec.L << " seed=" << spec.seed
          << "\nbeads per column " << c.beads_per_column() << ", column winding "
          << c.column_winding(0) << ", cross winding " << c.cross_winding()
          << " (units of 1/" << c.geometry().height_scale() << ")\nrealized slope "
          << realized << "\nburn-in sweeps " << diag.sweeps << ", accepted moves "
          << diag.accepted << "\nwrote " << ctx.output("sample.cfg").string() << "\n";
  return kExitOk;
}

int cmd_dynamics(Context& ctx) {
  const ParamFile& p = ctx.params;
  const SamplerSpec sspec = sampler_spec(ctx, "sampler");
  DynamicsSpec d;
  d.p = p.get_double("dynamics.p", 0.0);
  d.q = p.get_double("dynamics.q", 1.0);
  d.T = p.get_double("dynamics.T", 1.0);
  d.lattice = sspec.lattice;
  check_spec(d);
  const int replicas = to_int(p.get_int("dynamics.replicas", 1), "dynamics.replicas");
  const int radius = to_int(p.get_int("dynamics.radius", 2), "dynamics.radius");
  const std::string kind = p.get_string("dynamics.kind", "bead");
  if (kind != "bead" && kind != "single_flip")
    throw ConfigError("unknown dynamics kind '" + kind + "' (expected bead or single_flip)");
  if (replicas < 1) throw ConfigError("dynamics.replicas must be at least 1");

  struct Row {
    uint64_t seed;
    int64_t events, q00, tagged, gap;
  };
  std::vector<Row> rows(replicas);
  TorusBeadConfig last;
  parallel_for(replicas, ctx.rc.jobs, [&](int i) {
    const uint64_t seed = replica_seed(ctx.rc.seed, static_cast<uint64_t>(i));
    Rng rng = make_rng(seed);
    SamplerSpec s = sspec;
    TorusBeadConfig c = equilibrate(seed_config(s), s, rng);
    ObservableTracker tr(c.geometry());
    tr.track_face({0, 0});
    tr.tag_bead(c, {0, 0});
    tr.track_gaps(c, {0, 0}, radius);
    const RunResult r =
        kind == "bead" ? run(c, d, rng, &tr) : single_flip_run(c, d, rng, &tr);
    rows[i] = {seed, r.events, tr.q(0), tr.tagged_displacement(c), tr.max_gap()};
    if (i == replicas - 1) last = c;
  });
  std::ofstream f = open_output(ctx, "dynamics.csv");
  CsvWriter w(f, {"seed", "lattice", "L", "rho1", "rho2", "p", "q", "T", "kind", "events",
                  "Q_face_0_0", "tagged_displacement", "max_gap_R"},
              "dynamics");
  for (const Row& r : rows)
    w.row({std::to_string(r.seed), to_string(sspec.lattice), std::to_string(sspec.L),
           format_double(sspec.lattice == LatticeKind::kHex ? sspec.slope.rho1
                                                             : sspec.square_slope.rho1),
           format_double(sspec.lattice == LatticeKind::kHex ? sspec.slope.rho2
                                                             : sspec.square_slope.rho2),
           format_double(d.p), format_double(d.q), format_double(d.T), kind,
           std::to_string(r.events), std::to_string(r.q00), std::to_string(r.tagged),
           std::to_string(r.gap)});
  save_config(last, ctx.output("final.cfg").string());
  double mean_q = 0;
  for (const Row& r : rows) mean_q += static_cast<double>(r.q00) / replicas;
  ctx.out << kind << " dynamics, " << replicas << " replicas, p=" << d.p << " q=" << d.q
          << " T=" << d.T << "\nmean Q at face (0,0): " << mean_q << "\nwrote "
          << ctx.output("dynamics.csv").string() << "\n";
  return kExitOk;
}

int cmd_determinantal(Context& ctx) {
  const ParamFile& p = ctx.params;
  const std::vector<double> r1 = p.get_list("determinantal.rho1", {1.0 / 3});
  const std::vector<double> r2 = p.get_list("determinantal.rho2", {1.0 / 3});
  if (r1.size() != r2.size())
    throw ConfigError("determinantal.rho1 and determinantal.rho2 differ in length");
  QuadratureOptions opt;
  opt.tol = ctx.rc.tol;
  std::ofstream f = open_output(ctx, "determinantal.csv");
  CsvWriter w(f, {"rho1", "rho2", "rho3", "k1", "k2", "k3", "density_H", "density_NW",
                  "density_NE", "density_sum", "C_rho", "sqrt_k1k2_C", "ciro", "J"},
              "determinantal-table");
  std::ostringstream table;
  table << std::setprecision(6);
  for (size_t i = 0; i < r1.size(); ++i) {
    const Slope s = make_slope(r1[i], r2[i]);
    const KasteleynWeights kw = weights_from_slope(s);
    KernelEvaluator ev(kw, opt);
    const double dh = correlation(ev, {hex_bead_edge(0, 0)});
    const double dnw = correlation(ev, {hex_zigzag_edge(0, 0)});
    const double dne = correlation(ev, {hex_zigzag_edge(0, 1)});
    const double c = c_rho(kw);
    const double sc = std::sqrt(kw.k1 * kw.k2) * c;
    const double j = j_explicit(s);
    w.row({format_double(s.rho1), format_double(s.rho2), format_double(s.rho3),
           format_double(kw.k1), format_double(kw.k2), format_double(kw.k3), format_double(dh),
           format_double(dnw), format_double(dne), format_double(dh + dnw + dne),
           format_double(c), format_double(sc), sc < 1.0 ? "1" : "0", format_double(j)});
    table << "rho=" << slope_text(s) << " k=(" << kw.k1 << "," << kw.k2 << "," << kw.k3
          << ") densities " << dh << " " << dnw << " " << dne << " C=" << c
          << " sqrt(k1k2)C=" << sc << " J=" << j << "\n";
  }
  ctx.out << table.str() << "wrote " << ctx.output("determinantal.csv").string() << "\n";
  return kExitOk;
}

int cmd_dhd(Context& ctx) {
  const ParamFile& p = ctx.params;
  const int n = to_int(p.get_int("dhd.particles", 40), "dhd.particles");
  const double T = p.get_double("dhd.T", 5.0);
  const int trials = to_int(p.get_int("dhd.trials", 100), "dhd.trials");
  const int max_gap = to_int(p.get_int("dhd.max_gap", 4), "dhd.max_gap");
  const double rate = p.get_double("dhd.rate", 1.0);
  if (n < 1 || trials < 1 || max_gap < 1 || !(T >= 0.0) || !(rate >= 0.0))
    throw ConfigError("dhd parameters must be positive");
  struct Trial {
    uint64_t seed;
    std::vector<int64_t> sim, lpp;
    int64_t mismatched_events = 0;
  };
  std::vector<Trial> out(trials);
  parallel_for(trials, ctx.rc.jobs, [&](int i) {
    Trial& t = out[i];
    t.seed = replica_seed(ctx.rc.seed, static_cast<uint64_t>(i));
    Rng rng = make_rng(t.seed);
    std::vector<int64_t> z;
    int64_t x = 0;
    for (int k = 0; k < n; ++k) z.push_back(x += 1 + uniform_below(rng, max_gap));
    const DhdState s(z);
    const PoissonField field = PoissonField::sample(z.front() + 1, z.back(), T, rate, rng);
    const DhdTrajectory tr = dhd_simulate(s, field);
    for (size_t e = 0; e < tr.times.size(); ++e)
      if (dhd_lpp_all(s, field, tr.times[e]) != tr.states[e].positions()) ++t.mismatched_events;
    t.sim = tr.final_state().positions();
    t.lpp = dhd_lpp_all(s, field, T);
  });
  std::ofstream f = open_output(ctx, "dhd.csv");
  CsvWriter w(f, {"seed", "n", "t", "z_sim", "z_lpp", "equal"}, "dhd");
  int64_t mismatches = 0, events = 0;
  for (const Trial& t : out) {
    events += t.mismatched_events;
    for (int k = 0; k < n; ++k) {
      const bool eq = t.sim[k] == t.lpp[k];
      mismatches += !eq;
      w.row({std::to_string(t.seed), std::to_string(k), format_double(T), std::to_string(t.sim[k]),
             std::to_string(t.lpp[k]), eq ? "1" : "0"});
    }
  }
  ctx.out << trials << " trials, " << n << " particles, T=" << T << ": " << mismatches
          << " final-state mismatches, " << events << " mismatched event times\nwrote "
          << ctx.output("dhd.csv").string() << "\n";
  return mismatches == 0 && events == 0 ? kExitOk : kExitAcceptance;
}

ExperimentSpec experiment_spec(const Context& ctx) {
  const ParamFile& p = ctx.params;
  ExperimentSpec s;
  s.kind = experiment_from_string(p.get_string("experiment.kind", "stationarity"));
  s.lattice = lattice_from_string(p.get_string("experiment.lattice", "hex"));
  s.L = to_int(p.get_int("experiment.L", 32), "experiment.L");
  const double r1 = p.get_double("experiment.rho1", s.lattice == LatticeKind::kHex ? 1.0 / 3 : 0.125);
  const double r2 = p.get_double("experiment.rho2", s.lattice == LatticeKind::kHex ? 1.0 / 3 : 0.125);
  if (s.lattice == LatticeKind::kHex)
    s.slope = make_slope(r1, r2);
  else
    s.square_slope = make_square_slope(r1, r2);
  s.p = p.get_double("experiment.p", 0.0);
  s.q = p.get_double("experiment.q", 1.0);
  s.times = p.get_list("experiment.times", s.times);
  s.replicas = to_int(p.get_int("experiment.replicas", s.replicas), "experiment.replicas");
  s.burn_in = p.get_int("experiment.burn_in", -1);
  std::vector<int> sides, windows;
  for (double v : p.get_list("experiment.trend_sides", {16, 32})) sides.push_back(static_cast<int>(v));
  for (double v : p.get_list("experiment.windows", {0, 4, 8, 16}))
    windows.push_back(static_cast<int>(v));
  s.trend_sides = sides;
  s.windows = windows;
  s.gap_radius = to_int(p.get_int("experiment.radius", 4), "experiment.radius");
  s.contrast = p.get_int("experiment.contrast", 1) != 0;
  s.seed = ctx.rc.seed;
  s.jobs = ctx.rc.jobs;
  check_spec(s);
  return s;
}

int cmd_experiment(Context& ctx) {
  const ExperimentSpec spec = experiment_spec(ctx);
  const ResultTable t = run_experiment(spec);
  {
    std::ofstream f = open_output(ctx, "results.csv");
    t.write_csv(f);
  }
  const std::string summary = t.summary();
  {
    std::ofstream f = open_output(ctx, "summary.txt");
    f << summary;
  }
  ctx.out << summary << "wrote " << ctx.output("results.csv").string() << "\n";
  return t.hard_pass() ? kExitOk : kExitAcceptance;
}

int cmd_render(Context& ctx) {
  const std::string input = ctx.params.get_string("render.input", "");
  TorusBeadConfig c;
  if (!input.empty()) {
    c = load_config(input);
  } else if (ctx.params.get_string("render.source", "staircase") == "staircase") {
    const SamplerSpec s = sampler_spec(ctx, "sampler");
    c = seed_config(s);
  } else {
    c = sample_gibbs(sampler_spec(ctx, "sampler"));
  }
  std::ofstream f = open_output(ctx, "tiling.svg");
  f << render_svg(c);
  ctx.out << "rendered " << tiling_polygons(c).size() << " tiles of a "
          << to_string(c.geometry().kind()) << " torus with L=" << c.geometry().side()
          << "\nwrote " << ctx.output("tiling.svg").string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bead dynamics laboratory: lozenge and domino tilings, Gibbs sampling, "
               "determinantal numerics and discrete Hammersley dynamics."};
  app.require_subcommand(1, 1);
  app.fallthrough();
  RunConfig rc;
  app.add_option("--config", rc.config_path, "Parameter file (key = value with [sections])")
      ->check(CLI::ExistingFile);
  app.add_option("--out", rc.out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", rc.seed, "64-bit base seed (default: from entropy, logged)");
  app.add_option("--jobs", rc.jobs, "Worker threads for replica farms (default: all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", rc.tol, "Kernel quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--set", rc.overrides, "Override a parameter: section.key=value");
  app.add_flag("-v,--verbose", rc.verbosity, "More output");
  rc.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (const char* name : {"sample", "dynamics", "determinantal-table", "dhd", "experiment", "render"})
    app.add_subcommand(name, std::string("Run ") + name);
  app.get_subcommand("sample")->description("Sample the Gibbs measure of a winding sector");
  app.get_subcommand("dynamics")->description("Run bead or single-flip dynamics from Gibbs samples");
  app.get_subcommand("determinantal-table")->description("Tabulate kernel densities, C(rho) and J");
  app.get_subcommand("dhd")->description("Check the DHD variational formula on random fields");
  app.get_subcommand("experiment")->description("Run a statistical experiment");
  app.get_subcommand("render")->description("Render a tiling as SVG");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  rc.seed_given = seed_opt->count() > 0;
  rc.subcommand = app.get_subcommands().front()->get_name();

  try {
    Context ctx{rc, {}, out, err};
    if (!rc.config_path.empty()) ctx.params = ParamFile::load(rc.config_path);
    for (const std::string& o : rc.overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) {
        err << "usage error: --set expects section.key=value, got '" << o << "'\n";
        return kExitUsage;
      }
      ctx.params.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (!rc.seed_given) {
      if (ctx.params.has("seed")) {
        ctx.rc.seed = static_cast<uint64_t>(ctx.params.get_int("seed", 0));
      } else {
        std::random_device rd;
        ctx.rc.seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
      }
    }
    out << "seed " << ctx.rc.seed << (rc.seed_given ? "" : " (not given on the command line)")
        << "\n";
    ensure_out_dir(ctx);
    int code = kExitOk;
    if (rc.subcommand == "sample") code = cmd_sample(ctx);
    else if (rc.subcommand == "dynamics") code = cmd_dynamics(ctx);
    else if (rc.subcommand == "determinantal-table") code = cmd_determinantal(ctx);
    else if (rc.subcommand == "dhd") code = cmd_dhd(ctx);
    else if (rc.subcommand == "experiment") code = cmd_experiment(ctx);
    else if (rc.subcommand == "render") code = cmd_render(ctx);
    for (const std::string& k : ctx.params.unused())
      err << "warning: parameter '" << k << "' was not used\n";
    return code;
  } catch (const Error& e) {
    std::string kind = boost::core::demangle(typeid(e).name());
    if (const auto pos = kind.rfind("::"); pos != std::string::npos) kind = kind.substr(pos + 2);
    err << "error (" << kind << "): " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace beadlab
