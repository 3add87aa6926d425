#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "akdyn/report.hpp"

namespace akdyn::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v))
    throw UsageError(what + ": expected a number, got '" + text + "'");
  return v;
}

// "lo:hi" or a single value; decimal literals are enclosed outwardly.
Interval parse_range(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  const std::string lo = trim(text.substr(0, colon));
  const std::string hi = colon == std::string::npos ? lo : trim(text.substr(colon + 1));
  parse_number(lo, what);
  parse_number(hi, what);
  if (parse_number(lo, what) > parse_number(hi, what)) throw UsageError(what + ": lower end exceeds upper end");
  try {
    return Interval::from_decimal(lo, hi);
  } catch (const std::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
}

std::pair<std::uint32_t, std::uint32_t> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("--grid: expected NxM, got '" + text + "'");
  const double a = parse_number(text.substr(0, x), "--grid"), b = parse_number(text.substr(x + 1), "--grid");
  if (a < 1 || b < 1 || a != std::floor(a) || b != std::floor(b) || a > 4096 || b > 4096)
    throw UsageError("--grid: sizes must be integers in [1, 4096]");
  return {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || trim(t.substr(0, eq)).empty())
      throw UsageError(path + ":" + std::to_string(no) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key == "config") throw UsageError(path + ":" + std::to_string(no) + ": config files cannot include others");
    out.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string default_out_dir() {
  const char* env = std::getenv("AKDYN_OUT_DIR");
  return env && *env ? env : "akdyn-out";
}

// Shared model options; intervals are parsed after CLI11 has run.
struct ModelArgs {
  std::string beta1 = "0.2", beta2 = "0.2", epsilon = "0.8";
  unsigned n = 3;

  void add(CLI::App* app) {
    app->add_option("--beta1", beta1, "Degradation rate beta1, value or lo:hi")->capture_default_str();
    app->add_option("--beta2", beta2, "Degradation rate beta2, value or lo:hi")->capture_default_str();
    app->add_option("--epsilon", epsilon, "Cross-repression weight epsilon, value or lo:hi")->capture_default_str();
    app->add_option("--n", n, "Hill exponent n")->capture_default_str()->check(CLI::Range(1u, 64u));
  }
  ParamBox box(const Interval& a1, const Interval& a2) const {
    ParamBox P;
    P.alpha1 = a1;
    P.alpha2 = a2;
    P.beta1 = parse_range(beta1, "--beta1");
    P.beta2 = parse_range(beta2, "--beta2");
    P.epsilon = parse_range(epsilon, "--epsilon");
    P.n = n;
    try {
      P.validate();
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    return P;
  }
  Params point(double a1, double a2) const {
    Params p;
    p.alpha1 = a1;
    p.alpha2 = a2;
    p.beta1 = parse_number(beta1, "--beta1");
    p.beta2 = parse_number(beta2, "--beta2");
    p.epsilon = parse_number(epsilon, "--epsilon");
    p.n = n;
    try {
      ParamBox::point(p).validate();
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

// Phase box: explicit "b1:b2" (or "b") gives [0,b1] x [0,b2]; otherwise the
// absorbing box for the hull of P and the reference range alpha in [0, 80].
struct BoundsArgs {
  std::string bounds;
  double c1 = 0.8, c2 = 0.8;

  void add(CLI::App* app) {
    app->add_option("--bounds", bounds,
                    "Phase box [0,b1]x[0,b2] as b1:b2 or b (default: absorbing box for alpha in [0,80] "
                    "and the given parameters, [0,101]^2 in the standard regime)");
    app->add_option("--c1", c1, "Margin c1 of the absorbing box b1 = (alpha1 + c1)/(1 - beta1)")->capture_default_str();
    app->add_option("--c2", c2, "Margin c2 of the absorbing box b2 = (alpha2 + c2)/(1 - beta2)")->capture_default_str();
  }
  IRect rect(const ParamBox& P) const {
    if (!bounds.empty()) {
      const auto colon = bounds.find(':');
      const double b1 = parse_number(bounds.substr(0, colon), "--bounds");
      const double b2 = colon == std::string::npos ? b1 : parse_number(bounds.substr(colon + 1), "--bounds");
      if (!(b1 > 0) || !(b2 > 0)) throw UsageError("--bounds: sides must be positive");
      return {Interval(0.0, b1), Interval(0.0, b2)};
    }
    ParamBox wide = P;
    wide.alpha1 = hull(P.alpha1, Interval(0.0, 80.0));
    wide.alpha2 = hull(P.alpha2, Interval(0.0, 80.0));
    try {
      return absorbing_box(wide, c1, c2);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
};

struct DepthArgs {
  int depth = 12;
  int initial_depth = -1;
  int spurious_levels = 2;
  std::uint64_t edge_budget = 0;

  void add(CLI::App* app) {
    app->add_option("--depth", depth, "Subdivision depth d: 2^d cells per axis")->capture_default_str()->check(CLI::Range(0, 16));
    app->add_option("--initial-depth", initial_depth, "Depth d0 of the first full grid (default min(d, 6))")
        ->check(CLI::Range(0, 16));
    app->add_option("--spurious-levels", spurious_levels,
                    "Extra subdivision levels used to discard sets with empty invariant part")
        ->capture_default_str()
        ->check(CLI::Range(0, 4));
    app->add_option("--edge-budget", edge_budget, "Abort when a map graph exceeds this many edges (0: no limit)")
        ->capture_default_str();
  }
  int d0() const {
    const int v = initial_depth < 0 ? std::min(depth, 6) : initial_depth;
    if (v > depth) throw UsageError("--initial-depth must not exceed --depth");
    return v;
  }
  DecompositionOptions options(unsigned threads) const {
    DecompositionOptions o;
    o.build.threads = threads;
    o.build.edge_budget = edge_budget;
    o.spurious_levels = spurious_levels;
    return o;
  }
};

struct Common {
  std::string config;
  std::string out = default_out_dir();
  unsigned jobs = 1;

  void add(CLI::App* app, bool with_out = true) {
    app->add_option("--config", config, "Flat key=value file; keys are option names, the command line wins");
    if (with_out)
      app->add_option("--out", out, "Output directory (default from AKDYN_OUT_DIR, else akdyn-out)")
          ->capture_default_str();
    app->add_option("--jobs", jobs, "Worker threads; outputs do not depend on it")
        ->capture_default_str()
        ->check(CLI::Range(1u, 256u));
  }
  fs::path dir() const {
    fs::create_directories(out);
    return fs::path(out);
  }
};

std::string describe(const MorseSet& s) {
  std::string line = "set " + std::to_string(s.id) + ": " + pictogram_code(s.pictogram) +
                     " cells=" + std::to_string(s.cells.size()) + " isolation=" + to_string(s.isolation);
  if (s.attractor_certificate) line += " certified-attractor";
  if (!s.index_error.empty()) line += " (" + s.index_error + ")";
  return line;
}

void print_order(const MorseDecomposition& d, std::ostream& out) {
  out << "order:";
  for (const auto& [p, q] : d.reduced_order()) out << " " << p << ">" << q;
  out << "\n";
}

void write_pictures(const fs::path& dir, const MorseDecomposition& d, unsigned scan, std::uint64_t scan_iters,
                    std::uint32_t ppm, unsigned jobs) {
  PortraitOptions po;
  if (scan > 0) po.overlay = attractor_scan(d.params.lower_corner(), d.bounds, {scan, scan_iters, jobs});
  write_file(dir / "cmgraph.dot", emit_cmgraph(d));
  write_file(dir / "portrait.svg", emit_phase_portrait(d, po));
  if (ppm > 0) write_file(dir / "portrait.ppm", emit_phase_portrait_ppm(d, ppm, po.overlay));
}

struct PictureArgs {
  unsigned scan = 0;
  std::uint64_t scan_iters = 10000;
  std::uint32_t ppm = 0;
  void add(CLI::App* app) {
    app->add_option("--scan", scan, "Overlay an m x m attractor scan at the lower parameter corner (0: none)")
        ->capture_default_str();
    app->add_option("--scan-iters", scan_iters, "Iterations of the overlay scan")->capture_default_str();
    app->add_option("--ppm", ppm, "Also write a raster portrait this many pixels wide (0: none)")->capture_default_str();
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rigorous Morse decompositions and Conley indices of a two-gene cross-repression map", "akdyn"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.footer(
      "Defaults describe the reference regime: beta1 = beta2 = 0.2, epsilon = 0.8, n = 3, phase box\n"
      "[0,101]^2 (absorbing for alpha in [0,80]^2), 160x160 parameter boxes over [0,80]^2, depth 12,\n"
      "512x512 scans of 10^4 iterations, 128 Lyapunov samples from [0.01,50]^2 with x >= y after 5000\n"
      "burn-in and 1000 recorded steps, 1000 bifurcation columns over alpha in [22.5,36].");

  Common common;
  ModelArgs model;
  BoundsArgs bounds;
  DepthArgs depth;
  PictureArgs pictures;

  // analyze
  std::string a1, a2;
  CLI::App* analyze = app.add_subcommand("analyze", "Morse decomposition and Conley indices of one parameter box");
  analyze->add_option("--alpha1", a1, "Production rate alpha1, value or lo:hi")->required();
  analyze->add_option("--alpha2", a2, "Production rate alpha2, value or lo:hi")->required();
  model.add(analyze);
  bounds.add(analyze);
  depth.add(analyze);
  pictures.add(analyze);
  common.add(analyze);

  // sweep
  std::string alpha_range = "0:80", alpha2_range, grid = "160x160";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Decompositions over a grid of parameter boxes and continuation classes");
  sweep_cmd->add_option("--alpha-range", alpha_range, "Range of alpha1 (and alpha2 unless given)")->capture_default_str();
  sweep_cmd->add_option("--alpha2-range", alpha2_range, "Range of alpha2 (default: --alpha-range)");
  sweep_cmd->add_option("--grid", grid, "Boxes per axis as NxM")->capture_default_str();
  model.add(sweep_cmd);
  bounds.add(sweep_cmd);
  depth.add(sweep_cmd);
  common.add(sweep_cmd);

  // simulate
  std::string s_a1, s_a2;
  ScanOptions scan_opt;
  bool plot = false;
  CLI::App* simulate = app.add_subcommand("simulate", "Attractor scan: final points of an m x m grid of orbits");
  simulate->add_option("--alpha1", s_a1, "Production rate alpha1")->required();
  simulate->add_option("--alpha2", s_a2, "Production rate alpha2")->required();
  simulate->add_option("--m", scan_opt.m, "Initial conditions per axis")->capture_default_str()->check(CLI::Range(1u, 8192u));
  simulate->add_option("--iters", scan_opt.iters, "Iterations per orbit")->capture_default_str();
  simulate->add_flag("--plot", plot, "Also write scan.svg");
  model.add(simulate);
  bounds.add(simulate);
  common.add(simulate);

  // lyapunov
  std::string l_alpha = "1.75", region = "0.01:50", aggregate = "max";
  std::uint32_t l_count = 1;
  std::size_t samples = 128;
  std::uint64_t l_burn = 5000, l_iters = 1000, seed = 1;
  bool full_square = false, tent = false;
  CLI::App* lyap = app.add_subcommand("lyapunov", "Largest Lyapunov exponent along alpha1 = alpha2");
  lyap->add_option("--alpha", l_alpha, "alpha1 = alpha2, value or lo:hi")->capture_default_str();
  lyap->add_option("--count", l_count, "Evenly spaced alpha values")->capture_default_str()->check(CLI::Range(1u, 1000000u));
  lyap->add_option("--samples", samples, "Initial conditions per alpha")->capture_default_str()->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
  lyap->add_option("--burn-in", l_burn, "Burn-in iterations")->capture_default_str();
  lyap->add_option("--iters", l_iters, "Recorded iterations")->capture_default_str()->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  lyap->add_option("--region", region, "Initial conditions drawn from [lo,hi]^2")->capture_default_str();
  lyap->add_flag("--full-square", full_square, "Sample the whole square instead of x >= y");
  lyap->add_option("--seed", seed, "Seed of the initial-condition sampler")->capture_default_str();
  lyap->add_option("--aggregate", aggregate, "Value plotted per alpha")->capture_default_str()->check(CLI::IsMember({"max", "mean"}));
  lyap->add_flag("--tent", tent, "Run the tent-map harness instead of the model");
  lyap->add_flag("--plot", plot, "Also write lyapunov.svg");
  model.add(lyap);
  common.add(lyap);

  // bifdiag
  BifurcationOptions bif;
  std::string b_alpha = "22.5:36", projection = "x";
  CLI::App* bifdiag = app.add_subcommand("bifdiag", "Bifurcation diagram along alpha1 = alpha2");
  bifdiag->add_option("--alpha", b_alpha, "Range of alpha1 = alpha2")->capture_default_str();
  bifdiag->add_option("--count", bif.count, "Evenly spaced alpha values")->capture_default_str()->check(CLI::Range(2u, 1000000u));
  bifdiag->add_option("--burn-in", bif.burn_in, "Burn-in iterations")->capture_default_str();
  bifdiag->add_option("--record", bif.record, "Recorded iterates per alpha")->capture_default_str();
  bifdiag->add_option("--x0", bif.start.x, "Initial x")->capture_default_str();
  bifdiag->add_option("--y0", bif.start.y, "Initial y")->capture_default_str();
  bifdiag->add_option("--projection", projection, "Recorded coordinate")->capture_default_str()->check(CLI::IsMember({"x", "y"}));
  bifdiag->add_flag("--plot", plot, "Also write bifdiag.svg");
  model.add(bifdiag);
  common.add(bifdiag);

  // render
  std::string result_path;
  CLI::App* render = app.add_subcommand("render", "Pictures and CM graph from a result file");
  render->add_option("--result", result_path, "Result file to render")->required();
  pictures.add(render);
  common.add(render);

  // verify
  bool absorbing = false;
  std::string v_a1, v_a2;
  CLI::App* verify = app.add_subcommand("verify", "Rigorous checks");
  verify->add_flag("--absorbing", absorbing, "Prove that the phase box is absorbing for the parameter range")->required();
  verify->add_option("--alpha-range", alpha_range, "Range of alpha1 and alpha2")->capture_default_str();
  verify->add_option("--alpha1", v_a1, "Range of alpha1 (overrides --alpha-range)");
  verify->add_option("--alpha2", v_a2, "Range of alpha2 (overrides --alpha-range)");
  model.add(verify);
  bounds.add(verify);
  common.add(verify, false);

  try {
    // Config entries go before the command line so that explicit options win.
    std::vector<std::string> argv = args;
    if (!argv.empty() && argv[0].rfind("-", 0) != 0) {
      std::string config;
      for (std::size_t k = 1; k < argv.size(); ++k) {
        if (argv[k] == "--config" && k + 1 < argv.size()) config = argv[k + 1];
        if (argv[k].rfind("--config=", 0) == 0) config = argv[k].substr(9);
      }
      if (!config.empty()) {
        std::vector<std::string> merged{argv[0]};
        for (const auto& [k, v] : read_config(config)) merged.push_back("--" + k + "=" + v);
        merged.insert(merged.end(), argv.begin() + 1, argv.end());
        argv = std::move(merged);
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help("akdyn"));
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (analyze->parsed()) {
      const ParamBox P = model.box(parse_range(a1, "--alpha1"), parse_range(a2, "--alpha2"));
      const IRect B = bounds.rect(P);
      const int d0 = depth.d0();
      const MorseDecomposition d = compute_decomposition(P, B, d0, depth.depth, depth.options(common.jobs));
      const fs::path dir = common.dir();
      write_file(dir / "analysis.result", emit_result({std::nullopt, P, d, ""}));
      write_pictures(dir, d, pictures.scan, pictures.scan_iters, pictures.ppm, common.jobs);
      out << "phase box: [0, " << B.x.hi() << "] x [0, " << B.y.hi() << "], depth " << d.depth
          << ", absorbing certificate " << (d.absorbing ? "true" : "false") << "\n";
      out << d.sets.size() << " Morse sets\n";
      bool failures = false;
      for (const MorseSet& s : d.sets) {
        out << describe(s) << "\n";
        failures = failures || !s.index_error.empty();
      }
      print_order(d, out);
      return failures ? kIndexFailures : kOk;
    }

    if (sweep_cmd->parsed()) {
      ParamGrid pg;
      pg.alpha1 = parse_range(alpha_range, "--alpha-range");
      pg.alpha2 = alpha2_range.empty() ? pg.alpha1 : parse_range(alpha2_range, "--alpha2-range");
      std::tie(pg.n1, pg.n2) = parse_grid(grid);
      pg.base = model.box(pg.alpha1, pg.alpha2);
      PhaseConfig cfg;
      cfg.bounds = bounds.rect(pg.base);
      cfg.depth = depth.depth;
      cfg.initial_depth = depth.d0();
      cfg.options = depth.options(1);
      pg.validate();

      const fs::path dir = common.dir();
      std::vector<std::optional<ResultRecord>> existing(pg.size());
      for (std::uint32_t j = 0; j < pg.n2; ++j)
        for (std::uint32_t i = 0; i < pg.n1; ++i) {
          const fs::path f = dir / result_file_name(i, j);
          if (!fs::exists(f)) continue;
          ResultRecord r = parse_result(read_file(f));
          const bool same = r.box == std::make_pair(i, j) && r.params == pg.box(i, j) &&
                            (!r.decomposition || (r.decomposition->depth == cfg.depth &&
                                                  r.decomposition->initial_depth == cfg.initial_depth &&
                                                  r.decomposition->bounds == cfg.bounds));
          if (!same) throw std::runtime_error(f.string() + " belongs to a different sweep");
          existing[pg.index(i, j)] = std::move(r);
        }

      SweepOptions so;
      so.jobs = common.jobs;
      so.skip = [&](std::size_t k) { return existing[k].has_value(); };
      so.on_result = [&](const BoxResult& r) {
        write_file(dir / result_file_name(r.i, r.j), emit_result({std::make_pair(r.i, r.j), r.params, r.decomposition, r.error}));
      };
      const std::vector<BoxResult> results = sweep(pg, cfg, so);

      std::vector<std::optional<MorseDecomposition>> d(pg.size());
      std::size_t failed = 0, reused = 0;
      for (std::size_t k = 0; k < pg.size(); ++k) {
        if (existing[k]) {
          ++reused;
          d[k] = existing[k]->decomposition;
          failed += !existing[k]->error.empty();
        } else {
          d[k] = results[k].decomposition;
          failed += !results[k].error.empty();
        }
      }
      const ContinuationDiagram cd = classes(pg, clutch_all(pg, d), d);
      write_file(dir / "continuation.svg", emit_continuation_diagram(cd, pg));
      write_file(dir / "classes.txt", emit_class_summary(cd, d));
      out << pg.size() << " boxes (" << reused << " reused, " << failed << " failed), " << cd.classes.size()
          << " continuation classes\n";
      return failed ? kIndexFailures : kOk;
    }

    if (simulate->parsed()) {
      const Params p = model.point(parse_number(s_a1, "--alpha1"), parse_number(s_a2, "--alpha2"));
      const IRect B = bounds.rect(ParamBox::point(p));
      scan_opt.threads = common.jobs;
      const auto pts = attractor_scan(p, B, scan_opt);
      const fs::path dir = common.dir();
      write_file(dir / "scan.txt", emit_points(pts));
      if (plot) {
        std::vector<std::pair<double, double>> xy;
        for (const State& s : pts) xy.emplace_back(s.x, s.y);
        write_file(dir / "scan.svg", emit_scatter(xy, "x", "y"));
      }
      out << pts.size() << " final points written\n";
      return kOk;
    }

    if (lyap->parsed()) {
      const Interval range = parse_range(l_alpha, "--alpha");
      const Interval reg = parse_range(region, "--region");
      if (reg.lo() < 0) throw UsageError("--region must lie in the quadrant");
      if (l_count > 1 && range.lo() == range.hi()) throw UsageError("--count > 1 needs a range lo:hi");
      std::string table = "# alpha init x0 y0 exponent\n", summary = "# alpha mean max\n";
      std::vector<std::pair<double, double>> curve;
      const std::vector<State> inits =
          tent ? sample_initial({0.0, 1.0, false}, samples, seed) : sample_initial({reg.lo(), reg.hi(), !full_square}, samples, seed);
      for (std::uint32_t k = 0; k < (tent ? 1u : l_count); ++k) {
        const double a = l_count == 1 ? range.lo() : range.lo() + (range.hi() - range.lo()) * k / (l_count - 1);
        const LyapunovSummary r = tent ? lyapunov_max(tent_harness(), inits, l_burn, l_iters, common.jobs)
                                       : lyapunov_max(model_map(model.point(a, a)), inits, l_burn, l_iters, common.jobs);
        const std::string label = tent ? "tent" : [&] {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", a);
          return std::string(buf);
        }();
        for (std::size_t q = 0; q < r.values.size(); ++q) {
          char buf[128];
          std::snprintf(buf, sizeof buf, " %zu %.17g %.17g %.17g\n", q, inits[q].x, inits[q].y, r.values[q]);
          table += label + buf;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, " %.17g %.17g\n", r.mean, r.max);
        summary += label + buf;
        curve.emplace_back(a, aggregate == "max" ? r.max : r.mean);
      }
      const fs::path dir = common.dir();
      write_file(dir / "lyapunov.txt", table);
      write_file(dir / "lyapunov_summary.txt", summary);
      if (plot) write_file(dir / "lyapunov.svg", emit_scatter(curve, "alpha", "lambda_" + aggregate));
      out << summary;
      return kOk;
    }

    if (bifdiag->parsed()) {
      const Interval range = parse_range(b_alpha, "--alpha");
      bif.alpha_lo = range.lo();
      bif.alpha_hi = range.hi();
      bif.base = model.point(range.lo(), range.lo());
      bif.projection = projection == "x" ? Projection::x : Projection::y;
      bif.threads = common.jobs;
      if (bif.start.x < 0 || bif.start.y < 0) throw UsageError("initial condition must lie in the quadrant");
      const auto pts = bifurcation_diagram(bif);
      const fs::path dir = common.dir();
      write_file(dir / "bifdiag.txt", emit_bifurcation_table(pts));
      if (plot) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& b : pts) xy.emplace_back(b.alpha, b.value);
        write_file(dir / "bifdiag.svg", emit_scatter(xy, "alpha", projection));
      }
      out << bif.count << " alpha values, " << pts.size() << " points\n";
      return kOk;
    }

    if (render->parsed()) {
      const ResultRecord r = parse_result(read_file(result_path));
      if (!r.decomposition) throw std::runtime_error("result file holds no decomposition: " + r.error);
      write_pictures(common.dir(), *r.decomposition, pictures.scan, pictures.scan_iters, pictures.ppm, common.jobs);
      out << "rendered " << r.decomposition->sets.size() << " Morse sets\n";
      return kOk;
    }

    if (verify->parsed()) {
      const ParamBox P = model.box(parse_range(v_a1.empty() ? alpha_range : v_a1, "--alpha1"),
                                   parse_range(v_a2.empty() ? alpha_range : v_a2, "--alpha2"));
      const IRect B = bounds.rect(P);
      const bool ok = verify_absorbing(P, B);
      const IRect image = eval_box(P, B);
      out << "absorbing certificate: " << (ok ? "true" : "false") << "\n"
          << "B = [0, " << B.x.hi() << "] x [0, " << B.y.hi() << "]\n"
          << "f(B) within [" << image.x.lo() << ", " << image.x.hi() << "] x [" << image.y.lo() << ", "
          << image.y.hi() << "]\n";
      return ok ? kOk : kNotCertified;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kHardError;
  }
  return kUsage;
}

}  // namespace akdyn::cli
