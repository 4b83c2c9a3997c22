#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "freeharness/error.hpp"
#include "freeharness/harnesscheck.hpp"
#include "freeharness/kernel.hpp"
#include "freeharness/operator.hpp"
#include "freeharness/params.hpp"
#include "freeharness/recurrence.hpp"
#include "freeharness/report.hpp"
#include "freeharness/rng.hpp"
#include "freeharness/spectral.hpp"

namespace freeharness::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Values shared by every subcommand. Only one subcommand runs per call, so
// all of them bind to the same storage.
struct Shared {
  double eta = 0.0, theta = 0.0, sigma = 0.0, tau = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::string format;
  std::string params_file;
};

struct Command {
  CLI::App* app = nullptr;
  std::string default_format;
  std::function<int(const HarnessParams&, std::ostream&, const std::string& format)> run;
};

void add_shared(CLI::App* sub, Shared& sh) {
  sub->add_option("--eta", sh.eta, "eta (default 0)");
  sub->add_option("--theta", sh.theta, "theta (default 0)");
  sub->add_option("--sigma", sh.sigma, "sigma >= 0 (default 0)");
  sub->add_option("--tau", sh.tau, "tau >= 0 (default 0)");
  sub->add_option("--params-file", sh.params_file,
                  "JSON with eta/theta/sigma/tau (top level or under \"params\"); flags override it");
  sub->add_option("--seed", sh.seed, "64-bit seed (default " + std::to_string(kDefaultSeed) + ")");
  sub->add_option("--out", sh.out_path, "write output to this file instead of stdout");
  sub->add_option("--format", sh.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

HarnessParams gather_params(CLI::App* sub, const Shared& sh) {
  HarnessParams p;
  if (!sh.params_file.empty()) {
    std::ifstream in(sh.params_file);
    if (!in) throw UsageError("cannot read params file " + sh.params_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError("params file is not valid JSON: " + std::string(e.what()));
    }
    const json& src = j.contains("params") ? j.at("params") : j;
    try {
      p.eta = src.value("eta", 0.0);
      p.theta = src.value("theta", 0.0);
      p.sigma = src.value("sigma", 0.0);
      p.tau = src.value("tau", 0.0);
    } catch (const json::exception& e) {
      throw UsageError("params file: " + std::string(e.what()));
    }
  }
  auto given = [sub](const char* name) { return sub->get_option(name)->count() > 0; };
  if (given("--eta")) p.eta = sh.eta;
  if (given("--theta")) p.theta = sh.theta;
  if (given("--sigma")) p.sigma = sh.sigma;
  if (given("--tau")) p.tau = sh.tau;
  return p;
}

json header(const HarnessParams& p) { return {{"version", version()}, {"params", to_json(p)}}; }

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// The one-dimensional law, or P_{s,t}(x,.) when --s was given.
struct MeasureArgs {
  double t = 1.0;
  std::optional<double> s;
  double x = 0.0;

  void add_to(CLI::App* sub) {
    sub->add_option("--t", t, "time t > 0")->required();
    sub->add_option("--s", s, "start time of a transition kernel (needs --x)");
    sub->add_option("--x", x, "starting point of the transition kernel (default 0)");
  }
  [[nodiscard]] SpectralMeasure build(const HarnessParams& p) const {
    if (s) return transition(p, *s, x, t).measure;
    return law_pi(p, t);
  }
  void echo(json& j) const {
    j["t"] = t;
    if (s) {
      j["s"] = *s;
      j["x"] = x;
    }
  }
};

void write_atoms_csv(std::ostream& out, const SpectralMeasure& m) {
  out << "location,weight\n";
  for (const Atom& a : m.atoms()) out << num(a.location) << ',' << num(a.weight) << '\n';
}

json atoms_json(const SpectralMeasure& m) {
  json a = json::array();
  for (const Atom& at : m.atoms()) a.push_back({{"location", at.location}, {"weight", at.weight}});
  return a;
}

std::string atoms_path_for(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of("/\\");
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + "_atoms.csv";
}

json report_row(const CheckReport& r, const HarnessParams& p) {
  json j = header(p);
  const json body = to_json(r);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

void reports_csv(std::ostream& out, const std::vector<CheckReport>& reports) {
  out << "identity,max_residual,tolerance,pass\n";
  for (const auto& r : reports)
    out << r.identity << ',' << num(r.max_residual) << ',' << num(r.tolerance) << ','
        << (r.pass ? "true" : "false") << '\n';
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free quadratic harness toolkit: spectral measures, kernels, sampling, checks.",
               "freeharness"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(version()));
  app.footer("Environment: FREEHARNESS_THREADS caps worker threads.\n"
             "Exit codes: 0 ok/PASS, 1 FAIL, 2 usage, 3 domain error, 4 numerical failure.");

  Shared sh;
  std::vector<Command> commands;
  std::string atoms_out;

  // density
  MeasureArgs dens_args;
  int points = 1001;
  {
    auto* sub = app.add_subcommand("density", "Density of pi_t (or P_{s,t}(x,.)) on a grid");
    dens_args.add_to(sub);
    sub->add_option("--points", points, "grid points across the ac interval (default 1001)")
        ->check(CLI::Range(2, 10000000));
    sub->add_option("--atoms-out", atoms_out,
                    "file for the atoms table (default: <out stem>_atoms.csv, or appended to "
                    "stdout after a blank line)");
    sub->footer("CSV columns: x,density (equispaced over the ac interval), then an atoms table "
                "with columns location,weight.");
    add_shared(sub, sh);
    commands.push_back({sub, "csv", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const SpectralMeasure m = dens_args.build(p);
      std::vector<double> xs, ds;
      if (m.has_ac()) {
        const Interval iv = m.ac_interval();
        for (int i = 0; i < points; ++i) {
          const double x = i == points - 1 ? iv.hi : iv.lo + iv.width() * i / (points - 1);
          xs.push_back(x);
          ds.push_back(m.density(x));
        }
      }
      if (f == "json") {
        json j = header(p);
        dens_args.echo(j);
        if (m.has_ac()) j["ac_interval"] = {m.ac_interval().lo, m.ac_interval().hi};
        j["x"] = xs;
        j["density"] = ds;
        j["atoms"] = atoms_json(m);
        write_json(o, j);
        return kOk;
      }
      o << "x,density\n";
      for (std::size_t i = 0; i < xs.size(); ++i) o << num(xs[i]) << ',' << num(ds[i]) << '\n';
      if (!atoms_out.empty() || !sh.out_path.empty()) {
        const std::string path = atoms_out.empty() ? atoms_path_for(sh.out_path) : atoms_out;
        std::ofstream a(path);
        if (!a) throw UsageError("cannot write " + path);
        write_atoms_csv(a, m);
      } else {
        o << '\n';
        write_atoms_csv(o, m);
      }
      return kOk;
    }});
  }

  // atoms
  MeasureArgs atom_args;
  {
    auto* sub = app.add_subcommand("atoms", "Atoms of pi_t (or P_{s,t}(x,.))");
    atom_args.add_to(sub);
    sub->footer("CSV columns: location,weight.");
    add_shared(sub, sh);
    commands.push_back({sub, "csv", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const SpectralMeasure m = atom_args.build(p);
      if (f == "json") {
        json j = header(p);
        atom_args.echo(j);
        j["atoms"] = atoms_json(m);
        write_json(o, j);
      } else {
        write_atoms_csv(o, m);
      }
      return kOk;
    }});
  }

  // moments
  double mom_t = 1.0;
  int max_degree = 10;
  int gauss_nodes = 32;
  {
    auto* sub = app.add_subcommand("moments", "Moments of pi_t three ways");
    sub->add_option("--t", mom_t, "time t > 0")->required();
    sub->add_option("--max-degree", max_degree, "highest moment (default 10)")->check(CLI::Range(0, 200));
    sub->add_option("--nodes", gauss_nodes, "Gauss nodes (default 32)")->check(CLI::Range(1, 4096));
    sub->footer("CSV columns: k,oracle,gauss,measure. oracle = Jacobi matrix power, gauss = "
                "Golub-Welsch rule, measure = density plus atoms.");
    add_shared(sub, sh);
    commands.push_back({sub, "csv", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const EcRecurrence r = martingale_recurrence(p, mom_t);
      const Quadrature g = gauss_quadrature(r, gauss_nodes);
      const Quadrature q = law_pi(p, mom_t).gauss_rule(gauss_nodes);
      std::vector<double> ks, orc, gs, ms;
      for (int k = 0; k <= max_degree; ++k) {
        ks.push_back(k);
        orc.push_back(moment_oracle(r, k));
        gs.push_back(g.moment(k));
        ms.push_back(q.moment(k));
      }
      if (f == "json") {
        json j = header(p);
        j["t"] = mom_t;
        j["oracle"] = orc;
        j["gauss"] = gs;
        j["measure"] = ms;
        write_json(o, j);
        return kOk;
      }
      o << "k,oracle,gauss,measure\n";
      for (std::size_t i = 0; i < ks.size(); ++i)
        o << i << ',' << num(orc[i]) << ',' << num(gs[i]) << ',' << num(ms[i]) << '\n';
      return kOk;
    }});
  }

  // sample
  MeasureArgs samp_args;
  long long n_samples = 1000;
  {
    auto* sub = app.add_subcommand("sample", "Independent draws from pi_t (or P_{s,t}(x,.))");
    samp_args.add_to(sub);
    sub->add_option("--n", n_samples, "number of draws (default 1000)")->check(CLI::Range(1LL, 100000000LL));
    sub->footer("CSV columns: index,value. Draw i is reproducible from --seed.");
    add_shared(sub, sh);
    commands.push_back({sub, "csv", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const CdfTable table(samp_args.build(p));
      Philox rng(sh.seed, 0);
      std::vector<double> v(static_cast<std::size_t>(n_samples));
      for (double& x : v) x = sample(table, rng);
      if (f == "json") {
        json j = header(p);
        samp_args.echo(j);
        j["seed"] = sh.seed;
        j["values"] = v;
        write_json(o, j);
        return kOk;
      }
      o << "index,value\n";
      for (std::size_t i = 0; i < v.size(); ++i) o << i << ',' << num(v[i]) << '\n';
      return kOk;
    }});
  }

  // path
  std::vector<double> times;
  std::size_t n_paths = 1;
  {
    auto* sub = app.add_subcommand("path", "Markov trajectories on a time grid");
    sub->add_option("--times", times, "strictly increasing positive times, comma separated")
        ->required()
        ->delimiter(',');
    sub->add_option("--paths", n_paths, "number of trajectories (default 1)")->check(CLI::Range(1, 10000000));
    sub->footer("CSV columns: path_id,t,value. Path i depends only on --seed and i.");
    add_shared(sub, sh);
    commands.push_back({sub, "csv", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const auto paths = simulate_paths(p, times, n_paths, sh.seed);
      if (f == "json") {
        json j = header(p);
        j["seed"] = sh.seed;
        j["times"] = times;
        json arr = json::array();
        for (const auto& ps : paths) arr.push_back(ps.values);
        j["paths"] = arr;
        write_json(o, j);
        return kOk;
      }
      o << "path_id,t,value\n";
      for (const auto& ps : paths)
        for (std::size_t i = 0; i < ps.times.size(); ++i)
          o << ps.path_index << ',' << num(ps.times[i]) << ',' << num(ps.values[i]) << '\n';
      return kOk;
    }});
  }

  // ck-check
  double ck_s = 0.5, ck_t = 1.0, ck_u = 2.0, ck_x = 0.0;
  int ck_degree = 10;
  {
    auto* sub = app.add_subcommand("ck-check", "Chapman-Kolmogorov moment check");
    sub->add_option("--s", ck_s, "start time (default 0.5; 0 means the law pi)");
    sub->add_option("--t", ck_t, "intermediate time (default 1)");
    sub->add_option("--u", ck_u, "final time (default 2)");
    sub->add_option("--x", ck_x, "starting point at time s (default 0)");
    sub->add_option("--degree", ck_degree, "highest moment compared (default 10)")->check(CLI::Range(0, 40));
    sub->footer("Runs on the reduced parameters (after negation/time inversion), where forward "
                "kernels exist; x is a point of the reduced process.\n"
                "JSON fields: identity, max_residual, tolerance, pass, plus the grid point.");
    add_shared(sub, sh);
    commands.push_back({sub, "json", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const CaseTag tag = validate_and_classify(p);
      const CheckReport r = check_chapman_kolmogorov(tag.reduced, ck_s, ck_t, ck_u, ck_x, ck_degree);
      if (f == "json") {
        json j = report_row(r, p);
        j["reduced"] = to_json(tag.reduced);
        write_json(o, j);
      } else {
        reports_csv(o, {r});
      }
      return r.pass ? kOk : kFail;
    }});
  }

  // op-check
  std::string identity = "all";
  int op_n = 40;
  double op_s = 0.5, op_t = 1.0, op_u = 2.0;
  {
    auto* sub = app.add_subcommand("op-check", "Operator identities on truncated matrices");
    sub->add_option("--identity", identity, "q-commutation, quadratic-form, recurrence-encoding or all")
        ->check(CLI::IsMember({"q-commutation", "quadratic-form", "recurrence-encoding", "all"}));
    sub->add_option("--N", op_n, "matrix size (default 40)")->check(CLI::Range(8, 2000));
    sub->add_option("--s", op_s, "quadratic-form s (default 0.5)");
    sub->add_option("--t", op_t, "quadratic-form and recurrence-encoding t (default 1)");
    sub->add_option("--u", op_u, "quadratic-form u (default 2)");
    sub->footer("JSON fields: identity, N, block, max_residual, tolerance, pass (a \"reports\" "
                "array for --identity all). CSV columns: identity,max_residual,tolerance,pass.");
    add_shared(sub, sh);
    commands.push_back({sub, "json", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      validate(p);
      const OperatorPair xy = build_xy(p, op_n);
      std::vector<CheckReport> reports;
      if (identity == "q-commutation" || identity == "all") reports.push_back(check_q_commutation(p, xy));
      if (identity == "quadratic-form" || identity == "all")
        reports.push_back(check_quadratic_form(p, xy, op_s, op_t, op_u));
      if (identity == "recurrence-encoding" || identity == "all")
        reports.push_back(check_recurrence_encoding(p, op_t, x_t(xy, op_t).m));
      bool pass = true;
      for (const auto& r : reports) pass = pass && r.pass;
      if (f == "csv") {
        reports_csv(o, reports);
      } else if (reports.size() == 1) {
        write_json(o, report_row(reports.front(), p));
      } else {
        json j = header(p);
        j["pass"] = pass;
        j["reports"] = json::array();
        for (const auto& r : reports) j["reports"].push_back(to_json(r));
        write_json(o, j);
      }
      return pass ? kOk : kFail;
    }});
  }

  // check
  std::string suite_name = "all";
  {
    auto* sub = app.add_subcommand("check", "Harness identity suites on the standard triple grid");
    sub->add_option("--suite", suite_name, "covariance, linreg, quadvar, condvar or all")
        ->check(CLI::IsMember({"covariance", "linreg", "quadvar", "condvar", "all"}));
    sub->footer("JSON fields: version, params, reduced, pass, reports (identity, max_residual, "
                "tolerance, pass, grid point), skipped. CSV columns: identity,max_residual,"
                "tolerance,pass.");
    add_shared(sub, sh);
    commands.push_back({sub, "json", [&](const HarnessParams& p, std::ostream& o, const std::string& f) {
      const SuiteResult r = run_suite(p, parse_suite(suite_name));
      if (f == "csv")
        reports_csv(o, r.reports);
      else
        write_json(o, to_json(r));
      return r.pass() ? kOk : kFail;
    }});
  }

  auto selected = [&]() -> CLI::App* {
    for (auto& c : commands)
      if (c.app->parsed()) return c.app;
    return &app;
  };
  auto usage = [&](const std::string& msg) {
    err << "error: " << msg << "\n\n" << selected()->help();
    return kUsage;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help at either level
      out << selected()->help();
      return kOk;
    }
    return usage(e.what());
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      const HarnessParams p = gather_params(c.app, sh);
      const std::string format = sh.format.empty() ? c.default_format : sh.format;
      if (sh.out_path.empty()) return c.run(p, out, format);
      std::ofstream file(sh.out_path);
      if (!file) throw UsageError("cannot write " + sh.out_path);
      return c.run(p, file, format);
    } catch (const UsageError& e) {
      return usage(e.what());
    } catch (const InvalidParams& e) {
      err << "error: " << e.what() << '\n';
      return kDomain;
    } catch (const DomainError& e) {
      err << "error: " << e.what() << '\n';
      return kDomain;
    } catch (const Error& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kNumerical;
    }
  }
  return usage("no subcommand");
}

}  // namespace freeharness::cli
