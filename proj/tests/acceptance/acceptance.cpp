// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/random_params.hpp"
#include "freeharness/error.hpp"
#include "freeharness/harnesscheck.hpp"
#include "freeharness/kernel.hpp"
#include "freeharness/operator.hpp"
#include "freeharness/params.hpp"
#include "freeharness/recurrence.hpp"
#include "freeharness/spectral.hpp"

using namespace freeharness;
using freeharness::testing::case_representatives;
using freeharness::testing::random_valid_params;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << " first failure: " << what << ';';
      pass = false;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string params_str(const HarnessParams& p) {
  return "(" + fmt(p.eta) + "," + fmt(p.theta) + "," + fmt(p.sigma) + "," + fmt(p.tau) + ")";
}

// 1. semicircle density and moments
void semicircle(Outcome& o) {
  const SpectralMeasure m = law_pi({0, 0, 0, 0}, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1001; ++i) {
    const double x = -2.0 + 4.0 * i / 1000.0;
    const double want = std::sqrt(std::max(0.0, 4 - x * x)) / (2 * std::numbers::pi);
    worst = std::max(worst, std::abs(m.density(x) - want));
  }
  o.require(worst <= 1e-8, "density error " + fmt(worst));
  const EcRecurrence r = martingale_recurrence({0, 0, 0, 0}, 1.0);
  const Quadrature q = m.gauss_rule(16);
  const double want[] = {1, 2, 5};
  double rel = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const double oracle = moment_oracle(r, 2 * k);
    o.require(oracle == want[k - 1], "moment oracle m_" + std::to_string(2 * k));
    rel = std::max(rel, std::abs(q.moment(2 * k) - oracle) / oracle);
  }
  o.require(rel <= 1e-9, "moment rel error " + fmt(rel));
  o.detail << " density max err " << fmt(worst) << ", moment rel err " << fmt(rel);
}

// 2. continued fraction vs closed form, and the large-y limit
void transforms(Outcome& o) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> re(-8, 8), im(0.05, 4), tt(0.1, 4);
  double worst = 0.0, limit = 0.0;
  for (const HarnessParams& p : random_valid_params(101, 20)) {
    const double t = tt(gen);
    const EcRecurrence r = martingale_recurrence(p, t);
    for (int i = 0; i < 100; ++i) {
      const Complex z(re(gen), (i % 2 ? 1.0 : -1.0) * im(gen));
      worst = std::max(worst, std::abs(cauchy_cf(r, z) - cauchy_closed_form(p, t, z)));
    }
    const Complex iy(0.0, 1e6);
    limit = std::max(limit, std::abs(iy * cauchy_cf(r, iy) - 1.0));
    limit = std::max(limit, std::abs(iy * cauchy_closed_form(p, t, iy) - 1.0));
  }
  o.require(worst <= 1e-10, "max |G_cf - G_closed| " + fmt(worst));
  o.require(limit <= 1e-6, "max |iyG(iy) - 1| " + fmt(limit));
  o.detail << " max |G_cf - G_closed| " << fmt(worst) << ", max |iyG(iy)-1| " << fmt(limit);
}

// 3. coefficient relations for n <= 50
void relations(Outcome& o) {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> xs(-2, 2), rs(0.1, 3);
  double worst = 0.0;
  for (const HarnessParams& p : random_valid_params(103, 20)) {
    const auto a = verify_coefficient_relations(linear_jacobi_martingale(p, 50), p,
                                                InitialCondition::process(), 50);
    const double x = xs(gen), r = rs(gen);
    const auto b = verify_coefficient_relations(linear_jacobi_conditional(p, x, r, 50), p,
                                                InitialCondition::at(x, r), 50);
    worst = std::max({worst, a.max_residual, b.max_residual});
    o.require(a.pass && b.pass, "relations at " + params_str(p));
  }
  o.require(worst <= 1e-10, "residual " + fmt(worst));
  o.detail << " max residual " << fmt(worst) << " over 20 sets, both initial conditions";
}

// 4. spectral gap and the moving atom
std::vector<HarnessParams> gap_sets() {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> q(0.1, 1.2), extra(0.1, 2.0);
  std::vector<HarnessParams> out;
  auto add = [&](CaseId want, bool with_tau) {
    while (true) {
      const double sigma = q(gen), tau = with_tau ? q(gen) : 0.0;
      if (sigma * tau > 0.9) continue;
      const double eta = 2 * std::sqrt(sigma) + extra(gen);
      const double theta = with_tau ? 2 * std::sqrt(tau) + extra(gen) : extra(gen);
      const HarnessParams p{eta, theta, sigma, tau};
      CaseId c{};
      if (direct_case(p, c) && c == want) {
        out.push_back(p);
        return;
      }
    }
  };
  for (int i = 0; i < 10; ++i) add(CaseId::Case2, true);
  for (int i = 0; i < 5; ++i) add(CaseId::Case4, false);
  return out;
}

void gap(Outcome& o) {
  double gap_mass = 0.0, edge = 0.0, silent = 0.0, weight_err = 0.0;
  int atoms_seen = 0;
  for (const HarnessParams& p : gap_sets()) {
    const Interval g = spectral_gap(p);
    const double cutoff = moving_atom_cutoff(p);
    std::vector<double> ts;
    for (int i = 0; i < 20; ++i) ts.push_back(std::pow(10.0, -2.0 + 3.0 * i / 19.0));
    ts.push_back(cutoff);
    ts.push_back(gap_touch_time(p));
    for (double t : ts) {
      const SpectralMeasure m = law_pi(p, t);
      const Interval ac = m.ac_interval();
      // b+ itself belongs to U and can carry an atom, so the open gap is
      // shrunk by a rounding allowance before counting
      const double tol = 1e-9 * (1.0 + std::abs(g.hi));
      const Quadrature q = m.discretize(2048);
      double inside = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j)
        if (q.nodes[j] > g.lo + tol && q.nodes[j] < g.hi - tol) inside += q.weights[j];
      gap_mass = std::max(gap_mass, inside);
      edge = std::max(edge, g.hi - ac.lo);

      // residues at every candidate, so each contour avoids the other poles
      const auto G = CauchyTransform::closed_form(p, t);
      const std::vector<double> cand = atom_candidates(p, t);
      const auto residues = atom_weights(G, cand, ac, -1.0);
      auto residue_at = [&](double c) {
        for (const Atom& a : residues)
          if (std::abs(a.location - c) <= 1e-12 * (1.0 + std::abs(c))) return a.weight;
        return 0.0;
      };
      if (p.tau > 0.0) silent = std::max(silent, std::abs(residue_at(silent_atom_location(p, t))));
      const double numeric = std::max(0.0, residue_at(moving_atom_location(p, t)));
      if (numeric > 1e-12) ++atoms_seen;
      weight_err = std::max(weight_err, std::abs(moving_atom_weight(p, t) - numeric));
    }
  }
  o.require(gap_mass <= 1e-8, "gap mass " + fmt(gap_mass));
  o.require(edge <= 1e-10, "b+ - a-(t) " + fmt(edge));
  o.require(silent <= 1e-12, "|p+| " + fmt(silent));
  o.require(weight_err <= 1e-7, "|p- closed - residue| " + fmt(weight_err));
  o.require(atoms_seen > 0, "no moving atom observed");
  o.detail << " gap mass " << fmt(gap_mass) << ", max(b+ - a-) " << fmt(edge) << ", |p+| "
           << fmt(silent) << ", |p- - residue| " << fmt(weight_err) << " (" << atoms_seen
           << " atoms)";
}

// five admissible starting points spread over pi_s
std::vector<double> starting_points(const HarnessParams& q, double s) {
  const CdfTable tab(law_pi(q, s), 512);
  std::vector<double> xs;
  for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double x = tab.quantile(v);
    if (admissible_start(q, x)) xs.push_back(x);
  }
  return xs;
}

// 5. martingale identity
void martingale(Outcome& o) {
  double worst = 0.0;
  int points = 0;
  for (const HarnessParams& p : case_representatives()) {
    const HarnessParams q = validate_and_classify(p).reduced;
    for (double s : {0.25, 1.0, 2.0})
      for (double dt : {0.5, 1.0, 3.0})
        for (double x : starting_points(q, s)) {
          const auto r = check_martingale(q, s, x, s + dt, 10, 1e-8);
          worst = std::max(worst, r.max_residual);
          o.require(r.pass, "martingale at " + params_str(p));
          ++points;
        }
  }
  o.require(points >= 7 * 9 * 5 - 10, "too few admissible starting points");
  o.detail << " max residual " << fmt(worst) << " over " << points << " (p,s,t,x) points";
}

// 6. Chapman-Kolmogorov
void chapman_kolmogorov(Outcome& o) {
  double worst = 0.0;
  int runs = 0;
  for (const HarnessParams& p : case_representatives()) {
    const HarnessParams q = validate_and_classify(p).reduced;
    for (Triple tr : {Triple{0.5, 1, 2}, Triple{1, 2, 4}}) {
      std::vector<double> xs{starting_points(q, tr.s)[2]};
      if (admissible_start(q, 0.0)) xs.push_back(0.0);
      for (double x : xs) {
        const auto r = check_chapman_kolmogorov(q, tr.s, tr.t, tr.u, x, 10, 1e-7);
        worst = std::max(worst, r.max_residual);
        o.require(r.pass, "CK at " + params_str(p));
        ++runs;
      }
      const auto r0 = check_chapman_kolmogorov(q, 0.0, tr.t, tr.u, 0.0, 10, 1e-7);
      worst = std::max(worst, r0.max_residual);
      o.require(r0.pass, "CK from the origin at " + params_str(p));
      ++runs;
    }
  }
  o.detail << " max residual " << fmt(worst) << " over " << runs
           << " runs, includes (3,-1,0.5,0.5) with 2+eta*theta+2*sigma*tau = -0.5";
}

// 7. operator identities and negative controls
void operators(Outcome& o) {
  double worst = 0.0;
  int controls_failed = 0, controls = 0;
  for (const HarnessParams& p : random_valid_params(107, 20)) {
    const OperatorPair xy = build_xy(p, 40);
    const auto a = check_q_commutation(p, xy, 1e-10);
    const auto b = check_quadratic_form(p, xy, 0.5, 1.0, 2.0, 1e-10);
    const auto c = check_recurrence_encoding(p, 1.0, x_t(xy, 1.0).m, 1e-10);
    worst = std::max({worst, a.max_residual, b.max_residual, c.max_residual});
    o.require(a.pass && b.pass && c.pass, "operator identity at " + params_str(p));

    OperatorPair bad = xy;
    bad.y.m(3, 4) += 1e-3;
    controls_failed += !check_q_commutation(p, bad, 1e-10).pass;
    controls_failed += !check_quadratic_form(p, bad, 0.5, 1.0, 2.0, 1e-10).pass;
    Eigen::MatrixXd xt = x_t(xy, 1.0).m;
    xt(5, 6) += 1e-3;
    controls_failed += !check_recurrence_encoding(p, 1.0, xt, 1e-10).pass;
    controls += 3;
  }
  o.require(worst <= 1e-10, "residual " + fmt(worst));
  o.require(controls_failed == controls, "negative controls that passed: " +
                                             std::to_string(controls - controls_failed));
  o.detail << " max residual " << fmt(worst) << ", negative controls failing " << controls_failed
           << "/" << controls;
}

// 8. harness suites
void harness(Outcome& o) {
  double lin = 0.0, quad = 0.0, cov = 0.0, mean = 0.0;
  for (const HarnessParams& p : case_representatives()) {
    const SuiteResult r = run_suite(p, Suite::All);
    for (const auto& c : r.reports) {
      double* slot = nullptr;
      if (c.identity == "linreg") slot = &lin;
      if (c.identity == "quadvar") slot = &quad;
      if (c.identity == "covariance") slot = &cov;
      if (c.identity == "mean") slot = &mean;
      if (slot) *slot = std::max(*slot, c.max_residual);
    }
    o.require(r.pass(), "suite at " + params_str(p));
  }
  o.require(lin <= 1e-6 && quad <= 1e-6, "linreg/quadvar residual");
  o.require(cov <= 1e-8, "covariance residual " + fmt(cov));
  o.require(mean <= 1e-10, "mean residual " + fmt(mean));
  o.detail << " linreg " << fmt(lin) << ", quadvar " << fmt(quad) << ", covariance " << fmt(cov)
           << ", mean " << fmt(mean);
}

// 9. connection coefficients
void connection(Outcome& o) {
  std::mt19937_64 gen(909);
  std::uniform_real_distribution<double> xs(-1.5, 1.5), ts(0.1, 2.0);
  double worst = 0.0, at_start = 0.0;
  const auto ps = random_valid_params(109, 10);
  for (const HarnessParams& p : ps) {
    const double x = xs(gen), y = xs(gen), s = ts(gen), t = s + ts(gen);
    const auto a = verify_connection_identity(p, x, s, t, y, 12, 1e-8);
    const auto b = verify_increment_identity(p, x, s, t, y, 12, 1e-8);
    worst = std::max({worst, a.max_residual, b.max_residual});
    at_start = std::max(at_start, b.context["q_at_start_max_abs"].get<double>());
    o.require(a.pass && b.pass, "connection at " + params_str(p));
  }
  o.require(at_start <= 1e-10, "Q_n(x;x,s,s) " + fmt(at_start));
  o.detail << " max residual " << fmt(worst) << ", max |Q_n(x;x,s,s)| " << fmt(at_start);
}

// Kolmogorov-Smirnov distance that allows ties at atoms.
double ks_distance(std::vector<double> draws, const CdfTable& tab) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size();) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    const double v = draws[i];
    d = std::max(d, std::abs(tab.cdf_left(v) - static_cast<double>(i) / n));
    d = std::max(d, std::abs(tab.cdf(v) - static_cast<double>(j) / n));
    i = j;
  }
  return d;
}

// 10. sampling
void sampling(Outcome& o) {
  constexpr std::size_t kDraws = 100000;
  const double critical = 1.6276 / std::sqrt(static_cast<double>(kDraws));
  struct Target {
    HarnessParams p;
    double t;
  };
  for (const Target& tg : {Target{{0, 0, 0, 0}, 1.0}, Target{{3, 2.5, 0.5, 0.5}, 0.3}}) {
    const SpectralMeasure m = law_pi(tg.p, tg.t);
    const CdfTable tab(m);
    Philox rng(20240917, 0);
    std::vector<double> draws(kDraws);
    for (double& v : draws) v = sample(tab, rng);
    const double d = ks_distance(draws, tab);
    o.require(d < critical, "KS " + fmt(d) + " at " + params_str(tg.p));
    o.detail << " KS " << params_str(tg.p) << " t=" << fmt(tg.t) << ": " << fmt(d) << " < "
             << fmt(critical);
    for (const Atom& a : m.atoms()) {
      const double hits = static_cast<double>(std::count(draws.begin(), draws.end(), a.location));
      const double freq = hits / kDraws;
      const double se = std::sqrt(a.weight * (1 - a.weight) / kDraws);
      const double z = std::abs(freq - a.weight) / se;
      o.require(z <= 4.0, "atom frequency off by " + fmt(z) + " se");
      o.detail << "; atom weight " << fmt(a.weight) << " freq " << fmt(freq) << " (" << fmt(z)
               << " se)";
    }
    if (tg.p.eta != 0.0) o.require(!m.atoms().empty(), "Case-2 measure has no atom");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"semicircle density and moments", semicircle},
      {"Cauchy transform agreement", transforms},
      {"coefficient relations", relations},
      {"spectral gap and moving atom", gap},
      {"martingale identity", martingale},
      {"Chapman-Kolmogorov", chapman_kolmogorov},
      {"operator identities", operators},
      {"harness suites", harness},
      {"connection coefficients", connection},
      {"sampling", sampling},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2zu %s: %s;%s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
