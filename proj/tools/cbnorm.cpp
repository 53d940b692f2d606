// Command line front end: channel inspection, vector-valued norms, the
// completely bounded entropy quantities, tensor-product checks, and the
// randomized inequality suites. Prints a json report to stdout (csv for the
// two tabular verbs when asked) and exits 0 on success, 2 on invalid input,
// 3 on an inequality violation, 4 when the exploratory three-factor
// interchange probe reports a finding.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cbnorm/cbentropy.hpp"
#include "cbnorm/channel_io.hpp"
#include "cbnorm/channels.hpp"
#include "cbnorm/inequalities.hpp"
#include "cbnorm/report.hpp"
#include "cbnorm/vnorms.hpp"

namespace {

using namespace cbnorm;

DimSplit parse_dims(const std::string& text) {
  DimSplit out;
  out.dims.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(item, &used);
      if (used != item.size() || d < 1) throw std::invalid_argument(item);
      out.dims.push_back(d);
    } catch (const std::exception&) {
      throw BadNameError("--dims entry '" + item + "' is not a positive integer");
    }
  }
  if (out.dims.size() < 2) throw BadNameError("--dims needs at least two comma separated factors");
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct CommonArgs {
  std::string channel;
  std::string channel_b;
  double p = 2.0;
  double q = 1.0;
  double t = 1.5;
  std::string dims;
  int trials = 100;
  std::uint64_t seed = 1;
  int restarts = 20;
  bool max_entangled = false;
  std::string report_path;
  bool csv = false;
};

NormParams norm_params(const CommonArgs& a) {
  NormParams prm;
  prm.p = a.p;
  prm.restarts = a.restarts;
  prm.seed = a.seed;
  return prm;
}

void echo_common(OrderedJson& j, const CommonArgs& a) {
  j["inputs"]["seed"] = a.seed;
  j["inputs"]["restarts"] = a.restarts;
}

int run_chan(const CommonArgs& a) {
  WallClock clock;
  const Channel ch = channel_from_arg(a.channel);
  const ChannelCheck check = validate(ch);
  OrderedJson j = new_report("chan");
  j["inputs"]["channel"] = a.channel;
  j["results"]["channel"] = channel_json(ch);
  j["results"]["cp"] = check.cp;
  j["results"]["tp"] = check.tp;
  j["results"]["min_choi_eig"] = check.min_choi_eig;
  j["results"]["tp_residual"] = check.tp_residual;
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_norm(const CommonArgs& a) {
  WallClock clock;
  const Channel ch = channel_from_arg(a.channel);
  const NormParams prm = norm_params(a);
  const OptReport rep = vv_inf_norm(choi(ch), DimSplit{ch.d_in, ch.d_out}, a.t, a.p, prm);
  OrderedJson j = new_report("norm");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["t"] = a.t;
  j["inputs"]["p"] = a.p;
  echo_common(j, a);
  j["results"]["value"] = rep.value;
  j["results"]["argument"] = matrix_to_json(rep.argument);
  j["diagnostics"]["iterations"] = rep.iterations;
  j["diagnostics"]["restarts_used"] = rep.restarts_used;
  j["diagnostics"]["converged"] = rep.converged;
  j["diagnostics"]["spread"] = rep.spread;
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_omega(const CommonArgs& a) {
  WallClock clock;
  const Channel ch = channel_from_arg(a.channel);
  const CbResult res = omega_p(ch, a.p, norm_params(a), a.max_entangled);
  OrderedJson j = new_report("omega");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["p"] = a.p;
  j["inputs"]["max_entangled"] = a.max_entangled;
  echo_common(j, a);
  j["results"] = cb_result_json(res);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_nu(const CommonArgs& a) {
  WallClock clock;
  const Channel ch = channel_from_arg(a.channel);
  const OptReport rep = nu_p(ch, a.p, norm_params(a));
  OrderedJson j = new_report("nu");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["p"] = a.p;
  echo_common(j, a);
  j["results"] = opt_report_json(rep);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_scbmin(const CommonArgs& a) {
  WallClock clock;
  const Channel ch = channel_from_arg(a.channel);
  const CbResult res = s_cb_min(ch, norm_params(a), a.max_entangled);
  OrderedJson j = new_report("scbmin");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["max_entangled"] = a.max_entangled;
  echo_common(j, a);
  j["results"] = cb_result_json(res);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_limit(const CommonArgs& a) {
  WallClock clock;
  const Channel ch = channel_from_arg(a.channel);
  const NormParams prm = norm_params(a);
  std::vector<std::pair<double, double>> table;
  const double estimate = cb_limit_estimate(ch, {1.2, 1.1, 1.05, 1.02, 1.01}, prm, &table);
  const CbResult direct = s_cb_min(ch, prm);
  OrderedJson j = new_report("limit");
  j["inputs"]["channel"] = a.channel;
  echo_common(j, a);
  j["results"]["estimate"] = estimate;
  j["results"]["direct"] = direct.value;
  j["results"]["gap"] = estimate - direct.value;
  OrderedJson rows = OrderedJson::array();
  for (const auto& [p, f] : table) rows.push_back(OrderedJson{{"p", p}, {"f", f}});
  j["results"]["table"] = std::move(rows);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  if (a.csv) {
    std::cout << "p,f\n";
    for (const auto& [p, f] : table) std::cout << fmt(p) << "," << fmt(f) << "\n";
  }
  emit_report(j, a.report_path, !a.csv);
  return 0;
}

int run_mult(const CommonArgs& a) {
  WallClock clock;
  const Channel ca = channel_from_arg(a.channel);
  const Channel cb = channel_from_arg(a.channel_b);
  const PairCheck res = mult_check_omega(ca, cb, a.p, norm_params(a));
  OrderedJson j = new_report("mult");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["channel_b"] = a.channel_b;
  j["inputs"]["p"] = a.p;
  echo_common(j, a);
  j["results"] = pair_check_json(res);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_add(const CommonArgs& a) {
  WallClock clock;
  const Channel ca = channel_from_arg(a.channel);
  const Channel cb = channel_from_arg(a.channel_b);
  const PairCheck res = add_check_scb(ca, cb, norm_params(a));
  OrderedJson j = new_report("add");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["channel_b"] = a.channel_b;
  echo_common(j, a);
  j["results"] = pair_check_json(res);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_mustar(const CommonArgs& a, int d) {
  WallClock clock;
  const MuStar res = mu_star(d);
  OrderedJson j = new_report("mustar");
  j["inputs"]["d"] = d;
  j["results"]["root"] = res.root;
  j["results"]["reference"] = res.reference;
  j["results"]["discrepancy"] = res.discrepancy;
  j["results"]["iterations"] = res.iterations;
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  return 0;
}

int run_sweep(const CommonArgs& a) {
  WallClock clock;
  // the sweep walks the closed-form output family, which exists for any
  // (lambda, tau); parse the parameters without demanding a CP channel
  const ChannelSpec spec = parse_channel_spec(a.channel);
  if (spec.name != "nonunital")
    throw BadNameError("sweep works on the nonunital family, got '" + spec.name + "'");
  detail::spec_allow(spec, {"lambda", "tau"});
  const double lambda = detail::spec_get(spec, "lambda");
  const double tau = detail::spec_get(spec, "tau");
  const SweepResult res = nonunital_sweep(lambda, tau, a.p);
  OrderedJson j = new_report("sweep");
  j["inputs"]["channel"] = a.channel;
  j["inputs"]["lambda"] = lambda;
  j["inputs"]["tau"] = tau;
  j["inputs"]["p"] = a.p;
  j["results"]["a_star"] = res.a_star;
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < res.a_grid.size(); ++i)
    rows.push_back(OrderedJson{{"a", res.a_grid[i]}, {"ratio", res.ratios[i]}});
  j["results"]["table"] = std::move(rows);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  if (a.csv) {
    std::cout << "a,ratio\n";
    for (std::size_t i = 0; i < res.a_grid.size(); ++i)
      std::cout << fmt(res.a_grid[i]) << "," << fmt(res.ratios[i]) << "\n";
  }
  emit_report(j, a.report_path, !a.csv);
  return 0;
}

int run_ineq(const CommonArgs& a, const std::string& suite, bool dims_given, bool trials_given) {
  WallClock clock;
  TrialConfig cfg;
  cfg.seed = a.seed;
  cfg.p = a.p;
  cfg.q = a.q;
  cfg.t = a.t;
  if (trials_given) cfg.trials = a.trials;
  if (dims_given) {
    cfg.dims = parse_dims(a.dims);
  } else if (suite == "ssa" || suite == "mink3") {
    cfg.dims = DimSplit{2, 2, 2};
  } else if (suite == "cond_subadd") {
    cfg.dims = DimSplit{2, 2, 2, 2};
  }

  const bool needs_channel =
      suite == "ebt_lemma" || suite == "positive_achiever" || suite == "q_geq_p";
  Channel ch;
  if (needs_channel) {
    if (a.channel.empty()) throw BadNameError("suite '" + suite + "' needs --channel");
    ch = channel_from_arg(a.channel);
  }

  SuiteReport rep;
  if (suite == "ssa") rep = ssa_check(cfg);
  else if (suite == "cond_subadd") rep = cond_subadd_check(cfg);
  else if (suite == "minkowski") rep = minkowski_checks(cfg);
  else if (suite == "mink3") rep = mink3_check(cfg);
  else if (suite == "lieb_thirring") rep = lieb_thirring_check(cfg);
  else if (suite == "klein") rep = klein_check(cfg);
  else if (suite == "ebt_lemma") rep = ebt_lemma_check(ch, cfg);
  else if (suite == "deriv_1p") rep = deriv_1p_check(cfg);
  else if (suite == "bp_convergence") rep = bp_convergence_check(cfg);
  else if (suite == "positive_achiever") rep = positive_achiever_check(ch, cfg);
  else if (suite == "q_geq_p") rep = q_geq_p_check(ch, cfg);
  else throw BadNameError("unknown inequality suite '" + suite + "'");

  OrderedJson j = new_report("ineq");
  j["inputs"]["suite"] = suite;
  j["inputs"]["trials"] = cfg.trials;
  j["inputs"]["seed"] = cfg.seed;
  j["inputs"]["p"] = cfg.p;
  j["inputs"]["q"] = cfg.q;
  j["inputs"]["t"] = cfg.t;
  j["inputs"]["slack_tol"] = cfg.slack_tol;
  {
    OrderedJson dims = OrderedJson::array();
    for (int d : cfg.dims.dims) dims.push_back(d);
    j["inputs"]["dims"] = std::move(dims);
  }
  if (needs_channel) j["inputs"]["channel"] = a.channel;
  j["results"] = suite_report_json(rep);
  j["diagnostics"]["wall_time_s"] = clock.seconds();
  emit_report(j, a.report_path, true);
  if (!rep.passed) return suite == "mink3" ? 4 : 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"completely bounded p-norms and minimal conditional entropy of quantum channels"};
  app.require_subcommand(1);

  CommonArgs a;
  int mustar_d = 2;
  std::string ineq_suite;

  const auto add_channel = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--channel", a.channel,
                                "channel as name:key=val,... or a path to a .json file");
    if (required) opt->required();
    return opt;
  };
  const auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", a.seed, "random seed")->envname("CBNORM_SEED");
  };
  const auto add_restarts = [&](CLI::App* sub) {
    sub->add_option("--restarts", a.restarts, "optimizer restarts");
  };
  const auto add_report = [&](CLI::App* sub) {
    sub->add_option("--report", a.report_path, "also write the json report to this path");
  };

  auto* chan = app.add_subcommand("chan", "inspect a channel: dimensions, cp and tp checks");
  add_channel(chan, true);
  add_report(chan);

  auto* norm = app.add_subcommand("norm", "vector-valued (t,p) norm of the channel's choi matrix");
  add_channel(norm, true);
  norm->add_option("--t", a.t, "outer exponent")->default_val(1.0);
  norm->add_option("--p", a.p, "inner exponent")->default_val(2.0);
  add_restarts(norm);
  add_seed(norm);
  add_report(norm);

  auto* omega = app.add_subcommand("omega", "completely bounded p-norm over bipartite inputs");
  add_channel(omega, true);
  omega->add_option("--p", a.p, "Schatten exponent")->default_val(2.0);
  omega->add_flag("--max-entangled", a.max_entangled,
                  "evaluate at the maximally entangled input instead of optimizing");
  add_restarts(omega);
  add_seed(omega);
  add_report(omega);

  auto* nu = app.add_subcommand("nu", "largest output p-norm over unentangled pure inputs");
  add_channel(nu, true);
  nu->add_option("--p", a.p, "Schatten exponent")->default_val(2.0);
  add_restarts(nu);
  add_seed(nu);
  add_report(nu);

  auto* scbmin = app.add_subcommand("scbmin", "minimal conditional output entropy in bits");
  add_channel(scbmin, true);
  scbmin->add_flag("--max-entangled", a.max_entangled,
                   "evaluate at the maximally entangled input instead of optimizing");
  add_restarts(scbmin);
  add_seed(scbmin);
  add_report(scbmin);

  auto* limit = app.add_subcommand("limit", "p -> 1 norm limit against the direct entropy value");
  add_channel(limit, true);
  add_restarts(limit);
  add_seed(limit);
  limit->add_flag("--csv", a.csv, "print the (p, f) table as csv instead of json");
  add_report(limit);

  auto* mult = app.add_subcommand("mult", "multiplicativity check across a tensor product");
  add_channel(mult, true);
  mult->add_option("--channel-b", a.channel_b, "second factor")->required();
  mult->add_option("--p", a.p, "Schatten exponent")->default_val(2.0);
  add_restarts(mult);
  add_seed(mult);
  add_report(mult);

  auto* add = app.add_subcommand("add", "additivity check of the minimal conditional entropy");
  add_channel(add, true);
  add->add_option("--channel-b", a.channel_b, "second factor")->required();
  add_restarts(add);
  add_seed(add);
  add_report(add);

  auto* mustar = app.add_subcommand("mustar", "depolarizing parameter where the entropy crosses zero");
  mustar->add_option("--d", mustar_d, "local dimension")->default_val(2);
  add_report(mustar);

  auto* sweep = app.add_subcommand("sweep", "ratio sweep over the nonunital output family");
  add_channel(sweep, true);
  sweep->add_option("--p", a.p, "Schatten exponent")->default_val(2.0);
  sweep->add_flag("--csv", a.csv, "print the (a, ratio) table as csv instead of json");
  add_report(sweep);

  auto* ineq = app.add_subcommand("ineq", "randomized inequality suites");
  ineq->add_option("suite", ineq_suite,
                   "one of: ssa, cond_subadd, minkowski, mink3, lieb_thirring, klein, "
                   "ebt_lemma, deriv_1p, bp_convergence, positive_achiever, q_geq_p")
      ->required();
  add_channel(ineq, false);
  auto* trials_opt = ineq->add_option("--trials", a.trials, "number of random trials");
  auto* dims_opt = ineq->add_option("--dims", a.dims, "tensor factors, e.g. 2,2,2");
  ineq->add_option("--p", a.p, "exponent p where the suite uses one")->default_val(2.0);
  ineq->add_option("--q", a.q, "exponent q where the suite uses one")->default_val(1.0);
  ineq->add_option("--t", a.t, "exponent t where the suite uses one")->default_val(1.5);
  add_seed(ineq);
  add_report(ineq);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (chan->parsed()) return run_chan(a);
    if (norm->parsed()) return run_norm(a);
    if (omega->parsed()) return run_omega(a);
    if (nu->parsed()) return run_nu(a);
    if (scbmin->parsed()) return run_scbmin(a);
    if (limit->parsed()) return run_limit(a);
    if (mult->parsed()) return run_mult(a);
    if (add->parsed()) return run_add(a);
    if (mustar->parsed()) return run_mustar(a, mustar_d);
    if (sweep->parsed()) return run_sweep(a);
    if (ineq->parsed())
      return run_ineq(a, ineq_suite, dims_opt->count() > 0, trials_opt->count() > 0);
  } catch (const cbnorm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
