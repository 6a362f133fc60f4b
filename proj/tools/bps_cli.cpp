// experiment orchestrator: config ingestion, deterministic seeding, worker
// fan-out over replica slots, and artifact emission. Exit codes: 0 ok,
// 1 run failure, 2 config failure.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bps/annealing.hpp"
#include "bps/artifacts.hpp"
#include "bps/coupling.hpp"
#include "bps/core.hpp"
#include "bps/harris.hpp"
#include "bps/lyapunov.hpp"
#include "bps/torus.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!required.count(item.key()) && !optional.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
  for (const auto& k : required)
    if (!j.contains(k)) throw ConfigError(where + ": missing key '" + k + "'");
}

bps::Vec vec_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  bps::Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::shared_ptr<bps::Potential> potential_from(const json& j) {
  const std::string where = "potential";
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ": missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    require_keys(j, {"kind", "dim"}, {"precision"}, where);
    const int d = j.at("dim").get<int>();
    bps::Mat p = bps::Mat::Identity(d, d);
    if (j.contains("precision")) {
      if (j.at("precision").is_number()) {
        p *= j.at("precision").get<double>();
      } else {
        const auto& rows = j.at("precision");
        if (!rows.is_array() || static_cast<int>(rows.size()) != d)
          throw ConfigError(where + ": precision must be a number or a d x d matrix");
        for (int r = 0; r < d; ++r) p.row(r) = vec_from(rows[r], where + ".precision").transpose();
      }
    }
    return bps::make_gaussian(p);
  }
  if (kind == "double_well") {
    require_keys(j, {"kind", "tilt"}, {}, where);
    return bps::make_double_well(j.at("tilt").get<double>());
  }
  if (kind == "zero") {
    require_keys(j, {"kind", "dim"}, {}, where);
    return bps::make_zero(j.at("dim").get<int>());
  }
  if (kind == "aniso_power") {
    require_keys(j, {"kind", "alpha"}, {}, where);
    return bps::make_aniso_power(vec_from(j.at("alpha"), where + ".alpha"));
  }
  if (kind == "homogeneous_perturbed") {
    require_keys(j, {"kind", "dim", "alpha", "eps"}, {}, where);
    return bps::make_homogeneous_perturbed(j.at("dim").get<int>(), j.at("alpha").get<double>(),
                                           j.at("eps").get<double>());
  }
  if (kind == "scaled") {
    require_keys(j, {"kind", "base", "scale"}, {}, where);
    return bps::make_scaled(potential_from(j.at("base")), j.at("scale").get<double>());
  }
  throw ConfigError(where + ": unknown kind '" + kind + "'");
}

std::shared_ptr<bps::VelocityLaw> velocity_from(const json& j, int dim) {
  const std::string where = "velocity";
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ": missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    require_keys(j, {"kind"}, {"dim", "sigma"}, where);
    const int d = j.value("dim", dim);
    bps::Mat s = bps::Mat::Identity(d, d);
    if (j.contains("sigma")) {
      if (j.at("sigma").is_number()) {
        s *= j.at("sigma").get<double>();
      } else {
        const auto& rows = j.at("sigma");
        if (!rows.is_array() || static_cast<int>(rows.size()) != d)
          throw ConfigError(where + ": sigma must be a number or a d x d matrix");
        for (int r = 0; r < d; ++r) s.row(r) = vec_from(rows[r], where + ".sigma").transpose();
      }
    }
    return bps::make_gaussian_velocity(s);
  }
  if (kind == "sphere") {
    require_keys(j, {"kind"}, {"dim", "r0"}, where);
    return bps::make_sphere_velocity(j.value("dim", dim), j.value("r0", 1.0));
  }
  if (kind == "ball") {
    require_keys(j, {"kind"}, {"dim", "radius"}, where);
    return bps::make_ball_velocity(j.value("dim", dim), j.value("radius", 1.0));
  }
  throw ConfigError(where + ": unknown kind '" + kind + "'");
}

bps::Model model_from(const json& cfg) {
  bps::Model m;
  m.U = potential_from(cfg.at("potential"));
  m.law = velocity_from(cfg.at("velocity"), m.U->dim());
  m.lambda_r = cfg.value("lambda_r", 1.0);
  if (m.law->dim() != m.U->dim()) throw ConfigError("velocity dimension does not match potential");
  return m;
}

// fan n independent jobs over a worker pool; each job writes only its own
// slot, so the aggregate is identical for every worker count
template <class F>
void run_slots(std::size_t n, int workers, F&& body) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
    });
  for (auto& t : pool) t.join();
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

// ---------------------------------------------------------------------------

int cmd_sample(const json& cfg, std::uint64_t seed, int workers, const std::string& out_dir,
               std::uint64_t hash) {
  require_keys(cfg, {"potential", "velocity"},
               {"lambda_r", "t_max", "burn_in", "replicas", "seed"}, "sample");
  bps::Model m = model_from(cfg);
  const double t_max = cfg.value("t_max", 1000.0);
  const double burn_in = cfg.value("burn_in", t_max / 10.0);
  const std::size_t replicas = cfg.value("replicas", std::size_t{1});

  struct Row {
    bps::MeanSe x1, x1sq, speed_sq;
  };
  std::vector<Row> rows(replicas);
  run_slots(replicas, workers, [&](std::size_t i) {
    bps::SimConfig sim;
    sim.t_max = t_max;
    sim.seed = seed;
    sim.chain = static_cast<std::uint32_t>(i);
    bps::Vec x0 = bps::Vec::Zero(m.U->dim());
    bps::RngStream r_init(seed, static_cast<std::uint32_t>(i), bps::role::init);
    bps::Vec y0 = m.law->sample(r_init);
    bps::Trajectory tr = bps::simulate(m, x0, y0, sim);
    rows[i].x1 = bps::time_average(tr, [](const bps::Vec& x, const bps::Vec&) { return x[0]; }, burn_in);
    rows[i].x1sq =
        bps::time_average(tr, [](const bps::Vec& x, const bps::Vec&) { return x[0] * x[0]; }, burn_in);
    rows[i].speed_sq =
        bps::time_average(tr, [](const bps::Vec&, const bps::Vec& y) { return y.squaredNorm(); }, burn_in);
  });

  bps::CsvWriter csv(out_path(out_dir, "sample_summary.csv"),
                     {"replica", "observable", "mean", "se"}, hash, seed);
  double agg[3] = {0, 0, 0}, var[3] = {0, 0, 0};
  for (std::size_t i = 0; i < replicas; ++i) {
    const bps::MeanSe obs[3] = {rows[i].x1, rows[i].x1sq, rows[i].speed_sq};
    const char* names[3] = {"x1", "x1_sq", "speed_sq"};
    for (int k = 0; k < 3; ++k) {
      csv.row({std::to_string(i), names[k], bps::fmt_double(obs[k].mean), bps::fmt_double(obs[k].se)});
      agg[k] += obs[k].mean;
      var[k] += obs[k].se * obs[k].se;
    }
  }
  const char* names[3] = {"x1", "x1_sq", "speed_sq"};
  for (int k = 0; k < 3; ++k)
    csv.row({"all", names[k], bps::fmt_double(agg[k] / replicas),
             bps::fmt_double(std::sqrt(var[k]) / replicas)});
  csv.close();
  std::cout << "sample: replicas=" << replicas << " t_max=" << t_max
            << " x1=" << agg[0] / replicas << " x1_sq=" << agg[1] / replicas
            << " speed_sq=" << agg[2] / replicas << "\n";
  return 0;
}

int cmd_drift_check(const json& cfg, std::uint64_t seed, int workers, const std::string& out_dir,
                    std::uint64_t hash) {
  require_keys(cfg, {"potential", "velocity"},
               {"lambda_r", "varsigma", "R", "radius_hi", "r", "radii", "per_radius", "seed"},
               "drift-check");
  bps::Model m = model_from(cfg);
  bps::LyapunovSpec frame;
  frame.varsigma = cfg.value("varsigma", 1.0);
  frame.psi = frame.varsigma == 1.0 ? bps::PsiChoice::identity : bps::PsiChoice::power;
  const double R = cfg.value("R", 1.0);
  const double radius_hi = cfg.value("radius_hi", 20.0);
  const double r = cfg.value("r", 0.5);
  std::vector<double> radii = {2.5, 5.0, 10.0, 20.0};
  if (cfg.contains("radii")) radii = cfg.at("radii").get<std::vector<double>>();
  const int per_radius = cfg.value("per_radius", 2500);

  bps::MeasuredConstants mc = bps::measure_constants(frame, m, R, radius_hi, r);
  frame.c1 = mc.c1;
  frame.c2 = mc.c2;
  frame.c3 = mc.c3;
  frame.c4 = mc.c4;
  frame.r = mc.r;
  frame.delta = mc.delta;
  frame.R = mc.R;
  bps::LyapunovSpec spec = bps::finalize_spec(frame, m.lambda_r);

  auto pts = bps::sample_drift_points(spec, m, radii, per_radius, seed);
  std::vector<double> av(pts.size()), v(pts.size());
  run_slots(pts.size(), workers, [&](std::size_t i) {
    av[i] = bps::drift_residual(spec, m, pts[i].first, pts[i].second).mean;
    v[i] = bps::eval_V(spec, m, pts[i].first, pts[i].second);
  });
  bps::DriftFit fit = bps::fit_drift_constants(av, v);

  bps::CsvWriter csv(out_path(out_dir, "drift_summary.csv"), {"key", "value"}, hash, seed);
  csv.row({"c1", bps::fmt_double(mc.c1)});
  csv.row({"c2", bps::fmt_double(mc.c2)});
  csv.row({"c3", bps::fmt_double(mc.c3)});
  csv.row({"c4", bps::fmt_double(mc.c4)});
  csv.row({"kappa", bps::fmt_double(spec.kappa)});
  csv.row({"eps", bps::fmt_double(spec.eps)});
  csv.row({"condition13", spec.condition13 ? "true" : "false"});
  csv.row({"feasible", fit.feasible ? "true" : "false"});
  csv.row({"A1", bps::fmt_double(fit.A1)});
  csv.row({"A2", bps::fmt_double(fit.A2)});
  csv.row({"n_points", std::to_string(pts.size())});
  csv.row({"n_offenders", std::to_string(fit.offenders.size())});
  csv.close();
  std::cout << "drift-check: feasible=" << (fit.feasible ? "yes" : "no") << " A1=" << fit.A1
            << " A2=" << fit.A2 << " points=" << pts.size() << "\n";
  return fit.feasible ? 0 : 1;
}

int cmd_couple(const json& cfg, std::uint64_t seed, int workers, const std::string& out_dir,
               std::uint64_t hash) {
  require_keys(cfg, {"potential", "velocity", "rk", "horizon"},
               {"lambda_r", "pairs", "n_mc_bound", "x1", "y1", "x2", "y2", "m_cut", "seed"},
               "couple");
  bps::CouplingScenario sc;
  sc.model = model_from(cfg);
  const int d = sc.model.U->dim();
  sc.rk = cfg.at("rk").get<double>();
  sc.horizon = cfg.at("horizon").get<double>();
  sc.m_cut = cfg.value("m_cut", 0.0);
  sc.x1 = cfg.contains("x1") ? vec_from(cfg.at("x1"), "x1") : bps::Vec(bps::Vec::Zero(d));
  sc.y1 = cfg.contains("y1") ? vec_from(cfg.at("y1"), "y1") : bps::Vec(bps::Vec::Zero(d));
  if (cfg.contains("x2")) {
    sc.x2 = vec_from(cfg.at("x2"), "x2");
  } else {
    sc.x2 = bps::Vec::Zero(d);
    sc.x2[0] = 0.5 * sc.rk;
  }
  sc.y2 = cfg.contains("y2") ? vec_from(cfg.at("y2"), "y2") : bps::Vec(bps::Vec::Zero(d));
  const std::size_t pairs = cfg.value("pairs", std::size_t{200});
  const std::size_t n_mc = cfg.value("n_mc_bound", std::size_t{20000});

  std::vector<bps::MergeReport> reports(pairs);
  run_slots(pairs, workers, [&](std::size_t i) { reports[i] = bps::mirror_couple(sc, seed, i); });
  bps::TvBound tv = bps::tv_upper_from_merges(reports);
  bps::Lemma12Result lb = bps::lemma12_lower_bound(sc, n_mc, seed + 1);

  bps::CsvWriter csv(out_path(out_dir, "couple_pairs.csv"),
                     {"pair", "merged", "merge_time", "n_bounce"}, hash, seed);
  std::size_t merged = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    merged += reports[i].merged;
    csv.row({std::to_string(i), reports[i].merged ? "1" : "0",
             reports[i].merge_time ? bps::fmt_double(*reports[i].merge_time) : "",
             std::to_string(reports[i].n_bounce)});
  }
  csv.close();
  bps::CsvWriter sum(out_path(out_dir, "couple_summary.csv"), {"key", "value"}, hash, seed);
  sum.row({"pairs", std::to_string(pairs)});
  sum.row({"merged", std::to_string(merged)});
  sum.row({"tv_upper", bps::fmt_double(tv.tv)});
  sum.row({"merge_lower_bound", bps::fmt_double(lb.bound)});
  sum.row({"merge_lower_bound_se", bps::fmt_double(lb.se)});
  sum.row({"m_used", bps::fmt_double(lb.m_used)});
  sum.close();
  std::cout << "couple: merged " << merged << "/" << pairs << " tv_upper=" << tv.tv
            << " bound=" << lb.bound << "\n";
  return 0;
}

int cmd_torus(const json& cfg, std::uint64_t seed, int workers, const std::string& out_dir,
              std::uint64_t hash) {
  require_keys(cfg, {"d", "eta", "t"}, {"lambda_r", "n_mc", "pairs", "seed"}, "torus");
  const int d = cfg.at("d").get<int>();
  const double eta = cfg.at("eta").get<double>();
  const double lambda_r = cfg.value("lambda_r", 1.0);
  const std::vector<double> ts = cfg.at("t").get<std::vector<double>>();
  const std::size_t n_mc = cfg.value("n_mc", std::size_t{20000});
  const std::size_t pairs = cfg.value("pairs", std::size_t{2000});

  bps::TorusGeom g(d, eta);
  bps::Vec x1 = bps::Vec::Zero(d), x2(d);
  for (int i = 0; i < d; ++i) x2[i] = 0.5 * g.period(i);
  const bps::Vec y0 = bps::Vec::Zero(d);

  bps::CsvWriter csv(out_path(out_dir, "torus_summary.csv"),
                     {"t", "bound", "bound_se", "emp_tv", "ci_lo", "ci_hi"}, hash, seed);
  std::string line = "torus:";
  for (double t : ts) {
    bps::MeanSe bound = bps::prop1_bound(g, lambda_r, t, n_mc, seed);
    std::vector<bps::MergeReport> reports(pairs);
    run_slots(pairs, workers,
              [&](std::size_t i) { reports[i] = bps::couple_torus_pair(g, lambda_r, x1, y0, x2, y0, t, seed, i); });
    bps::TvBound tv = bps::tv_upper_from_merges(reports);
    csv.row_numeric({t, bound.mean, bound.se, tv.tv, tv.ci.lo, tv.ci.hi});
    line += " t=" + bps::fmt_double(t) + " bound=" + bps::fmt_double(bound.mean) +
            " emp=" + bps::fmt_double(tv.tv);
  }
  csv.close();
  std::cout << line << "\n";
  return 0;
}

int cmd_anneal(const json& cfg, std::uint64_t seed, int workers, const std::string& out_dir,
               std::uint64_t hash) {
  require_keys(cfg, {"potential", "velocity", "schedule", "horizons"},
               {"lambda_r", "replicas", "eta", "eta_prime", "x0", "seed"}, "anneal");
  bps::AnnealConfig ac;
  ac.model = model_from(cfg);
  const json& js = cfg.at("schedule");
  require_keys(js, {"form"}, {"beta0", "d2", "s0", "table"}, "schedule");
  const std::string form = js.at("form").get<std::string>();
  if (form == "log") {
    ac.schedule = bps::CoolingSchedule::log_growth_form(js.value("beta0", 1.0), js.value("d2", 1.0),
                                                        js.value("s0", 1.0));
  } else if (form == "constant") {
    ac.schedule = bps::CoolingSchedule::constant(js.value("beta0", 1.0));
  } else if (form == "table") {
    std::vector<std::pair<double, double>> steps;
    for (const auto& row : js.at("table")) steps.emplace_back(row[0].get<double>(), row[1].get<double>());
    ac.schedule = bps::CoolingSchedule::from_table(std::move(steps));
  } else {
    throw ConfigError("schedule: unknown form '" + form + "'");
  }
  ac.eta = cfg.value("eta", 0.4);
  ac.eta_prime = cfg.value("eta_prime", ac.eta / 2.0);
  if (cfg.contains("x0")) ac.x0 = vec_from(cfg.at("x0"), "x0");
  const std::vector<double> horizons = cfg.at("horizons").get<std::vector<double>>();
  const std::size_t replicas = cfg.value("replicas", std::size_t{200});
  const double min_u = bps::min_potential(*ac.model.U);

  bps::JsonlWriter runs(out_path(out_dir, "anneal_runs.jsonl"), hash, seed);
  bps::CsvWriter csv(out_path(out_dir, "anneal_summary.csv"),
                     {"horizon", "fraction", "ci_lo", "ci_hi", "replicas"}, hash, seed);
  std::string line = "anneal:";
  for (double T : horizons) {
    bps::AnnealConfig run_cfg = ac;
    run_cfg.horizon = T;
    std::vector<double> u_final(replicas);
    run_slots(replicas, workers, [&](std::size_t i) {
      bps::Trajectory tr = bps::simulate_annealed(run_cfg, seed, i);
      u_final[i] = run_cfg.model.U->value(tr.events.back().x);
    });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < replicas; ++i) {
      const bool ok = u_final[i] <= min_u + run_cfg.eta;
      hits += ok;
      runs.line("{\"horizon\":" + bps::fmt_double(T) + ",\"replica\":" + std::to_string(i) +
                ",\"u_final\":" + bps::fmt_double(u_final[i]) +
                ",\"success\":" + (ok ? "true" : "false") + "}");
    }
    const double frac = static_cast<double>(hits) / replicas;
    bps::Interval ci = bps::wilson_interval(hits, replicas);
    csv.row_numeric({T, frac, ci.lo, ci.hi, static_cast<double>(replicas)});
    line += " T=" + bps::fmt_double(T) + " success=" + bps::fmt_double(frac);
  }
  runs.close();
  csv.close();
  std::cout << line << "\n";
  return 0;
}

int cmd_harris(const json& cfg, std::uint64_t seed, int /*workers*/, const std::string& out_dir,
               std::uint64_t hash) {
  require_keys(cfg, {}, {"trials", "seed"}, "harris");
  const std::size_t trials = cfg.value("trials", std::size_t{1000});
  auto [chain, hc] = bps::example_chain();
  bps::ContractionReport rep = bps::check_contraction(chain, hc, trials, seed);

  bps::CsvWriter csv(out_path(out_dir, "harris_summary.csv"), {"key", "value"}, hash, seed);
  csv.row({"alpha", bps::fmt_double(hc.alpha)});
  csv.row({"gamma", bps::fmt_double(hc.gamma)});
  csv.row({"c1", bps::fmt_double(hc.c1)});
  csv.row({"c2", bps::fmt_double(hc.c2)});
  csv.row({"zeta", bps::fmt_double(rep.zeta)});
  csv.row({"kappa", bps::fmt_double(rep.kappa)});
  csv.row({"worst_ratio", bps::fmt_double(rep.worst_ratio)});
  csv.row({"hypotheses_ok", rep.hypotheses_ok ? "true" : "false"});
  csv.row({"pass", rep.pass ? "true" : "false"});
  csv.close();
  std::cout << "harris: kappa=" << rep.kappa << " worst_ratio=" << rep.worst_ratio
            << (rep.pass ? " pass" : " FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_alpha_tilde(const json& cfg, std::uint64_t seed, int workers, const std::string& out_dir,
                    std::uint64_t hash) {
  require_keys(cfg, {"d", "r", "m"}, {"seed"}, "alpha-tilde");
  const int d = cfg.at("d").get<int>();
  const std::vector<double> rs = cfg.at("r").get<std::vector<double>>();
  std::vector<double> ms;
  for (const auto& v : cfg.at("m"))
    ms.push_back(v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>());

  struct Cell {
    double r, m, a;
  };
  std::vector<Cell> cells;
  for (double m : ms)
    for (double r : rs) cells.push_back({r, m, 0.0});
  run_slots(cells.size(), workers,
            [&](std::size_t i) { cells[i].a = bps::alpha_tilde(cells[i].r, cells[i].m, d); });

  bps::CsvWriter csv(out_path(out_dir, "alpha_tilde.csv"), {"r", "m", "alpha"}, hash, seed);
  for (const auto& c : cells) csv.row_numeric({c.r, c.m, c.a});
  csv.close();
  std::cout << "alpha-tilde: " << cells.size() << " grid cells written\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-deterministic sampler experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  int workers = 1;

  const std::vector<std::string> names = {"sample", "drift-check", "couple", "torus",
                                          "anneal", "harris",      "alpha-tilde"};
  for (const auto& n : names) {
    auto* sub = app.add_subcommand(n, n + " experiment");
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed_flag, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--workers", workers, "worker pool size");
    sub->add_option("--out", out_dir, "artifact directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  json cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    std::cerr << "config failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config failure: " << e.what() << "\n";
    return 2;
  }

  const std::uint64_t hash = bps::fnv1a64(cfg.dump());
  std::uint64_t seed = 1;
  if (cfg.is_object() && cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
  if (seed_given) seed = seed_flag;

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (sub == "sample") return cmd_sample(cfg, seed, workers, out_dir, hash);
    if (sub == "drift-check") return cmd_drift_check(cfg, seed, workers, out_dir, hash);
    if (sub == "couple") return cmd_couple(cfg, seed, workers, out_dir, hash);
    if (sub == "torus") return cmd_torus(cfg, seed, workers, out_dir, hash);
    if (sub == "anneal") return cmd_anneal(cfg, seed, workers, out_dir, hash);
    if (sub == "harris") return cmd_harris(cfg, seed, workers, out_dir, hash);
    if (sub == "alpha-tilde") return cmd_alpha_tilde(cfg, seed, workers, out_dir, hash);
  } catch (const ConfigError& e) {
    std::cerr << "config failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "config failure: unknown subcommand\n";
  return 2;
}
