#include "lc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "lc/csv.hpp"

namespace fs = std::filesystem;

namespace lc {
namespace {

void apply_preset(const std::string& preset, ModelBundle& b) {
  if (preset == "paper") return;  // library defaults are the full configuration
  if (preset == "desk") {         // coarse grids + shorter horizon for quick runs
    b.gspec.n_assets = 21;
    b.gspec.n_leisure = 5;
    b.gspec.n_parenting = 5;
    b.cal.j_max = 80;
    return;
  }
  throw std::invalid_argument("unknown preset: " + preset + " (expected paper or desk)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    size_t a = item.find_first_not_of(" \t");
    size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

// Reads every recognized key, defaulting to the value already in the bundle.
// dump_config below mirrors this list; keep the two in sync.
void apply_config(const ConfigMap& c, ModelBundle& b) {
  auto& e = b.est;
  e.eta = c.get_double("estimated.eta", e.eta);
  e.psi_L1 = c.get_double("estimated.psi_L1", e.psi_L1);
  e.psi_L2 = c.get_double("estimated.psi_L2", e.psi_L2);
  e.psi_T1 = c.get_double("estimated.psi_T1", e.psi_T1);
  e.psi_T2 = c.get_double("estimated.psi_T2", e.psi_T2);
  e.rho_L = c.get_double("estimated.rho_L", e.rho_L);
  e.rho_T = c.get_double("estimated.rho_T", e.rho_T);
  e.phi_L1_child = c.get_double("estimated.phi_L1_child", e.phi_L1_child);
  e.phi_L2_child = c.get_double("estimated.phi_L2_child", e.phi_L2_child);
  e.phi_L1_nochild = c.get_double("estimated.phi_L1_nochild", e.phi_L1_nochild);
  e.phi_L2_nochild = c.get_double("estimated.phi_L2_nochild", e.phi_L2_nochild);
  e.phi_T1 = c.get_double("estimated.phi_T1", e.phi_T1);
  e.phi_T2 = c.get_double("estimated.phi_T2", e.phi_T2);
  e.phi_C_child = c.get_double("estimated.phi_C_child", e.phi_C_child);

  auto& k = b.cal;
  k.beta = c.get_double("calibrated.beta", k.beta);
  k.r = c.get_double("calibrated.r", k.r);
  k.j_entry = c.get_int("calibrated.j_entry", k.j_entry);
  k.j_retire = c.get_int("calibrated.j_retire", k.j_retire);
  k.j_max = c.get_int("calibrated.j_max", k.j_max);
  k.j_birth = c.get_int("calibrated.j_birth", k.j_birth);
  k.hw_hours_1 = c.get_double("calibrated.hw_hours_1", k.hw_hours_1);
  k.hw_hours_2 = c.get_double("calibrated.hw_hours_2", k.hw_hours_2);
  k.nursery_time = c.get_double("calibrated.nursery_time", k.nursery_time);
  k.rr_pl = c.get_double("calibrated.rr_pl", k.rr_pl);
  k.fee_rate = c.get_double("calibrated.fee_rate", k.fee_rate);
  k.pension_rate = c.get_double("calibrated.pension_rate", k.pension_rate);
  k.wage = c.get_double("calibrated.wage", k.wage);
  k.tax = c.get_double("calibrated.tax", k.tax);
  k.h_ref = c.get_double("calibrated.h_ref", k.h_ref);
  k.wg_scale = c.get_double("calibrated.wg_scale", k.wg_scale);
  k.wg_shift = c.get_double("calibrated.wg_shift", k.wg_shift);
  k.pl_literal = c.get_bool("calibrated.pl_literal", k.pl_literal);
  k.pl_max_childage = c.get_int("calibrated.pl_max_childage", k.pl_max_childage);
  k.nursery_min_childage = c.get_int("calibrated.nursery_min_childage", k.nursery_min_childage);
  k.nursery_max_childage = c.get_int("calibrated.nursery_max_childage", k.nursery_max_childage);
  k.support_max_childage = c.get_int("calibrated.support_max_childage", k.support_max_childage);
  k.bequest_from_offset = c.get_int("calibrated.bequest_from_offset", k.bequest_from_offset);

  auto& g = b.gspec;
  g.n_assets = c.get_int("grids.n_assets", g.n_assets);
  g.n_z = c.get_int("grids.n_z", g.n_z);
  g.n_e = c.get_int("grids.n_e", g.n_e);
  g.n_leisure = c.get_int("grids.n_leisure", g.n_leisure);
  g.n_parenting = c.get_int("grids.n_parenting", g.n_parenting);
  g.asset_max = c.get_double("grids.asset_max", g.asset_max);
  g.time_floor = c.get_double("grids.time_floor", g.time_floor);

  auto& s = b.shocks;
  s.rho11 = c.get_double("shocks.rho11", s.rho11);
  s.rho22 = c.get_double("shocks.rho22", s.rho22);
  s.sigma_eps(0, 0) = c.get_double("shocks.sigma_eps_11", s.sigma_eps(0, 0));
  s.sigma_eps(1, 1) = c.get_double("shocks.sigma_eps_22", s.sigma_eps(1, 1));
  s.sigma_eps(0, 1) = c.get_double("shocks.sigma_eps_12", s.sigma_eps(0, 1));
  s.sigma_eps(1, 0) = s.sigma_eps(0, 1);
  s.sigma_e(0, 0) = c.get_double("shocks.sigma_e_11", s.sigma_e(0, 0));
  s.sigma_e(1, 1) = c.get_double("shocks.sigma_e_22", s.sigma_e(1, 1));
  s.sigma_e(0, 1) = c.get_double("shocks.sigma_e_12", s.sigma_e(0, 1));
  s.sigma_e(1, 0) = s.sigma_e(0, 1);
  s.tauchen_width = c.get_double("shocks.tauchen_width", s.tauchen_width);

  auto& sc = b.sched;
  sc.leisure_slope_child = c.get_double("shifters.leisure_slope_child", sc.leisure_slope_child);
  sc.leisure_slope_nochild =
      c.get_double("shifters.leisure_slope_nochild", sc.leisure_slope_nochild);
  sc.parenting_decline_age =
      c.get_double("shifters.parenting_decline_age", sc.parenting_decline_age);
  sc.parenting_floor_offset =
      c.get_double("shifters.parenting_floor_offset", sc.parenting_floor_offset);
  sc.parenting_flat_top_age =
      c.get_double("shifters.parenting_flat_top_age", sc.parenting_flat_top_age);

  for (auto& t : b.types) t.weight = c.get_double("types.weight_" + t.name(), t.weight);

  b.allow_birth = c.get_bool("solver.allow_birth", b.allow_birth);
  b.survival_weighted = c.get_bool("sim.survival_weighted", b.survival_weighted);
  b.emit_penalty = c.get_bool("sim.penalty", b.emit_penalty);
  b.type_filter = c.get_string("sim.type_filter", b.type_filter);
  b.survival_mode = c.get_string("sim.survival_mode", b.survival_mode);
  b.penalty_horizon = c.get_int("sim.penalty_horizon", b.penalty_horizon);

  auto& m = b.gmm;
  m.age_lo = c.get_int("gmm.age_lo", m.age_lo);
  m.age_hi = c.get_int("gmm.age_hi", m.age_hi);
  m.work_includes_housework =
      c.get_bool("gmm.work_includes_housework", m.work_includes_housework);
  m.weight_work = c.get_double("gmm.weight_work", m.weight_work);
  m.weight_leisure = c.get_double("gmm.weight_leisure", m.weight_leisure);
  m.weight_childcare = c.get_double("gmm.weight_childcare", m.weight_childcare);
  m.free_names = split_list(c.get_string("gmm.free", join_list(m.free_names)));
  m.max_evals = c.get_int("gmm.max_evals", m.max_evals);
  m.tol = c.get_double("gmm.tol", m.tol);
  m.restarts = c.get_int("gmm.restarts", m.restarts);
  m.init_step = c.get_double("gmm.init_step", m.init_step);
  m.penalty = c.get_double("gmm.penalty", m.penalty);
}

void load_tables(const RunConfig& rc, ModelBundle& b) {
  LoadReport rep;
  auto path_of = [&](const char* f) { return (fs::path(rc.data_dir) / f).string(); };
  auto have = [&](const char* f) { return !rc.data_dir.empty() && fs::exists(path_of(f)); };

  if (have("productivity.csv"))
    b.productivity = load_productivity(path_of("productivity.csv"), b.cal, &rep);
  else {
    b.productivity = synth_productivity(b.cal);
    b.notes.push_back("productivity: synthesized default profile");
  }
  if (have("survival.csv"))
    b.survival = load_survival(path_of("survival.csv"), b.cal, &rep);
  else {
    b.survival = synth_survival(b.cal);
    b.notes.push_back("survival: synthesized default profile");
  }
  if (have("timeuse.csv"))
    b.timeuse = load_timeuse(path_of("timeuse.csv"), &rep);
  else {
    b.timeuse = synth_timeuse(b.cal);
    b.notes.push_back("timeuse: synthesized default profile");
  }
  if (have("penalty.csv"))
    b.penalty = load_penalty(path_of("penalty.csv"), &rep);
  else {
    b.penalty = synth_penalty();
    b.notes.push_back("penalty: synthesized default series");
  }
  for (const auto& n : rep.notes) b.notes.push_back(n);
}

}  // namespace

ModelInputs ModelBundle::inputs_for(const HouseholdType& type) const {
  ModelInputs in;
  in.est = est;
  in.cal = cal;
  in.gspec = gspec;
  in.sched = sched;
  in.type = type;
  const int n = cal.n_ages();
  in.ages.kappa1.resize(n);
  in.ages.kappa2.resize(n);
  in.ages.survival.resize(n);
  for (int t = 0; t < n; ++t) {
    int j = cal.j_entry + t;
    in.ages.kappa1(t) = productivity.kappa(j, 1, type.edu);
    in.ages.kappa2(t) = productivity.kappa(j, 2, type.edu);
    in.ages.survival(t) = survival.combined(j, survival_mode);
  }
  in.ages.pension = pension_level(productivity.kappa(cal.j_retire, 1, type.edu),
                                  productivity.kappa(cal.j_retire, 2, type.edu), cal);
  in.zchain = zchain;
  in.edist = edist;
  return in;
}

std::vector<HouseholdType> ModelBundle::active_types() const {
  std::vector<HouseholdType> out;
  if (type_filter.empty()) {
    out.assign(types.begin(), types.end());
    return out;
  }
  for (const auto& want : split_list(type_filter)) {
    bool found = false;
    for (const auto& t : types)
      if (t.name() == want) {
        out.push_back(t);
        found = true;
      }
    if (!found) throw std::invalid_argument("unknown household type in sim.type_filter: " + want);
  }
  return out;
}

ModelBundle build_bundle(const RunConfig& rc, ConfigMap& cfg) {
  ModelBundle b;
  b.threads = rc.threads;
  apply_preset(rc.preset, b);
  apply_config(cfg, b);
  auto leftover = cfg.unconsumed();
  if (!leftover.empty()) {
    std::string msg = "unrecognized settings:";
    for (const auto& k : leftover) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  validate(b.gspec, b.cal);
  validate(b.shocks);
  validate_types(b.types);
  load_tables(rc, b);
  b.zchain = discretize_var(b.shocks, b.gspec.n_z);
  b.edist = discretize_iid(b.shocks.sigma_e, b.gspec.n_e);
  return b;
}

ModelBundle make_bundle(const RunConfig& rc) {
  ConfigMap cfg;
  if (!rc.config_path.empty()) cfg.load_file(rc.config_path);
  for (const auto& s : rc.sets) cfg.set_kv(s, "--set");
  return build_bundle(rc, cfg);
}

std::vector<std::string> dump_config(const ModelBundle& b) {
  std::vector<std::string> out;
  auto d = [&](const std::string& key, double v) { out.push_back(key + " = " + fmt_double(v)); };
  auto i = [&](const std::string& key, int v) { out.push_back(key + " = " + std::to_string(v)); };
  auto bo = [&](const std::string& key, bool v) {
    out.push_back(key + std::string(" = ") + (v ? "true" : "false"));
  };
  auto st = [&](const std::string& key, const std::string& v) { out.push_back(key + " = " + v); };

  const auto& e = b.est;
  d("estimated.eta", e.eta);
  d("estimated.psi_L1", e.psi_L1);
  d("estimated.psi_L2", e.psi_L2);
  d("estimated.psi_T1", e.psi_T1);
  d("estimated.psi_T2", e.psi_T2);
  d("estimated.rho_L", e.rho_L);
  d("estimated.rho_T", e.rho_T);
  d("estimated.phi_L1_child", e.phi_L1_child);
  d("estimated.phi_L2_child", e.phi_L2_child);
  d("estimated.phi_L1_nochild", e.phi_L1_nochild);
  d("estimated.phi_L2_nochild", e.phi_L2_nochild);
  d("estimated.phi_T1", e.phi_T1);
  d("estimated.phi_T2", e.phi_T2);
  d("estimated.phi_C_child", e.phi_C_child);

  const auto& k = b.cal;
  d("calibrated.beta", k.beta);
  d("calibrated.r", k.r);
  i("calibrated.j_entry", k.j_entry);
  i("calibrated.j_retire", k.j_retire);
  i("calibrated.j_max", k.j_max);
  i("calibrated.j_birth", k.j_birth);
  d("calibrated.hw_hours_1", k.hw_hours_1);
  d("calibrated.hw_hours_2", k.hw_hours_2);
  d("calibrated.nursery_time", k.nursery_time);
  d("calibrated.rr_pl", k.rr_pl);
  d("calibrated.fee_rate", k.fee_rate);
  d("calibrated.pension_rate", k.pension_rate);
  d("calibrated.wage", k.wage);
  d("calibrated.tax", k.tax);
  d("calibrated.h_ref", k.h_ref);
  d("calibrated.wg_scale", k.wg_scale);
  d("calibrated.wg_shift", k.wg_shift);
  bo("calibrated.pl_literal", k.pl_literal);
  i("calibrated.pl_max_childage", k.pl_max_childage);
  i("calibrated.nursery_min_childage", k.nursery_min_childage);
  i("calibrated.nursery_max_childage", k.nursery_max_childage);
  i("calibrated.support_max_childage", k.support_max_childage);
  i("calibrated.bequest_from_offset", k.bequest_from_offset);

  const auto& g = b.gspec;
  i("grids.n_assets", g.n_assets);
  i("grids.n_z", g.n_z);
  i("grids.n_e", g.n_e);
  i("grids.n_leisure", g.n_leisure);
  i("grids.n_parenting", g.n_parenting);
  d("grids.asset_max", g.asset_max);
  d("grids.time_floor", g.time_floor);

  const auto& s = b.shocks;
  d("shocks.rho11", s.rho11);
  d("shocks.rho22", s.rho22);
  d("shocks.sigma_eps_11", s.sigma_eps(0, 0));
  d("shocks.sigma_eps_12", s.sigma_eps(0, 1));
  d("shocks.sigma_eps_22", s.sigma_eps(1, 1));
  d("shocks.sigma_e_11", s.sigma_e(0, 0));
  d("shocks.sigma_e_12", s.sigma_e(0, 1));
  d("shocks.sigma_e_22", s.sigma_e(1, 1));
  d("shocks.tauchen_width", s.tauchen_width);

  const auto& sc = b.sched;
  d("shifters.leisure_slope_child", sc.leisure_slope_child);
  d("shifters.leisure_slope_nochild", sc.leisure_slope_nochild);
  d("shifters.parenting_decline_age", sc.parenting_decline_age);
  d("shifters.parenting_floor_offset", sc.parenting_floor_offset);
  d("shifters.parenting_flat_top_age", sc.parenting_flat_top_age);

  for (const auto& t : b.types) d("types.weight_" + t.name(), t.weight);

  bo("solver.allow_birth", b.allow_birth);
  bo("sim.survival_weighted", b.survival_weighted);
  bo("sim.penalty", b.emit_penalty);
  st("sim.type_filter", b.type_filter);
  st("sim.survival_mode", b.survival_mode);
  i("sim.penalty_horizon", b.penalty_horizon);

  const auto& m = b.gmm;
  i("gmm.age_lo", m.age_lo);
  i("gmm.age_hi", m.age_hi);
  bo("gmm.work_includes_housework", m.work_includes_housework);
  d("gmm.weight_work", m.weight_work);
  d("gmm.weight_leisure", m.weight_leisure);
  d("gmm.weight_childcare", m.weight_childcare);
  st("gmm.free", join_list(m.free_names));
  i("gmm.max_evals", m.max_evals);
  d("gmm.tol", m.tol);
  i("gmm.restarts", m.restarts);
  d("gmm.init_step", m.init_step);
  d("gmm.penalty", m.penalty);
  return out;
}

SimResult solve_and_simulate(const ModelBundle& b, const HouseholdType& type, bool allow_birth,
                             Solution* sol_out) {
  ModelInputs in = b.inputs_for(type);
  SolveOptions so;
  so.allow_birth = allow_birth;
  so.threads = b.threads;
  Solution sol = solve_lifecycle(in, so);
  SimOptions simo;
  simo.survival_weighted = b.survival_weighted;
  SimResult r = simulate_distribution(in, sol, simo);
  if (sol_out) *sol_out = std::move(sol);
  return r;
}

AgeProfile aggregate_overall(const ModelBundle& b, const std::vector<HouseholdType>& types) {
  if (types.empty()) throw std::invalid_argument("no household types selected");
  std::vector<AgeProfile> profiles;
  std::vector<double> weights;
  double wsum = 0.0;
  for (const auto& t : types) wsum += t.weight;
  if (!(wsum > 0.0)) throw std::invalid_argument("selected type weights must be positive");
  for (const auto& t : types) {
    profiles.push_back(solve_and_simulate(b, t, b.allow_birth).overall);
    weights.push_back(t.weight / wsum);
  }
  return aggregate_types(profiles, weights);
}

PenaltySeries penalty_for(const ModelBundle& b, const HouseholdType& type) {
  SimResult base = solve_and_simulate(b, type, b.allow_birth);
  if (base.birth_rate <= 0.0)
    throw std::runtime_error("no births at the baseline for type " + type.name() +
                             "; earnings gap undefined");
  SimResult counter = solve_and_simulate(b, type, /*allow_birth=*/false);
  return child_penalty(base.with_child, counter.overall, b.penalty_horizon, b.cal.j_birth);
}

namespace {

void write_profile(const std::string& path, const AgeProfile& p) {
  write_csv(path, p.csv_header(), p.csv_rows());
}

std::vector<std::vector<double>> profile_difference(const AgeProfile& base,
                                                    const AgeProfile& alt) {
  auto rb = base.csv_rows();
  auto ra = alt.csv_rows();
  if (rb.size() != ra.size()) throw std::runtime_error("profiles cover different age ranges");
  for (size_t i = 0; i < rb.size(); ++i) {
    if (rb[i][0] != ra[i][0]) throw std::runtime_error("profiles cover different age ranges");
    for (size_t c = 1; c < rb[i].size(); ++c) ra[i][c] -= rb[i][c];
  }
  return ra;
}

void print_notes(const ModelBundle& b) {
  for (const auto& n : b.notes) std::cout << "note: " << n << "\n";
}

double mean_over_ages(const AgeProfile& p, const Eigen::VectorXd& field, int lo, int hi) {
  double acc = 0.0;
  int cnt = 0;
  for (int j = lo; j <= hi; ++j) {
    int r = p.row_of(j);
    if (r < 0) continue;
    acc += field(r);
    ++cnt;
  }
  return cnt ? acc / cnt : 0.0;
}

int run_solve(const ModelBundle& b, const RunConfig& rc) {
  for (const auto& t : b.active_types()) {
    Solution sol;
    ModelInputs in = b.inputs_for(t);
    SolveOptions so;
    so.allow_birth = b.allow_birth;
    so.threads = b.threads;
    sol = solve_lifecycle(in, so);
    fs::path path = fs::path(rc.out_dir) / ("policy_" + t.name() + ".csv");
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs) throw std::runtime_error("cannot write " + path.string());
    sol.dump_csv(ofs);
    StateIndex probe{b.cal.j_entry, kChildless, 0, (b.gspec.n_z * b.gspec.n_z) / 2,
                     (b.gspec.n_e * b.gspec.n_e) / 2};
    std::cout << t.name() << ": value at entry (zero assets, median shocks) = "
              << fmt_double(sol.value_at(probe))
              << ", birth dominance share = " << fmt_double(sol.birth_dominance_share())
              << ", wrote " << path.string() << "\n";
  }
  return 0;
}

int run_simulate(const ModelBundle& b, const RunConfig& rc) {
  auto types = b.active_types();
  std::vector<AgeProfile> profiles;
  std::vector<double> weights;
  double wsum = 0.0;
  for (const auto& t : types) wsum += t.weight;
  std::vector<std::vector<double>> summary;
  for (const auto& t : types) {
    SimResult sim = solve_and_simulate(b, t, b.allow_birth);
    for (const auto& w : sim.warnings) std::cout << "warning [" << t.name() << "]: " << w << "\n";
    write_profile((fs::path(rc.out_dir) / ("profile_" + t.name() + ".csv")).string(),
                  sim.overall);
    if (b.emit_penalty) {
      if (sim.birth_rate > 0.0) {
        PenaltySeries ps = penalty_for(b, t);
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < ps.event_time.size(); ++i)
          rows.push_back({static_cast<double>(ps.event_time(i)), ps.gap(i)});
        write_csv((fs::path(rc.out_dir) / ("penalty_" + t.name() + ".csv")).string(),
                  {"event_time", "gap"}, rows);
      } else {
        std::cout << "warning [" << t.name() << "]: no births; skipped the earnings-gap series\n";
      }
    }
    summary.push_back({static_cast<double>(summary.size()), sim.birth_rate, sim.top_asset_mass,
                       sim.max_time_residual, sim.max_budget_residual, sim.max_mass_residual});
    std::cout << t.name() << ": birth rate = " << fmt_double(sim.birth_rate)
              << ", top-asset mass = " << fmt_double(sim.top_asset_mass) << "\n";
    profiles.push_back(sim.overall);
    weights.push_back(t.weight / wsum);
  }
  AgeProfile agg = aggregate_types(profiles, weights);
  write_profile((fs::path(rc.out_dir) / "profile_aggregate.csv").string(), agg);
  write_csv((fs::path(rc.out_dir) / "sim_summary.csv").string(),
            {"type_index", "birth_rate", "top_asset_mass", "max_time_residual",
             "max_budget_residual", "max_mass_residual"},
            summary);
  std::cout << "wrote profiles for " << types.size() << " type(s) plus the aggregate under "
            << rc.out_dir << "\n";
  return 0;
}

int run_estimate(const ModelBundle& b, const RunConfig& rc) {
  auto types = b.active_types();
  ProfilePipeline pipe = [&](const EstimatedParams& p) {
    ModelBundle bb = b;
    bb.est = p;
    return aggregate_overall(bb, types);
  };
  GmmOptions g = b.gmm;
  if (g.log_path.empty()) g.log_path = (fs::path(rc.out_dir) / "gmm_log.csv").string();
  EstimateResult r = estimate(pipe, b.timeuse, g, b.est);

  std::ofstream ofs(fs::path(rc.out_dir) / "gmm_result.csv", std::ios::binary);
  if (!ofs) throw std::runtime_error("cannot write gmm_result.csv");
  ofs << "name,value\n";
  Eigen::VectorXd theta = theta_pack(r.params);
  for (size_t i = 0; i < theta_names().size(); ++i)
    ofs << theta_names()[i] << "," << fmt_double(theta(static_cast<int>(i))) << "\n";
  ofs << "objective," << fmt_double(r.objective) << "\n";
  ofs << "evals," << r.evals << "\n";
  ofs << "converged," << (r.converged ? 1 : 0) << "\n";
  ofs.close();

  std::vector<std::vector<double>> mrows;
  for (const auto& m : r.moments)
    mrows.push_back({static_cast<double>(m.age), static_cast<double>(static_cast<int>(m.kind)),
                     m.model, m.data, m.weight, m.residual()});
  write_csv((fs::path(rc.out_dir) / "gmm_moments.csv").string(),
            {"age", "kind", "model", "data", "weight", "residual"}, mrows);

  for (const auto& n : r.notes) std::cout << "note: " << n << "\n";
  std::cout << "objective = " << fmt_double(r.objective) << " after " << r.evals
            << " evaluations (" << (r.converged ? "converged" : "budget") << ")\n";
  return 0;
}

int run_counterfactual(const ModelBundle& b, const RunConfig& rc) {
  if (rc.experiment.empty())
    throw std::invalid_argument("counterfactual needs --experiment "
                                "(rr75 | wage10 | college_vs_highschool | nursery_vs_not)");
  fs::path dir = fs::path(rc.out_dir) / rc.experiment;
  fs::create_directories(dir);
  auto types = b.active_types();

  if (rc.experiment == "rr75" || rc.experiment == "wage10") {
    ModelBundle alt = b;
    if (rc.experiment == "rr75")
      alt.cal.rr_pl = 0.75;
    else
      alt.cal.wage *= 1.1;
    AgeProfile base = aggregate_overall(b, types);
    AgeProfile counter = aggregate_overall(alt, types);
    write_profile((dir / "baseline.csv").string(), base);
    write_profile((dir / "counterfactual.csv").string(), counter);
    write_csv((dir / "difference.csv").string(), base.csv_header(),
              profile_difference(base, counter));
    int lo = b.cal.j_birth, hi = b.cal.j_birth + b.cal.pl_max_childage - 1;
    std::cout << "mean leave take-up over eligible ages: baseline = "
              << fmt_double(mean_over_ages(base, base.prob_pl, lo, hi))
              << ", counterfactual = "
              << fmt_double(mean_over_ages(counter, counter.prob_pl, lo, hi)) << "\n";
    return 0;
  }

  auto group_profiles = [&](auto pred, const std::string& label) {
    std::vector<HouseholdType> grp;
    for (const auto& t : types)
      if (pred(t)) grp.push_back(t);
    if (grp.empty()) throw std::invalid_argument("no selected types in group " + label);
    return aggregate_overall(b, grp);
  };

  if (rc.experiment == "college_vs_highschool") {
    AgeProfile col =
        group_profiles([](const HouseholdType& t) { return t.edu == Education::college; },
                       "college");
    AgeProfile hs =
        group_profiles([](const HouseholdType& t) { return t.edu == Education::highschool; },
                       "highschool");
    write_profile((dir / "college.csv").string(), col);
    write_profile((dir / "highschool.csv").string(), hs);
    write_csv((dir / "difference.csv").string(), col.csv_header(), profile_difference(hs, col));
    std::cout << "lifetime wife earnings: college = " << fmt_double(col.earn2.sum())
              << ", highschool = " << fmt_double(hs.earn2.sum()) << "\n";
    return 0;
  }

  if (rc.experiment == "nursery_vs_not") {
    AgeProfile yes = group_profiles([](const HouseholdType& t) { return t.uses_nursery; },
                                    "nursery");
    AgeProfile no = group_profiles([](const HouseholdType& t) { return !t.uses_nursery; },
                                   "home");
    write_profile((dir / "nursery.csv").string(), yes);
    write_profile((dir / "home.csv").string(), no);
    write_csv((dir / "difference.csv").string(), yes.csv_header(), profile_difference(no, yes));
    int lo = b.cal.j_birth + b.cal.nursery_min_childage;
    int hi = b.cal.j_birth + b.cal.nursery_max_childage;
    std::cout << "mean wife market hours over the outsourcing window: nursery = "
              << fmt_double(mean_over_ages(yes, yes.market2, lo, hi))
              << ", home = " << fmt_double(mean_over_ages(no, no.market2, lo, hi)) << "\n";
    return 0;
  }

  throw std::invalid_argument("unknown experiment: " + rc.experiment);
}

int run_validate(const ModelBundle& b, const RunConfig& rc) {
  int failures = 0;
  auto report = [&](bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    if (!ok) ++failures;
  };

  std::int64_t count = flat_state_count(b.gspec, b.cal);
  if (rc.preset == "paper")
    report(count == 334611, "state-count", std::to_string(count) + " states per branch");
  else
    std::cout << "SKIP state-count: " << count << " states per branch (non-paper preset)\n";

  double row_err = (b.zchain.transition.rowwise().sum().array() - 1.0).abs().maxCoeff();
  report(row_err <= 1e-12, "chain-rows", "max |row sum - 1| = " + fmt_double(row_err));
  double st_err = std::abs(b.zchain.stationary.sum() - 1.0);
  double pe_err = std::abs(b.edist.probs.sum() - 1.0);
  report(st_err <= 1e-12 && pe_err <= 1e-12, "distributions",
         "stationary and transitory masses sum to 1");

  const HouseholdType t = b.active_types().front();
  Solution sol;
  SimResult sim = solve_and_simulate(b, t, b.allow_birth, &sol);
  report(sim.max_time_residual <= 1e-10, "time-identity",
         "max residual = " + fmt_double(sim.max_time_residual) + " (" + t.name() + ")");
  report(sim.max_budget_residual <= 1e-10, "budget-identity",
         "max residual = " + fmt_double(sim.max_budget_residual));
  report(sim.max_mass_residual <= 1e-10, "mass-conservation",
         "max residual = " + fmt_double(sim.max_mass_residual));

  // value weakly increasing in assets at every (j, k, iz, ie)
  const int na = b.gspec.n_assets;
  const int nz2 = b.gspec.n_z * b.gspec.n_z, ne2 = b.gspec.n_e * b.gspec.n_e;
  std::int64_t pairs = 0, good = 0;
  for (int k = 0; k < 2; ++k)
    for (int j = b.cal.j_entry; j <= b.cal.j_max; ++j) {
      if (!sol.has_branch(k, j)) continue;
      const auto& v = sol.at(k, j).value;
      for (int iz = 0; iz < nz2; ++iz)
        for (int ie = 0; ie < ne2; ++ie)
          for (int ia = 0; ia + 1 < na; ++ia) {
            double lo = v(flatten_within_age(ia, iz, ie, b.gspec));
            double hi = v(flatten_within_age(ia + 1, iz, ie, b.gspec));
            ++pairs;
            if (hi >= lo) ++good;
          }
    }
  report(good == pairs, "value-monotone",
         std::to_string(good) + "/" + std::to_string(pairs) + " asset pairs ordered");

  if (sim.birth_rate > 0.0) {
    PenaltySeries ps = penalty_for(b, t);
    int r7 = -1;
    for (int i = 0; i < ps.event_time.size(); ++i)
      if (ps.event_time(i) == 7) r7 = i;
    bool neg = ps.trough_gap() < 0.0;
    bool recovers = r7 >= 0 && ps.gap(r7) > ps.trough_gap();
    bool data_neg = b.penalty.gap.minCoeff() < 0.0;
    report(neg && recovers && data_neg, "earnings-gap",
           "model trough " + fmt_double(ps.trough_gap()) + " at t=" +
               std::to_string(ps.trough_time()) + ", reference trough " +
               fmt_double(b.penalty.gap.minCoeff()));
  } else {
    std::cout << "SKIP earnings-gap: no births under the current settings\n";
  }

  std::cout << (failures == 0 ? "validate: all checks passed\n"
                              : "validate: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 1;
}

int run_export(const ModelBundle& b, const RunConfig& rc) {
  fs::path dir(rc.out_dir);
  write_productivity((dir / "productivity.csv").string(), b.productivity);
  write_survival((dir / "survival.csv").string(), b.survival);
  write_timeuse((dir / "timeuse.csv").string(), b.timeuse);
  write_penalty((dir / "penalty.csv").string(), b.penalty);
  std::ofstream ofs(dir / "defaults.cfg", std::ios::binary);
  if (!ofs) throw std::runtime_error("cannot write defaults.cfg");
  for (const auto& line : dump_config(b)) ofs << line << "\n";
  std::cout << "wrote productivity.csv, survival.csv, timeuse.csv, penalty.csv, defaults.cfg to "
            << rc.out_dir << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& rc) {
  try {
    ModelBundle b = make_bundle(rc);
    fs::create_directories(rc.out_dir);
    print_notes(b);
    if (rc.command == "solve") return run_solve(b, rc);
    if (rc.command == "simulate") return run_simulate(b, rc);
    if (rc.command == "estimate") return run_estimate(b, rc);
    if (rc.command == "counterfactual") return run_counterfactual(b, rc);
    if (rc.command == "validate") return run_validate(b, rc);
    if (rc.command == "export-defaults") return run_export(b, rc);
    throw std::invalid_argument("unknown command: " + rc.command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lc
