#include "lc/tables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lc/csv.hpp"

namespace lc {
namespace {

void note(LoadReport* report, const std::string& msg) {
  if (report) report->notes.push_back(msg);
}

Eigen::VectorXd column(const CsvTable& t, const std::string& name) {
  int c = t.require_col(name);
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.rows.size()));
  for (size_t i = 0; i < t.rows.size(); ++i) v(static_cast<Eigen::Index>(i)) = t.rows[i][c];
  return v;
}

// Resample an (age, value) series onto integer ages [lo, hi]: linear between
// sample points, flat beyond the first/last sample.
Eigen::VectorXd resample(const Eigen::VectorXd& age_in, const Eigen::VectorXd& val_in, int lo,
                         int hi, const std::string& label, LoadReport* report) {
  const int n_in = static_cast<int>(age_in.size());
  if (n_in == 0) throw std::runtime_error(label + ": no rows");
  for (int i = 1; i < n_in; ++i) {
    if (age_in(i) <= age_in(i - 1))
      throw std::runtime_error(label + ": age column must be strictly increasing");
  }
  Eigen::VectorXd out(hi - lo + 1);
  bool extended = false, interpolated = false;
  for (int j = lo; j <= hi; ++j) {
    double a = static_cast<double>(j);
    double v;
    if (a <= age_in(0)) {
      v = val_in(0);
      extended = extended || a < age_in(0);
    } else if (a >= age_in(n_in - 1)) {
      v = val_in(n_in - 1);
      extended = extended || a > age_in(n_in - 1);
    } else {
      int k = 0;
      while (age_in(k + 1) < a) ++k;
      double t = (a - age_in(k)) / (age_in(k + 1) - age_in(k));
      v = (1.0 - t) * val_in(k) + t * val_in(k + 1);
      if (std::abs(a - age_in(k)) > 1e-12 && std::abs(a - age_in(k + 1)) > 1e-12)
        interpolated = true;
    }
    out(j - lo) = v;
  }
  if (interpolated) note(report, label + ": interpolated between sampled ages");
  if (extended) note(report, label + ": extended flat outside sampled age range");
  return out;
}

Eigen::VectorXi iota_ages(int lo, int hi) {
  Eigen::VectorXi a(hi - lo + 1);
  for (int j = lo; j <= hi; ++j) a(j - lo) = j;
  return a;
}

int row_for_age(const Eigen::VectorXi& age, int j, const char* what) {
  if (age.size() == 0) throw std::runtime_error(std::string(what) + ": empty table");
  int lo = age(0), hi = age(age.size() - 1);
  int jc = std::clamp(j, lo, hi);
  return jc - lo;
}

}  // namespace

double ProductivityTable::kappa(int j, int spouse, Education edu) const {
  int i = row_for_age(age, j, "productivity");
  if (spouse == 1) return edu == Education::college ? m_college(i) : m_highschool(i);
  return edu == Education::college ? f_college(i) : f_highschool(i);
}

double SurvivalTable::combined(int j, const std::string& mode) const {
  int i = row_for_age(age, j, "survival");
  double sm = male(i), sf = female(i);
  if (mode == "male") return sm;
  if (mode == "female") return sf;
  if (mode == "product") return sm * sf;
  if (mode == "geomean") return std::sqrt(std::max(sm * sf, 0.0));
  throw std::runtime_error("unknown survival combination mode: " + mode);
}

ProductivityTable load_productivity(const std::string& path, const CalibratedParams& cal,
                                    LoadReport* report) {
  CsvTable t = read_csv(path);
  Eigen::VectorXd age = column(t, "age");
  ProductivityTable out;
  out.age = iota_ages(cal.j_entry, cal.j_retire);
  out.m_college = resample(age, column(t, "m_college"), cal.j_entry, cal.j_retire,
                           path + ":m_college", report);
  out.m_highschool = resample(age, column(t, "m_highschool"), cal.j_entry, cal.j_retire,
                              path + ":m_highschool", report);
  out.f_college = resample(age, column(t, "f_college"), cal.j_entry, cal.j_retire,
                           path + ":f_college", report);
  out.f_highschool = resample(age, column(t, "f_highschool"), cal.j_entry, cal.j_retire,
                              path + ":f_highschool", report);
  for (int i = 0; i < out.age.size(); ++i) {
    if (out.m_college(i) <= 0 || out.m_highschool(i) <= 0 || out.f_college(i) <= 0 ||
        out.f_highschool(i) <= 0)
      throw std::runtime_error(path + ": productivity must be positive at age " +
                               std::to_string(out.age(i)));
  }
  return out;
}

SurvivalTable load_survival(const std::string& path, const CalibratedParams& cal,
                            LoadReport* report) {
  CsvTable t = read_csv(path);
  Eigen::VectorXd age = column(t, "age");
  SurvivalTable out;
  out.age = iota_ages(cal.j_entry, cal.j_max);
  out.male = resample(age, column(t, "male"), cal.j_entry, cal.j_max, path + ":male", report);
  out.female = resample(age, column(t, "female"), cal.j_entry, cal.j_max, path + ":female", report);
  for (int i = 0; i < out.age.size(); ++i) {
    if (out.male(i) < 0 || out.male(i) > 1 || out.female(i) < 0 || out.female(i) > 1)
      throw std::runtime_error(path + ": survival probabilities must lie in [0,1] at age " +
                               std::to_string(out.age(i)));
  }
  return out;
}

TimeUseTable load_timeuse(const std::string& path, LoadReport* report) {
  CsvTable t = read_csv(path);
  Eigen::VectorXd age = column(t, "age");
  int lo = static_cast<int>(std::lround(age(0)));
  int hi = static_cast<int>(std::lround(age(age.size() - 1)));
  TimeUseTable out;
  out.age = iota_ages(lo, hi);
  out.work = resample(age, column(t, "work"), lo, hi, path + ":work", report);
  out.leisure = resample(age, column(t, "leisure"), lo, hi, path + ":leisure", report);
  out.childcare = resample(age, column(t, "childcare"), lo, hi, path + ":childcare", report);
  for (int i = 0; i < out.age.size(); ++i) {
    if (out.work(i) < 0 || out.leisure(i) < 0 || out.childcare(i) < 0)
      throw std::runtime_error(path + ": hours must be nonnegative at age " +
                               std::to_string(out.age(i)));
  }
  return out;
}

PenaltyTable load_penalty(const std::string& path, LoadReport*) {
  CsvTable t = read_csv(path);
  Eigen::VectorXd et = column(t, "event_time"), gap = column(t, "gap");
  PenaltyTable out;
  out.event_time.resize(et.size());
  out.gap = gap;
  for (int i = 0; i < et.size(); ++i) {
    out.event_time(i) = static_cast<int>(std::lround(et(i)));
    if (i > 0 && out.event_time(i) <= out.event_time(i - 1))
      throw std::runtime_error(path + ": event_time must be strictly increasing");
  }
  return out;
}

ProductivityTable synth_productivity(const CalibratedParams& cal) {
  ProductivityTable out;
  out.age = iota_ages(cal.j_entry, cal.j_retire);
  int n = static_cast<int>(out.age.size());
  out.m_college.resize(n);
  out.m_highschool.resize(n);
  out.f_college.resize(n);
  out.f_highschool.resize(n);
  for (int i = 0; i < n; ++i) {
    double j = out.age(i);
    double h = 1.0 - std::pow((j - 50.0) / 30.0, 2);  // hump peaking at 50
    // women carry an extra early-30s swell on top of the common hump
    double swell = 1.0 + 0.5 * std::exp(-std::pow((j - 31.0) / 5.0, 2));
    out.m_highschool(i) = 0.50 + 0.70 * h;
    out.f_highschool(i) = (0.45 + 0.35 * h) * swell;
    out.m_college(i) = 1.3 * out.m_highschool(i);
    out.f_college(i) = 1.3 * out.f_highschool(i);
  }
  return out;
}

SurvivalTable synth_survival(const CalibratedParams& cal) {
  SurvivalTable out;
  out.age = iota_ages(cal.j_entry, cal.j_max);
  int n = static_cast<int>(out.age.size());
  out.male.resize(n);
  out.female.resize(n);
  for (int i = 0; i < n; ++i) {
    double j = out.age(i);
    double qm = std::min(0.98 * std::exp((j - 100.0) / 6.0), 1.0);  // mortality hazard
    double qf = 0.75 * qm;
    out.male(i) = 1.0 - qm;
    out.female(i) = 1.0 - qf;
  }
  return out;
}

TimeUseTable synth_timeuse(const CalibratedParams& cal) {
  // Stylized wife day (hours): steady work when young, a dip at first birth
  // with a long childcare tail, partial recovery, then wind-down to retirement.
  TimeUseTable out;
  int lo = cal.j_entry, hi = cal.j_retire - 1;
  out.age = iota_ages(lo, hi);
  int n = static_cast<int>(out.age.size());
  out.work.resize(n);
  out.leisure.resize(n);
  out.childcare.resize(n);
  auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
  for (int i = 0; i < n; ++i) {
    double j = out.age(i);
    double work, care;
    if (j < cal.j_birth) {
      work = 8.0;
      care = 0.0;
    } else if (j <= cal.j_birth + 2) {
      work = lerp(4.5, 5.0, (j - cal.j_birth) / 2.0);
      care = lerp(6.5, 5.5, (j - cal.j_birth) / 2.0);
    } else if (j <= cal.j_birth + 18) {
      double t = (j - cal.j_birth - 2) / 16.0;
      work = lerp(5.0, 7.0, t);
      care = lerp(5.5, 0.0, t);
    } else if (j <= 55) {
      work = 7.0;
      care = 0.0;
    } else {
      work = lerp(7.0, 5.5, (j - 55.0) / (hi - 55.0));
      care = 0.0;
    }
    out.work(i) = work;
    out.childcare(i) = care;
    out.leisure(i) = 24.0 - work - care;
  }
  return out;
}

PenaltyTable synth_penalty() {
  PenaltyTable out;
  out.event_time = iota_ages(0, 18);
  out.gap.resize(19);
  for (int t = 0; t <= 18; ++t) {
    double g;
    if (t <= 1)
      g = -0.85;
    else if (t <= 7)
      g = -0.70 + (t - 2) * (0.30 / 5.0);  // -0.70 at 2 up to -0.40 at 7
    else
      g = -0.40 + (t - 7) * (0.10 / 11.0);  // -0.40 at 7 up to -0.30 at 18
    out.gap(t) = g;
  }
  return out;
}

namespace {

std::vector<std::vector<double>> columns_to_rows(std::initializer_list<Eigen::VectorXd> cols) {
  std::vector<Eigen::VectorXd> cs(cols);
  std::vector<std::vector<double>> rows;
  Eigen::Index n = cs.front().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> row;
    for (const auto& c : cs) row.push_back(c(i));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_productivity(const std::string& path, const ProductivityTable& t) {
  write_csv(path, {"age", "m_college", "m_highschool", "f_college", "f_highschool"},
            columns_to_rows({t.age.cast<double>(), t.m_college, t.m_highschool, t.f_college,
                             t.f_highschool}));
}

void write_survival(const std::string& path, const SurvivalTable& t) {
  write_csv(path, {"age", "male", "female"},
            columns_to_rows({t.age.cast<double>(), t.male, t.female}));
}

void write_timeuse(const std::string& path, const TimeUseTable& t) {
  write_csv(path, {"age", "work", "leisure", "childcare"},
            columns_to_rows({t.age.cast<double>(), t.work, t.leisure, t.childcare}));
}

void write_penalty(const std::string& path, const PenaltyTable& t) {
  write_csv(path, {"event_time", "gap"},
            columns_to_rows({t.event_time.cast<double>(), t.gap}));
}

}  // namespace lc
