#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lc/params.hpp"

namespace lc {

// Age-indexed inputs, resampled onto contiguous integer ages at load time
// (linear interpolation inside the file's range, flat extension outside).

struct ProductivityTable {
  Eigen::VectorXi age;  // j_entry..j_retire
  Eigen::VectorXd m_college, m_highschool, f_college, f_highschool;

  double kappa(int j, int spouse, Education edu) const;
};

struct SurvivalTable {
  Eigen::VectorXi age;  // j_entry..j_max
  Eigen::VectorXd male, female;

  // annual household survival under the configured combination rule
  double combined(int j, const std::string& mode) const;
};

struct TimeUseTable {
  Eigen::VectorXi age;  // wife ages covered by the data
  Eigen::VectorXd work, leisure, childcare;  // hours per day
};

struct PenaltyTable {
  Eigen::VectorXi event_time;
  Eigen::VectorXd gap;
};

struct LoadReport {
  std::vector<std::string> notes;  // interpolation/extension messages
};

ProductivityTable load_productivity(const std::string& path, const CalibratedParams& cal,
                                    LoadReport* report = nullptr);
SurvivalTable load_survival(const std::string& path, const CalibratedParams& cal,
                            LoadReport* report = nullptr);
TimeUseTable load_timeuse(const std::string& path, LoadReport* report = nullptr);
PenaltyTable load_penalty(const std::string& path, LoadReport* report = nullptr);

// stylized stand-ins used when no data directory is supplied
ProductivityTable synth_productivity(const CalibratedParams& cal);
SurvivalTable synth_survival(const CalibratedParams& cal);
TimeUseTable synth_timeuse(const CalibratedParams& cal);
PenaltyTable synth_penalty();

void write_productivity(const std::string& path, const ProductivityTable& t);
void write_survival(const std::string& path, const SurvivalTable& t);
void write_timeuse(const std::string& path, const TimeUseTable& t);
void write_penalty(const std::string& path, const PenaltyTable& t);

}  // namespace lc
