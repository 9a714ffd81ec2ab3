#pragma once

#include <string>

#include "ssglm/inference.hpp"
#include "ssglm/simulate.hpp"
#include "ssglm/solver.hpp"

namespace ssglm::io {

// %.17g, enough digits to round-trip any double exactly
std::string format_double(double v);

std::string fit_result_json(const FitResult& result);
FitResult fit_result_from_json(const std::string& text);

struct CoordinateReport {
  int coordinate = 0;  // 1-based in reports
  double b = 0.0;
  double sigma = 0.0;
  Interval interval;
};

struct InferenceReport {
  std::size_t n = 0;
  double delta = 0.05;
  std::vector<CoordinateReport> coordinates;
  // test block, present when a restriction was evaluated
  bool has_test = false;
  bool intersection = false;          // joint two-coordinate test
  std::vector<int> test_coordinates;  // 1-based
  double null_value = 0.0;            // direction tests only
  double v_alpha = 0.0;               // direction tests only
  double z = 0.0;                     // direction z or the min-|z| statistic
  double p_value = 0.0;
  double z1 = 0.0, z2 = 0.0;          // intersection tests only
  double correlation = 0.0;
  double critical = 0.0;
};

std::string inference_report_json(const InferenceReport& report);

std::string sim_report_json(const SimConfig& config, const SimReport& report);
// Text table in the paper's column order: Size, Power, Cov. Zero, Cov. Nonzero.
std::string sim_report_table(const SimConfig& config, const SimReport& report);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace ssglm::io
