#include "ssglm/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ssglm::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// Small JSON writer so numbers always carry 17 significant digits; nlohmann
// is used for reading only.
class Writer {
 public:
  std::string str() const { return out_.str(); }

  void begin_object() { out_ << "{\n"; first_.push_back(true); }
  void end_object() {
    out_ << "\n";
    indent(static_cast<int>(first_.size()) - 1);
    out_ << "}";
    first_.pop_back();
  }
  void key(const std::string& k) {
    if (!first_.back()) out_ << ",\n";
    first_.back() = false;
    indent(static_cast<int>(first_.size()));
    out_ << '"' << k << "\": ";
  }
  void value(double v) { out_ << format_double(v); }
  void value(int v) { out_ << v; }
  void value(std::size_t v) { out_ << v; }
  void value(bool v) { out_ << (v ? "true" : "false"); }
  void value(const std::string& s) {
    out_ << '"';
    for (char c : s) {
      if (c == '"' || c == '\\') out_ << '\\';
      out_ << c;
    }
    out_ << '"';
  }
  void value_raw(const std::string& raw) { out_ << raw; }
  template <typename T>
  void array(const std::vector<T>& values) {
    out_ << "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ", ";
      value(values[i]);
    }
    out_ << "]";
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < 2 * depth; ++i) out_ << ' ';
  }
  std::ostringstream out_;
  std::vector<bool> first_;
};

}  // namespace

std::string fit_result_json(const FitResult& result) {
  Writer w;
  w.begin_object();
  w.key("beta");
  w.array(result.beta);
  w.key("lambda");
  w.value(result.lambda);
  w.key("iterations");
  w.value(result.iterations);
  w.key("kkt_residual");
  w.value(result.kkt_residual);
  w.key("objective");
  w.value(result.objective);
  w.key("converged");
  w.value(result.converged);
  w.end_object();
  return w.str() + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FitResult result;
  result.beta = j.at("beta").get<Vector>();
  result.lambda = j.at("lambda").get<double>();
  result.iterations = j.at("iterations").get<int>();
  result.kkt_residual = j.at("kkt_residual").get<double>();
  result.objective = j.at("objective").get<double>();
  result.converged = j.at("converged").get<bool>();
  return result;
}

std::string inference_report_json(const InferenceReport& report) {
  Writer w;
  w.begin_object();
  w.key("n");
  w.value(report.n);
  w.key("delta");
  w.value(report.delta);
  w.key("coordinates");
  {
    std::ostringstream block;
    block << "[";
    for (std::size_t i = 0; i < report.coordinates.size(); ++i) {
      const CoordinateReport& c = report.coordinates[i];
      if (i) block << ", ";
      block << "{\"coordinate\": " << c.coordinate << ", \"b\": " << format_double(c.b)
            << ", \"sigma\": " << format_double(c.sigma) << ", \"lo\": "
            << format_double(c.interval.lo) << ", \"hi\": " << format_double(c.interval.hi)
            << "}";
    }
    block << "]";
    w.value_raw(block.str());
  }
  if (report.has_test) {
    w.key("test_type");
    w.value(std::string(report.intersection ? "intersection" : "direction"));
    w.key("test_coordinates");
    w.array(report.test_coordinates);
    if (report.intersection) {
      w.key("z1");
      w.value(report.z1);
      w.key("z2");
      w.value(report.z2);
      w.key("correlation");
      w.value(report.correlation);
      w.key("critical");
      w.value(report.critical);
    } else {
      w.key("null_value");
      w.value(report.null_value);
      w.key("v_alpha");
      w.value(report.v_alpha);
    }
    w.key("z");
    w.value(report.z);
    w.key("p_value");
    w.value(report.p_value);
  }
  w.end_object();
  return w.str() + "\n";
}

std::string sim_report_json(const SimConfig& config, const SimReport& report) {
  Writer w;
  w.begin_object();
  w.key("setup");
  w.value(std::string(config.setup == SimSetup::FiveGroups ? "five_groups" : "ten_groups"));
  w.key("n");
  w.value(config.n);
  w.key("p");
  w.value(config.p);
  w.key("rho");
  w.value(config.rho);
  w.key("iterations");
  w.value(config.iterations);
  w.key("seed");
  w.value(static_cast<std::size_t>(config.seed));
  w.key("nominal_level");
  w.value(config.nominal_level);
  w.key("size_pct");
  w.value(report.size_pct);
  w.key("power_pct");
  w.value(report.power_pct);
  w.key("cov_zero_pct");
  w.value(report.cov_zero_pct);
  w.key("cov_nonzero_pct");
  w.value(report.cov_nonzero_pct);
  w.key("successes");
  w.value(report.successes);
  w.key("failures");
  w.value(report.failures);
  w.key("runtime_seconds");
  w.value(report.runtime_seconds);
  w.key("per_iteration");
  {
    std::ostringstream block;
    block << "[";
    for (std::size_t i = 0; i < report.per_iteration.size(); ++i) {
      const IterationRecord& r = report.per_iteration[i];
      if (i) block << ", ";
      block << "{\"iteration\": " << r.iteration << ", \"ok\": " << (r.ok ? "true" : "false")
            << ", \"reject_size\": " << (r.reject_size ? 1 : 0)
            << ", \"reject_power\": " << (r.reject_power ? 1 : 0)
            << ", \"cover_zero\": " << (r.cover_zero ? 1 : 0)
            << ", \"cover_nonzero\": " << (r.cover_nonzero ? 1 : 0)
            << ", \"z_size\": " << format_double(r.z_size)
            << ", \"z_power\": " << format_double(r.z_power)
            << ", \"lambda\": " << format_double(r.lambda_selected) << "}";
    }
    block << "]";
    w.value_raw(block.str());
  }
  w.end_object();
  return w.str() + "\n";
}

std::string sim_report_table(const SimConfig& config, const SimReport& report) {
  std::ostringstream out;
  char line[160];
  out << (config.setup == SimSetup::FiveGroups ? "Design: Five Groups\n" : "Design: Ten Groups\n");
  std::snprintf(line, sizeof(line), "%-16s | %29s\n", "", ("rho=" + format_double(config.rho)).c_str());
  out << line;
  std::snprintf(line, sizeof(line), "%-16s | %6s %6s %9s %12s\n", "", "Size", "Power", "Cov. Zero",
                "Cov. Nonzero");
  out << line;
  std::snprintf(line, sizeof(line), "n=%-4d p=%-7d | %6.0f %6.0f %9.0f %12.0f\n", config.n, config.p,
                report.size_pct, report.power_pct, report.cov_zero_pct, report.cov_nonzero_pct);
  out << line;
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ssglm::io
