#include "npq/io.hpp"

#include <cmath>
#include <cstdio>

namespace npq {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

double neglog10(double f) { return f > 0.0 ? -std::log10(f) : HUGE_VAL; }

JointPmf logmap(const JointPmf& joint) {
  double f_max = 0.0;
  for (double v : joint.data()) f_max = std::max(f_max, v);
  JointPmf out(joint.n_max(), joint.m_max(), joint.method);
  out.conditional = joint.conditional;
  if (!(f_max > 0.0)) return out;
  for (int n = 0; n <= joint.n_max(); ++n) {
    for (int m = 0; m <= joint.m_max(); ++m) {
      const double v = joint(n, m);
      out(n, m) = v > 0.0 ? std::max(0.0, 1.0 + std::log10(v / f_max) / 20.0) : 0.0;
    }
  }
  return out;
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const MopReport& report) {
  Json j;
  j["test_name"] = report.test_name;
  j["method"] = std::string(to_string(report.method));
  j["r"] = report.r;
  j["nu"] = report.nu;
  j["xi"] = json_number(report.xi);
  j["worst_n"] = report.worst_n;
  j["worst_m"] = report.worst_m;
  j["n_lim"] = report.n_lim;
  j["p_lim"] = report.p_lim;
  j["points"] = report.points;
  j["nonpositive"] = report.nonpositive;
  j["threshold"] = report.threshold;
  j["passed"] = report.passed;
  if (report.extent) {
    j["n_hi"] = report.extent->n_hi;
    j["n_lo"] = report.extent->n_lo;
    j["p_min"] = json_number(report.extent->p_min);
  }
  if (report.max_abs_diff) j["max_abs_diff"] = json_number(*report.max_abs_diff);
  if (report.worst_z) j["worst_z"] = json_number(*report.worst_z);
  if (report.seed) j["seed"] = *report.seed;
  j["version"] = kVersion;
  return j;
}

std::string report_csv_header() {
  return "test_name,method,r,nu,xi,worst_n,worst_m,n_lim,p_lim,points,nonpositive,threshold,passed,"
         "n_hi,n_lo,p_min,max_abs_diff,worst_z,seed";
}

std::string report_csv_row(const MopReport& rep) {
  auto opt = [](const auto& o) { return o ? format_double(*o) : std::string(); };
  std::string s = rep.test_name + "," + std::string(to_string(rep.method)) + "," + format_double(rep.r) + "," +
                  format_double(rep.nu) + "," + format_double(rep.xi) + "," + std::to_string(rep.worst_n) + "," +
                  std::to_string(rep.worst_m) + "," + std::to_string(rep.n_lim) + "," + format_double(rep.p_lim) +
                  "," + std::to_string(rep.points) + "," + std::to_string(rep.nonpositive) + "," +
                  format_double(rep.threshold) + "," + (rep.passed ? "true" : "false") + ",";
  if (rep.extent) {
    s += std::to_string(rep.extent->n_hi) + "," + std::to_string(rep.extent->n_lo) + "," +
         format_double(rep.extent->p_min);
  } else {
    s += ",,";
  }
  s += "," + opt(rep.max_abs_diff) + "," + opt(rep.worst_z) + "," + (rep.seed ? std::to_string(*rep.seed) : "");
  return s;
}

}  // namespace npq
