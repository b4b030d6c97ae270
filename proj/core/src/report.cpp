#include "fedpg/report.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedpg {

std::string format_number(double value) {
  if (!std::isfinite(value)) throw std::domain_error("refusing to emit a non-finite value");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string report_header(int nodes) {
  std::string h = "epoch,traces_consumed";
  for (int n = 0; n < nodes; ++n) h += ",reward_node" + std::to_string(n);
  h += ",surrogate_loss";
  for (int n = 0; n < nodes; ++n) h += ",grad_norm_node" + std::to_string(n);
  h += ",mean_pairwise_grad_distance,median_node";
  for (int n = 0; n < nodes; ++n) h += ",delta_e_node" + std::to_string(n);
  h += ",inner_loop_len\n";
  return h;
}

std::string report_row(const EpochReport& r) {
  std::string row = std::to_string(r.epoch) + "," + std::to_string(r.traces_consumed);
  for (double v : r.mean_total_reward) row += "," + format_number(v);
  row += "," + format_number(r.surrogate_loss);
  for (double v : r.grad_norm) row += "," + format_number(v);
  row += "," + format_number(r.mean_pairwise_distance);
  row += "," + std::to_string(r.median_node);
  for (int d : r.delta_e) row += "," + std::to_string(d);
  row += "," + std::to_string(r.inner_loop_len) + "\n";
  return row;
}

std::string eval_runs_csv(const EvaluationResult& result) {
  std::string out = "run,t,rate\n";
  for (std::size_t r = 0; r < result.curves.size(); ++r) {
    for (std::size_t t = 0; t < result.curves[r].size(); ++t) {
      out += std::to_string(r) + "," + std::to_string(t) + "," +
             format_number(result.curves[r][t]) + "\n";
    }
  }
  return out;
}

std::string eval_aggregate_csv(const EvaluationResult& result) {
  const RateSummary& s = result.summary;
  std::string out = "t,mean_rate,std_rate,cv\n";
  for (std::size_t t = 0; t < s.mean.size(); ++t) {
    out += std::to_string(t) + "," + format_number(s.mean[t]) + "," + format_number(s.std_dev[t]) +
           "," + format_number(s.cv[t]) + "\n";
  }
  return out;
}

std::string eval_metrics_csv(const EvaluationResult& result) {
  const RateSummary& s = result.summary;
  const double n = s.mean.empty() ? 1.0 : static_cast<double>(s.mean.size());
  const double mean_cv = std::accumulate(s.cv.begin(), s.cv.end(), 0.0) / n;
  const double mean_rate = std::accumulate(s.mean.begin(), s.mean.end(), 0.0) / n;
  std::string out = "metric,value\n";
  out += "mean_cv," + format_number(mean_cv) + "\n";
  out += "slope_deviation," + format_number(s.slope_deviation) + "\n";
  out += "mean_rate," + format_number(mean_rate) + "\n";
  return out;
}

}  // namespace fedpg
