#pragma once

#include <string>
#include <vector>

#include "fedpg/evaluation.hpp"
#include "fedpg/federated.hpp"

namespace fedpg {

/// Shortest round-trip decimal form. Throws std::domain_error for NaN or
/// infinity: no emitted field may be non-finite.
std::string format_number(double value);

/// Header of the per-epoch training report for `nodes` nodes.
std::string report_header(int nodes);
/// One CSV line, newline-terminated.
std::string report_row(const EpochReport& report);

/// run,t,rate rows.
std::string eval_runs_csv(const EvaluationResult& result);
/// t,mean_rate,std_rate,cv rows.
std::string eval_aggregate_csv(const EvaluationResult& result);
/// metric,value rows: mean_cv, slope_deviation, mean_rate.
std::string eval_metrics_csv(const EvaluationResult& result);

}  // namespace fedpg
