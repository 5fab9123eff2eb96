#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pfraud/evaluation.hpp"
#include "pfraud/pipeline.hpp"
#include "pfraud/prediction.hpp"

namespace pfraud {

/// Shortest decimal that round-trips the double.
std::string format_number(double v);

/// JSON array of per-client fits: family, params, log-likelihood,
/// convergence and diagnostics.
std::string fits_to_json(std::span<const ClientFit> fits);

/// client_id,model_name,position,score,label. Position counts from 0 at the
/// first test transaction.
void write_scores_csv(std::ostream& out, std::span<const ScoreSeries> series);
/// Inverse of write_scores_csv; diagnostic counters are not stored.
std::vector<ScoreSeries> read_scores_csv(std::istream& in);

/// model,group,metric,n,excluded,max,mean,min,std
void write_summary_csv(std::ostream& out, const EvaluationReport& report);
std::string summary_to_json(const EvaluationReport& report);

/// model,G1,G2,G3,G4 (relative MAP; empty cell when undefined).
void write_relative_map_csv(std::ostream& out, const EvaluationReport& report);

/// x,y,series long format for external plotting: x = group, y = relative
/// MAP, series = model.
void write_plot_data_csv(std::ostream& out, const EvaluationReport& report);

/// client_id,group,model,auc,ap,zero_convention,converged,test_size,clamped_steps,failed_steps,error
void write_per_client_csv(std::ostream& out, std::span<const ClientOutcome> outcomes);
std::vector<ClientOutcome> read_per_client_csv(std::istream& in);

}  // namespace pfraud
