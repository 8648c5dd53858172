// Reports: JSON and CSV for matrices and stats, a plain-text episode trace.
// Every report carries the config hash and base seed it came from.

#pragma once

#include <string>

#include "json.hpp"

#include "phishgame/game.hpp"
#include "phishgame/scenario.hpp"

namespace phishgame {

nlohmann::json stats_json(const AggregateStats& stats);
nlohmann::json signal_json(const Signal& signal);
nlohmann::json event_json(const SessionEvent& event);

/// Everything, ground truth included. Not for the service's pre-decision path.
nlohmann::json transcript_json(const EpisodeTranscript& transcript);

std::string format_trace(const EpisodeTranscript& transcript, const ScenarioConfig& config);

nlohmann::json matrix_json(const Matrix& matrix, const ScenarioConfig& config);

/// One row per cell: strategy (empty for baselines), policy, counts, rates,
/// Wilson bounds, mean payoffs. Provenance goes in a leading comment line.
std::string matrix_csv(const Matrix& matrix, const ScenarioConfig& config);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace phishgame
