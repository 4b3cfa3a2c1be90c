#pragma once

// File formats.
//
// Game and scenario documents are JSON with a top-level "schema": 1 and a
// "kind" of "lq_game" or "smartgrid". Matrices are row-major nested lists and
// per-stage, per-player data nest as [k][i]. Numeric output (CSV) carries 17
// significant digits so that values survive a write/read cycle exactly.

#include <filesystem>
#include <string>
#include <variant>

#include "olpdg/game.hpp"
#include "olpdg/lcp.hpp"
#include "olpdg/smartgrid.hpp"

namespace olpdg::io {

inline constexpr int kSchemaVersion = 1;

using GameDocument = std::variant<LqGame, smartgrid::Scenario>;

// Throws std::invalid_argument naming the offending field, or the parser's
// position for malformed JSON. LQ games are checked with validate().
GameDocument parse_game(const std::string& text);
GameDocument load_game(const std::filesystem::path& path);

std::string to_json(const LqGame& game);
std::string to_json(const smartgrid::Scenario& scenario);
void save_game(const std::filesystem::path& path, const LqGame& game);
void save_scenario(const std::filesystem::path& path, const smartgrid::Scenario& scenario);

std::string format_double(double value);

// Columns k, x*, u*, v*, lambda*, mu*; the u cells are empty at k = K.
std::string trajectory_csv(const EquilibriumTrajectory& traj, const Dims& dims);
EquilibriumTrajectory parse_trajectory_csv(const std::string& text, const Dims& dims);

// One row per LCP coordinate: index, stage, kind, player, component, z, w.
std::string lcp_csv(const LcpProblem& problem, const LcpSolution& solution);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace olpdg::io
