#pragma once

#include "run_config.hpp"

#include "epforest/features.hpp"
#include "epforest/panel.hpp"

#include <filesystem>
#include <vector>

namespace epf::cli {

/// Loads the panel (CSV or synthetic scenario), fills gaps, converts dollar
/// columns, and applies the [from, to] filter.
DailyPanel load_panel(const RunConfig& config);

/// Design matrix for the configured target, using the configured feature
/// spec (or the defaults).
DesignMatrix load_design(const RunConfig& config, const DailyPanel& panel);

// Each command writes its output files into config.out_dir and returns the
// paths written.
std::vector<std::filesystem::path> run_synth(const RunConfig& config);
std::vector<std::filesystem::path> run_ingest(const RunConfig& config);
std::vector<std::filesystem::path> run_features(const RunConfig& config);
std::vector<std::filesystem::path> run_table1(const RunConfig& config);
std::vector<std::filesystem::path> run_importance(const RunConfig& config);
std::vector<std::filesystem::path> run_pdp(const RunConfig& config);
std::vector<std::filesystem::path> run_curve(const RunConfig& config);
std::vector<std::filesystem::path> run_baselines(const RunConfig& config);

} // namespace epf::cli
