#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "srmks/experiment.hpp"
#include "srmks/io.hpp"

namespace fixtures {

/// Two plans, three repetitions and coarse grids: fast enough for unit tests
/// while still exercising every code path of the full experiment.
inline srmks::ExperimentConfig small_config() {
  srmks::ExperimentConfig cfg;
  cfg.plans = {srmks::reference_plan(16), srmks::reference_plan(8)};
  cfg.repetitions = 3;
  cfg.grids.se.n_sigma = 4;
  cfg.grids.se.n_l = 6;
  cfg.grids.sdof.n_sigma = 8;
  return cfg;
}

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SRMKS_TEST_DATA_DIR) / name;
}

inline bool updating_golden() { return std::getenv("SRMKS_UPDATE_GOLDEN") != nullptr; }

/// Reads a golden file, or rewrites it first when SRMKS_UPDATE_GOLDEN is set.
inline std::string golden(const std::string& name, const std::string& fresh) {
  const auto path = data_path(name);
  if (updating_golden()) srmks::io::write_text_file(path, fresh);
  return srmks::io::read_text_file(path);
}

}  // namespace fixtures
