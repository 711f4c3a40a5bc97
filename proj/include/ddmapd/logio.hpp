#pragma once

#include <string>

#include "ddmapd/executor.hpp"
#include "ddmapd/grid.hpp"

namespace ddmapd {

// Text log: header, assignment rounds, timed agent/shelf paths, leftover
// dummy segments, lift/place events, final simplified trajectories, and the
// validation arc set. Round-trips through load_execution_log for offline
// validation.
void save_execution_log(const ExecutionResult& result, const GridMap& map,
                        const std::string& path);
ExecutionResult load_execution_log(const std::string& path, const GridMap& map);

}  // namespace ddmapd
