#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ddrobust/behavioral.hpp"

namespace ddrobust {

/// CSV layout: header `k,u_1,...,u_m,y_1,...,y_p`, one row per time step.
void write_trajectory_csv(std::ostream& out, const TrajectoryData& data);
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryData& data);

TrajectoryData read_trajectory_csv(std::istream& in);
TrajectoryData read_trajectory_csv(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double exactly.
std::string format_number(double value);

}  // namespace ddrobust
