#ifndef CONTESTNET_REPORT_IO_HPP
#define CONTESTNET_REPORT_IO_HPP

#include <string>

#include <json.hpp>

#include "contestnet/analytics.hpp"
#include "contestnet/dynamics.hpp"

namespace contestnet {

std::string sweep_to_csv(const SweepTable& table);
nlohmann::json sweep_to_json(const SweepTable& table);

// one JSON object per line, one period per object
std::string trajectory_to_jsonl(const Trajectory& traj);

nlohmann::json farsighted_to_json(const FarsightedResult& fs);

}  // namespace contestnet

#endif
