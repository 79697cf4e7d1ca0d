#pragma once

#include "linmm/bus_sim.hpp"

#include <json.hpp>

namespace linmm {

inline constexpr const char* kReportSchema = "linmm.sim_report/1";

/// Stable-order JSON view of a report. Keys and bus samples are never included.
nlohmann::ordered_json report_to_json(const SimReport& r);

}  // namespace linmm
