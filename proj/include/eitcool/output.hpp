#pragma once

// Plot-ready CSV writers. Numbers are printed with 17 significant digits so
// every double round-trips exactly.

#include <ostream>
#include <string>

#include <json.hpp>

#include "eitcool/full_lindblad.hpp"
#include "eitcool/internal_dynamics.hpp"

namespace eitcool {

std::string format_number(double x);

/// Header `delta3,absorption`.
void write_spectrum_csv(std::ostream& out, const SpectrumTrace& trace);

/// Header `t,mean_n,pop_e,trace_error`.
void write_cooling_csv(std::ostream& out, const CoolingTrace& trace);

nlohmann::json to_json(const SpectrumFeatures& features);

}  // namespace eitcool
