#include "eitcool/output.hpp"

#include <cstdio>

namespace eitcool {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_spectrum_csv(std::ostream& out, const SpectrumTrace& trace) {
  out << "delta3,absorption\n";
  for (const auto& p : trace.points) out << format_number(p.delta3) << ',' << format_number(p.absorption) << '\n';
}

void write_cooling_csv(std::ostream& out, const CoolingTrace& trace) {
  out << "t,mean_n,pop_e,trace_error\n";
  for (const auto& s : trace.samples)
    out << format_number(s.t) << ',' << format_number(s.mean_n) << ',' << format_number(s.pop_e) << ','
        << format_number(s.trace_error) << '\n';
}

nlohmann::json to_json(const SpectrumFeatures& features) {
  return {{"zeros", features.zeros},
          {"nonzero_minima", features.nonzero_minima},
          {"maxima", features.maxima},
          {"global_max", features.global_max}};
}

}  // namespace eitcool
