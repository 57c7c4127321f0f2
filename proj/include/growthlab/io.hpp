#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "growthlab/analysis.hpp"
#include "growthlab/diffeo.hpp"
#include "growthlab/fixed_points.hpp"
#include "growthlab/orbit.hpp"

namespace growthlab {

using Json = nlohmann::json;

/// Column order of growth CSV files.
inline constexpr const char* kGrowthCsvHeader =
    "n,log_gamma,log_max_fwd,log_min_fwd,argmax_start,argmin_start";

/// %.17g, the shortest width that round-trips every double.
std::string format_double(double v);

void write_growth_csv(std::ostream& out, const std::vector<GrowthRecord>& records);
std::vector<GrowthRecord> read_growth_csv(std::istream& in);

/// Non-finite values become the strings "inf", "-inf" and "nan".
Json number_json(double v);

Json to_json(const ValidationReport& report);
Json to_json(const FixedPointReport& report);
Json to_json(const ExponentFit& fit);
Json to_json(const LemmaReport& report);

}  // namespace growthlab
