#pragma once

#include <string>
#include <vector>

#include "jacobi2p/regions.hpp"

namespace jacobi2p {

/// Decimal form with 17 significant digits; round-trips doubles exactly.
std::string format_double(double x);

/// "[re, im]" pair form used for complex numbers in all JSON output.
std::string format_complex(Complex z);

std::string json_escape(const std::string& s);

/// CSV with header re,im,abs_w,lhs,in_G,excluded; lhs is empty on excluded
/// rows.  Row order matches the report's row-major samples.
std::string region_report_csv(const RegionReport& report);

/// Inverse of region_report_csv (grid extents are recovered from the rows).
RegionReport parse_region_csv(const std::string& csv);

}  // namespace jacobi2p
