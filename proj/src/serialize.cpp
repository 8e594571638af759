#include "jacobi2p/serialize.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace jacobi2p {

std::string format_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_complex(Complex z) {
  return "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]";
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

std::string region_report_csv(const RegionReport& report) {
  std::string out = "re,im,abs_w,lhs,in_G,excluded\n";
  for (const RegionSample& s : report.samples) {
    out += format_double(s.lambda.real());
    out += ',';
    out += format_double(s.lambda.imag());
    out += ',';
    out += format_double(s.value.abs_w);
    out += ',';
    if (s.value.lhs) out += format_double(*s.value.lhs);
    out += ',';
    out += s.value.in_G ? '1' : '0';
    out += ',';
    out += s.value.excluded ? '1' : '0';
    out += '\n';
  }
  return out;
}

RegionReport parse_region_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "re,im,abs_w,lhs,in_G,excluded")
    throw std::invalid_argument("region CSV: bad header");
  RegionReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 6> field;
    std::size_t pos = 0;
    for (int i = 0; i < 6; ++i) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos && i < 5)
        throw std::invalid_argument("region CSV: expected 6 fields");
      field[static_cast<std::size_t>(i)] =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      pos = comma + 1;
    }
    RegionSample s;
    s.lambda = Complex(std::stod(field[0]), std::stod(field[1]));
    s.value.abs_w = std::stod(field[2]);
    if (!field[3].empty()) s.value.lhs = std::stod(field[3]);
    s.value.in_G = field[4] == "1";
    s.value.excluded = field[5] == "1";
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace jacobi2p
