#pragma once

#include <string>

namespace uidkit {

// 12 significant digits; the per-token dump format.
std::string format_real(double value);
// Fixed decimals for summary tables.
std::string format_fixed(double value, int decimals = 4);

}  // namespace uidkit
