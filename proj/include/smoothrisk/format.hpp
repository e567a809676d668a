#pragma once

#include <string>

namespace smoothrisk {

/// Shortest decimal text that parses back to exactly `value`. Locale
/// independent ('.' decimal separator). Non-finite values become "nan",
/// "inf" or "-inf".
std::string format_double(double value);

} // namespace smoothrisk
