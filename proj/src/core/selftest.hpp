#ifndef NOTCHSCAN_SELFTEST_HPP
#define NOTCHSCAN_SELFTEST_HPP

#include <string>

namespace notchscan {

/// Built-in verification suite: DLT round trip, Jacobian vs central finite
/// differences, and the Riccati seed residuals of a notch polygon. Returns 0
/// on pass; the log receives one line per check.
int run_selftest(std::string& log);

}  // namespace notchscan

#endif
