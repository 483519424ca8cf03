#ifndef PCRIT_CLI_HPP
#define PCRIT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace pcrit::cli {

/// Runs one `pcrit` invocation. args excludes the program name.
/// Returns 0 on success, 1 on numeric or validation failure, 2 on usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcrit::cli

#endif  // PCRIT_CLI_HPP
