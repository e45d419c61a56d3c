#ifndef VCONS_CLI_HPP
#define VCONS_CLI_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vcons
{

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// Parses "lo:hi[:step]" items separated by commas, e.g. "1,5,10:30:5".
/// Throws ConfigError on malformed input or a value below `min_value`.
std::vector<int> parse_int_list(std::string_view text, int min_value = 1);

/// Command-line manifest echoed as `#` comment lines ahead of every CSV.
struct RunManifest
{
    std::string command;
    std::string scenario_path;
    std::vector<std::string> overrides;
    std::string output_path;
    std::string tool_version;
    double wall_clock_s = 0;

    std::string header() const;
};

/// Entry point for `vcons steady | transient | simulate | validate`.
/// Reports go to `out`, diagnostics to `err`; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace vcons

#endif
