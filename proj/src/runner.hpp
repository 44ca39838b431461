#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ndcglab {

// Loads the config at config_path, runs the named command, and writes its
// artifacts plus manifest.json into out_dir. seed_override, when present,
// wins over the config's seed. Returns a process exit code: 0 success,
// 2 config error, 3 assumption violation, 4 I/O error, 1 anything else.
// One log line per stage goes to log; so do error diagnostics.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::optional<std::uint64_t> seed_override,
                std::uint32_t threads, std::ostream& log);

}  // namespace ndcglab
