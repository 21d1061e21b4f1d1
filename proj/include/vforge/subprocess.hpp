#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vforge {

struct RunOptions {
  std::vector<std::string> argv;  // argv[0] = executable path or name
  std::string stdin_text;
  std::chrono::milliseconds timeout{0};  // 0 = unlimited
  std::optional<std::filesystem::path> cwd;
};

struct RunResult {
  int exit_code = -1;  // 128+N when killed by signal N
  std::string stdout_text;
  std::string stderr_text;
  std::chrono::milliseconds wall_time{0};
  bool timed_out = false;
};

/// Runs a child process, feeding stdin and capturing both output streams.
/// The whole process group is killed when the deadline passes.
/// Throws SpawnError when the executable cannot be started.
RunResult run_process(const RunOptions& options);

}  // namespace vforge
