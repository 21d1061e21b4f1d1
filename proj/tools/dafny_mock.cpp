// Stand-in for the Dafny CLI used by the test suites: `verify` replays
// recorded Dafny 4.11 outputs selected by a `// dafny-mock: <key>` comment in
// the source file, and `build` produces a tiny executable whose behavior is
// named by `// dafny-mock-main: <behavior>`. Files without a directive get a
// cheap brace-balance check. Point VFORGE_DAFNY at a real Dafny binary to run
// the same pipelines against the actual toolchain.

#include "vforge/util.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <sys/stat.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

fs::path data_dir() {
  if (const char* env = std::getenv("DAFNY_MOCK_DATA"); env && *env) {
    return env;
  }
  return DAFNY_MOCK_DEFAULT_DATA;
}

fs::path self_path() {
  char buf[4096];
  const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return "dafny-mock";
  buf[n] = '\0';
  return buf;
}

std::optional<std::string> directive(const std::string& source, const std::string& name) {
  const std::string marker = "// " + name + ":";
  for (const std::string& line : vforge::split_lines(source)) {
    const std::string trimmed = vforge::trim(line);
    if (trimmed.rfind(marker, 0) == 0) {
      return vforge::trim(trimmed.substr(marker.size()));
    }
  }
  return std::nullopt;
}

int count_verified_members(const std::string& source) {
  int count = 0;
  for (const char* kw : {"method", "function", "lemma", "predicate"}) {
    std::size_t pos = 0;
    const std::string word = kw;
    while ((pos = source.find(word, pos)) != std::string::npos) {
      ++count;
      pos += word.size();
    }
  }
  return count;
}

int replay_canned(const std::string& key, const fs::path& file) {
  if (key == "hang") {
    std::this_thread::sleep_for(std::chrono::seconds(600));
    return 0;
  }
  const fs::path canned = data_dir() / (key + ".txt");
  if (!fs::exists(canned)) {
    std::cerr << "dafny-mock: no recorded behavior '" << key << "' under "
              << data_dir() << " (file " << file << ")\n";
    return 9;
  }
  const std::string text = vforge::read_file(canned);
  // Layout: "exit: N" line, "---" line, recorded stdout.
  const auto lines = vforge::split_lines(text);
  int exit_code = 0;
  std::size_t body_start = 0;
  if (!lines.empty() && lines[0].rfind("exit:", 0) == 0) {
    exit_code = std::atoi(vforge::trim(lines[0].substr(5)).c_str());
    body_start = 1;
    if (body_start < lines.size() && vforge::trim(lines[body_start]) == "---") {
      ++body_start;
    }
  }
  for (std::size_t i = body_start; i < lines.size(); ++i) {
    std::cout << lines[i] << "\n";
  }
  return exit_code;
}

int cmd_verify(const fs::path& file) {
  const std::string source = vforge::read_file(file);
  if (auto key = directive(source, "dafny-mock")) {
    return replay_canned(*key, file);
  }

  if (vforge::trim(source).empty()) {
    std::cout << "Dafny program verifier finished with 0 verified, 0 errors\n";
    return 0;
  }

  long depth = 0;
  std::size_t line = 1;
  for (char c : source) {
    if (c == '\n') ++line;
    if (c == '{') ++depth;
    if (c == '}') --depth;
  }
  if (depth != 0) {
    std::cout << file.filename().string() << "(" << line << ",0): Error: rbrace expected\n";
    std::cout << "1 parse errors detected in " << file.filename().string() << "\n";
    return 2;
  }
  std::cout << "Dafny program verifier finished with " << count_verified_members(source)
            << " verified, 0 errors\n";
  return 0;
}

int write_runner_script(const fs::path& output, const std::string& behavior) {
  const std::string script = "#!/bin/sh\nexec \"" + self_path().string() +
                             "\" emulate " + behavior + " \"$@\"\n";
  vforge::write_file(output, script);
  ::chmod(output.c_str(), 0755);
  return 0;
}

int cmd_build(const fs::path& file, const fs::path& output) {
  const std::string source = vforge::read_file(file);
  const auto behavior = directive(source, "dafny-mock-main");
  if (!behavior) {
    std::cout << "Error: Could not find a module containing a Main method\n";
    return 3;
  }
  write_runner_script(output, *behavior);
  std::cout << "Dafny program verifier finished with "
            << count_verified_members(source) << " verified, 0 errors\n";
  return 0;
}

long long read_int() {
  long long v = 0;
  if (!(std::cin >> v)) {
    std::cerr << "expected an integer on stdin\n";
    std::exit(1);
  }
  return v;
}

int cmd_emulate(const std::string& behavior) {
  if (behavior == "relational") {
    const long long a = read_int();
    const long long b = read_int();
    std::cout << (a < b ? "<" : a > b ? ">" : "=") << "\n";
    return 0;
  }
  if (behavior == "magic-formula") {
    const long long a = read_int(), b = read_int(), c = read_int();
    const long long d = read_int(), l = read_int();
    if (d <= 0 || l < 0) {
      std::cerr << "requires d > 0 && l >= 0\n";
      return 1;
    }
    long long count = 0;
    for (long long x = 0; x <= l; ++x) {
      if ((a * x * x + b * x + c) % d == 0) ++count;
    }
    std::cout << count << "\n";
    return 0;
  }
  if (behavior == "constant-equals") {
    std::cout << "=\n";
    return 0;
  }
  if (behavior == "abs-diff") {
    const long long a = read_int();
    const long long b = read_int();
    std::cout << (a > b ? a - b : b - a) << "\n";
    return 0;
  }
  if (behavior == "echo") {
    std::cout << std::cin.rdbuf();
    return 0;
  }
  if (behavior == "hang") {
    std::this_thread::sleep_for(std::chrono::seconds(600));
    return 0;
  }
  if (behavior == "fail") {
    std::cerr << "runtime failure\n";
    return 1;
  }
  std::cerr << "dafny-mock: unknown emulation '" << behavior << "'\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << "usage: dafny-mock verify <file> | build <file> --output <path> | "
                 "run <file> | emulate <behavior> | --version\n";
    return 64;
  }

  try {
    if (args[0] == "--version") {
      std::cout << "4.11.0-mock\n";
      return 0;
    }
    if (args[0] == "verify" && args.size() >= 2) {
      return cmd_verify(args[1]);
    }
    if (args[0] == "build" && args.size() >= 2) {
      fs::path output = fs::path(args[1]).replace_extension("");
      for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--output" && i + 1 < args.size()) {
          output = args[i + 1];
          ++i;
        } else if (args[i].rfind("--output=", 0) == 0) {
          output = args[i].substr(9);
        }
      }
      return cmd_build(args[1], output);
    }
    if (args[0] == "run" && args.size() >= 2) {
      const std::string source = vforge::read_file(args[1]);
      const auto behavior = directive(source, "dafny-mock-main");
      if (!behavior) {
        std::cout << "Error: Could not find a module containing a Main method\n";
        return 3;
      }
      return cmd_emulate(*behavior);
    }
    if (args[0] == "emulate" && args.size() >= 2) {
      return cmd_emulate(args[1]);
    }
  } catch (const std::exception& ex) {
    std::cerr << "dafny-mock: " << ex.what() << "\n";
    return 9;
  }

  std::cerr << "dafny-mock: unrecognized invocation\n";
  return 64;
}
