#pragma once

#include <sys/types.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evocity::detail {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

struct ProcessOptions {
  std::optional<std::filesystem::path> cwd;
  std::map<std::string, std::string> env;  // overrides on top of environ
  std::string input;
};

/// Runs argv to completion, capturing stdout and stderr.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const ProcessOptions& options = {});

/// A long-lived child with line-oriented stdin and binary stdout, used for
/// `git cat-file --batch`.
class PipeProcess {
 public:
  PipeProcess(const std::vector<std::string>& argv, const ProcessOptions& options);
  ~PipeProcess();

  PipeProcess(const PipeProcess&) = delete;
  PipeProcess& operator=(const PipeProcess&) = delete;

  void write(std::string_view data);
  std::string read_line();
  std::string read_exact(std::size_t n);

 private:
  bool fill();

  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
  std::size_t pos_ = 0;
};

}  // namespace evocity::detail
