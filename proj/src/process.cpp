#include "process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "evocity/error.hpp"

extern char** environ;

namespace evocity::detail {

namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fds, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::Io, std::string("pipe: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
  int release_read() { return std::exchange(fds[0], -1); }
  int release_write() { return std::exchange(fds[1], -1); }
};

std::vector<std::string> merged_environment(const std::map<std::string, std::string>& overrides) {
  std::vector<std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    std::string_view entry(*e);
    auto eq = entry.find('=');
    auto key = std::string(entry.substr(0, eq));
    if (!overrides.contains(key)) env.emplace_back(entry);
  }
  for (const auto& [k, v] : overrides) env.push_back(k + "=" + v);
  return env;
}

pid_t spawn(const std::vector<std::string>& argv, const ProcessOptions& options, int child_in,
            int child_out, int child_err) {
  if (argv.empty()) throw Error(ErrorCode::InvalidArgument, "empty argv");
  // A child that exits early must surface as EPIPE, not kill us.
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_in, 0);
  posix_spawn_file_actions_adddup2(&actions, child_out, 1);
  posix_spawn_file_actions_adddup2(&actions, child_err, 2);
  if (options.cwd) {
    posix_spawn_file_actions_addchdir_np(&actions, options.cwd->c_str());
  }

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  auto env_strings = merged_environment(options.env);
  std::vector<char*> envp;
  for (auto& e : env_strings) envp.push_back(e.data());
  envp.push_back(nullptr);

  pid_t pid = -1;
  int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::Io, "cannot spawn " + argv[0] + ": " + std::strerror(rc));
  }
  return pid;
}

int wait_for(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return -1;
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options) {
  Pipe in, out, err;
  pid_t pid = spawn(argv, options, in.fds[0], out.fds[1], err.fds[1]);
  in.close_read();
  out.close_write();
  err.close_write();

  ProcessResult result;
  std::size_t written = 0;
  if (options.input.empty()) in.close_write();

  std::string* sinks[2] = {&result.out, &result.err};
  int fds[2] = {out.fds[0], err.fds[0]};
  char buf[65536];
  while (fds[0] >= 0 || fds[1] >= 0 || in.fds[1] >= 0) {
    std::vector<pollfd> pfds;
    for (int fd : fds) {
      if (fd >= 0) pfds.push_back({fd, POLLIN, 0});
    }
    if (in.fds[1] >= 0) pfds.push_back({in.fds[1], POLLOUT, 0});
    if (::poll(pfds.data(), pfds.size(), -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const auto& p : pfds) {
      if (p.revents == 0) continue;
      if (p.fd == in.fds[1]) {
        ssize_t n = ::write(p.fd, options.input.data() + written, options.input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 || written == options.input.size()) in.close_write();
        continue;
      }
      for (int i = 0; i < 2; ++i) {
        if (p.fd != fds[i]) continue;
        ssize_t n = ::read(p.fd, buf, sizeof buf);
        if (n > 0) {
          sinks[i]->append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EINTR) {
          fds[i] = -1;
        }
      }
    }
  }
  result.exit_code = wait_for(pid);
  return result;
}

PipeProcess::PipeProcess(const std::vector<std::string>& argv, const ProcessOptions& options) {
  Pipe in, out;
  int devnull = ::open("/dev/null", O_WRONLY | O_CLOEXEC);
  try {
    pid_ = spawn(argv, options, in.fds[0], out.fds[1], devnull);
  } catch (...) {
    ::close(devnull);
    throw;
  }
  ::close(devnull);
  in_fd_ = in.release_write();
  out_fd_ = out.release_read();
}

PipeProcess::~PipeProcess() {
  if (in_fd_ >= 0) ::close(in_fd_);
  if (out_fd_ >= 0) ::close(out_fd_);
  if (pid_ > 0) wait_for(pid_);
}

void PipeProcess::write(std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::write(in_fd_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::Io, std::string("write to child: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

bool PipeProcess::fill() {
  if (pos_ > 0) {
    buffer_.erase(0, pos_);
    pos_ = 0;
  }
  char buf[65536];
  for (;;) {
    ssize_t n = ::read(out_fd_, buf, sizeof buf);
    if (n > 0) {
      buffer_.append(buf, static_cast<std::size_t>(n));
      return true;
    }
    if (n == 0) return false;
    if (errno != EINTR) return false;
  }
}

std::string PipeProcess::read_line() {
  for (;;) {
    auto nl = buffer_.find('\n', pos_);
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      return line;
    }
    if (!fill()) throw Error(ErrorCode::Io, "child process closed its output");
  }
}

std::string PipeProcess::read_exact(std::size_t n) {
  while (buffer_.size() - pos_ < n) {
    if (!fill()) throw Error(ErrorCode::Io, "child process closed its output");
  }
  std::string data = buffer_.substr(pos_, n);
  pos_ += n;
  return data;
}

}  // namespace evocity::detail
