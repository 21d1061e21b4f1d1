#include "vforge/subprocess.hpp"

#include "vforge/errors.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace vforge {

namespace {

struct Pipe {
  int read_fd = -1;
  int write_fd = -1;

  // O_CLOEXEC everywhere: a concurrently forked sibling must not inherit
  // these ends, or the child never sees stdin EOF and output never closes.
  Pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) {
      throw SpawnError(std::string("pipe2: ") + std::strerror(errno));
    }
    read_fd = fds[0];
    write_fd = fds[1];
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  void close_read() {
    if (read_fd >= 0) ::close(read_fd);
    read_fd = -1;
  }
  void close_write() {
    if (write_fd >= 0) ::close(write_fd);
    write_fd = -1;
  }
};

void set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

RunResult run_process(const RunOptions& options) {
  if (options.argv.empty()) {
    throw SpawnError("run_process: empty argv");
  }

  // A child may exit while we are still feeding its stdin.
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  Pipe in_pipe;
  Pipe out_pipe;
  Pipe err_pipe;
  Pipe exec_pipe;  // child reports exec failure through this CLOEXEC pipe

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw SpawnError(std::string("fork: ") + std::strerror(errno));
  }

  if (pid == 0) {
    // Child. Own process group so a timeout kill reaps grandchildren too.
    ::setpgid(0, 0);
    ::dup2(in_pipe.read_fd, STDIN_FILENO);
    ::dup2(out_pipe.write_fd, STDOUT_FILENO);
    ::dup2(err_pipe.write_fd, STDERR_FILENO);
    in_pipe.close_read();
    in_pipe.close_write();
    out_pipe.close_read();
    out_pipe.close_write();
    err_pipe.close_read();
    err_pipe.close_write();
    exec_pipe.close_read();

    if (options.cwd && ::chdir(options.cwd->c_str()) != 0) {
      int err = errno;
      (void)!::write(exec_pipe.write_fd, &err, sizeof(err));
      ::_exit(127);
    }

    std::vector<char*> argv;
    argv.reserve(options.argv.size() + 1);
    for (const auto& arg : options.argv) {
      argv.push_back(const_cast<char*>(arg.c_str()));
    }
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    int err = errno;
    (void)!::write(exec_pipe.write_fd, &err, sizeof(err));
    ::_exit(127);
  }

  // Parent.
  ::setpgid(pid, pid);  // either parent or child wins the race; both set the same group
  in_pipe.close_read();
  out_pipe.close_write();
  err_pipe.close_write();
  exec_pipe.close_write();

  int exec_errno = 0;
  {
    ssize_t n = ::read(exec_pipe.read_fd, &exec_errno, sizeof(exec_errno));
    if (n == sizeof(exec_errno)) {
      ::waitpid(pid, nullptr, 0);
      throw SpawnError(options.argv[0] + ": " + std::strerror(exec_errno));
    }
  }
  exec_pipe.close_read();

  set_nonblocking(in_pipe.write_fd);
  set_nonblocking(out_pipe.read_fd);
  set_nonblocking(err_pipe.read_fd);

  RunResult result;
  std::size_t stdin_written = 0;
  bool timed_out = false;

  const bool has_deadline = options.timeout.count() > 0;
  const auto deadline = start + options.timeout;

  while (true) {
    if (options.stdin_text.size() == stdin_written && in_pipe.write_fd >= 0) {
      in_pipe.close_write();
    }

    struct pollfd fds[3];
    nfds_t nfds = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_pipe.read_fd >= 0) {
      out_idx = static_cast<int>(nfds);
      fds[nfds++] = {out_pipe.read_fd, POLLIN, 0};
    }
    if (err_pipe.read_fd >= 0) {
      err_idx = static_cast<int>(nfds);
      fds[nfds++] = {err_pipe.read_fd, POLLIN, 0};
    }
    if (in_pipe.write_fd >= 0) {
      in_idx = static_cast<int>(nfds);
      fds[nfds++] = {in_pipe.write_fd, POLLOUT, 0};
    }
    if (nfds == 0) break;

    int wait_ms = -1;
    if (has_deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      wait_ms = static_cast<int>(std::max<long long>(0, left.count()));
    }
    int rc = ::poll(fds, nfds, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0 && has_deadline) {
      timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }

    char buf[4096];
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t n = ::read(out_pipe.read_fd, buf, sizeof(buf));
      if (n > 0) {
        result.stdout_text.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
        out_pipe.close_read();
      }
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t n = ::read(err_pipe.read_fd, buf, sizeof(buf));
      if (n > 0) {
        result.stderr_text.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
        err_pipe.close_read();
      }
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        in_pipe.close_write();  // child closed stdin; discard the rest
      } else {
        ssize_t n = ::write(in_pipe.write_fd, options.stdin_text.data() + stdin_written,
                            options.stdin_text.size() - stdin_written);
        if (n > 0) {
          stdin_written += static_cast<std::size_t>(n);
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          in_pipe.close_write();
        }
      }
    }
  }

  int status = 0;
  ::waitpid(pid, &status, 0);

  // Drain whatever arrived between the last poll and process exit.
  for (Pipe* p : {&out_pipe, &err_pipe}) {
    int fd = p->read_fd;
    if (fd < 0) continue;
    char buf[4096];
    ssize_t n;
    while ((n = ::read(fd, buf, sizeof(buf))) > 0) {
      (p == &out_pipe ? result.stdout_text : result.stderr_text)
          .append(buf, static_cast<std::size_t>(n));
    }
  }

  result.timed_out = timed_out;
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  result.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return result;
}

}  // namespace vforge
