#include "cscv/solver/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>

namespace cscv::solver {

namespace {

struct Pipe {
  int fd[2] = {-1, -1};
  bool open() { return ::pipe2(fd, O_CLOEXEC) == 0; }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
  ~Pipe() {
    close_end(0);
    close_end(1);
  }
};

void ignore_sigpipe() {
  // A dead child must not take us down with SIGPIPE while we write its stdin.
  static const bool done = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

// Forks `/bin/sh -c command` in its own process group. Returns the pid, or -1.
pid_t spawn(const std::string& command, Pipe& in, Pipe& out) {
  ignore_sigpipe();
  pid_t pid = ::fork();
  if (pid < 0) return -1;
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in.fd[0], STDIN_FILENO);
    ::dup2(out.fd[1], STDOUT_FILENO);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  in.close_end(0);
  out.close_end(1);
  ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);
  return pid;
}

int reap(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

ProcessResult run_process(const std::string& command, const std::string& input,
                          std::chrono::milliseconds timeout) {
  ProcessResult result;
  Pipe in, out;
  if (!in.open() || !out.open()) return result;
  pid_t pid = spawn(command, in, out);
  if (pid < 0) return result;
  result.started = true;

  auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t written = 0;
  if (input.empty()) in.close_end(1);
  char buf[4096];
  bool out_open = true;
  while (out_open) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd fds[2];
    int n = 0;
    fds[n++] = {out.fd[0], POLLIN, 0};
    if (in.fd[1] >= 0) fds[n++] = {in.fd[1], POLLOUT, 0};
    int rc = ::poll(fds, n, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = ::write(in.fd[1], input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written >= input.size()) in.close_end(1);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t r = ::read(out.fd[0], buf, sizeof buf);
      if (r > 0) {
        result.out.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        out_open = false;
      }
    }
  }
  if (result.timed_out) ::kill(-pid, SIGKILL);
  result.exit_code = reap(pid);
  return result;
}

struct Session::Impl {
  Pipe in, out;
  pid_t pid = -1;
  std::string pending;  // output read past the last marker
};

Session::Session(std::string command) : command_(std::move(command)) {}

Session::~Session() { stop(); }

bool Session::running() const { return impl_ != nullptr; }

void Session::stop() {
  if (!impl_) return;
  impl_->in.close_end(1);
  ::kill(-impl_->pid, SIGKILL);
  reap(impl_->pid);
  impl_.reset();
}

SessionReply Session::exchange(const std::string& input, const std::string& marker,
                               std::chrono::milliseconds timeout) {
  SessionReply reply;
  if (!impl_) {
    auto impl = std::make_unique<Impl>();
    if (!impl->in.open() || !impl->out.open()) return reply;
    impl->pid = spawn(command_, impl->in, impl->out);
    if (impl->pid < 0) return reply;
    impl_ = std::move(impl);
  }
  reply.started = true;
  Impl& s = *impl_;
  auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t written = 0;
  std::string line_marker = marker + "\n";
  char buf[4096];
  while (true) {
    auto hit = s.pending.find(line_marker);
    if (hit != std::string::npos && written >= input.size()) {
      reply.out = s.pending.substr(0, hit);
      s.pending.erase(0, hit + line_marker.size());
      reply.complete = true;
      return reply;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      reply.timed_out = true;
      stop();
      return reply;
    }
    pollfd fds[2];
    int n = 0;
    fds[n++] = {s.out.fd[0], POLLIN, 0};
    if (written < input.size()) fds[n++] = {s.in.fd[1], POLLOUT, 0};
    int rc = ::poll(fds, n, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = ::write(s.in.fd[1], input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) break;
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t r = ::read(s.out.fd[0], buf, sizeof buf);
      if (r > 0) {
        s.pending.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        break;
      }
    }
  }
  // The child went away before answering.
  reply.out = std::move(s.pending);
  s.in.close_end(1);
  reply.exit_code = reap(s.pid);
  impl_.reset();
  return reply;
}

}  // namespace cscv::solver
