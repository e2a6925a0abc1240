#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace cscv::solver {

struct ProcessResult {
  bool started = false;
  bool timed_out = false;
  int exit_code = -1;
  std::string out;
};

// Runs `command` through /bin/sh with `input` on stdin and collects stdout.
// The child is killed once `timeout` elapses.
ProcessResult run_process(const std::string& command, const std::string& input,
                          std::chrono::milliseconds timeout);

struct SessionReply {
  bool started = false;
  bool complete = false;  // the marker line arrived
  bool timed_out = false;
  int exit_code = -1;     // set when the child exited
  std::string out;        // output preceding the marker
};

// Long-lived child for request/response exchanges. Each request must make the
// child print `marker` on a line of its own when done. The child is killed on
// timeout and respawned by the next exchange.
class Session {
 public:
  explicit Session(std::string command);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  SessionReply exchange(const std::string& input, const std::string& marker, std::chrono::milliseconds timeout);
  bool running() const;
  void stop();

 private:
  struct Impl;
  std::string command_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cscv::solver
