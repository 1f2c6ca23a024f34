#include "datacopy/subprocess_sampler.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "datacopy/errors.hpp"

namespace datacopy {

SubprocessSampler::SubprocessSampler(std::string command, int dim, double timeout_seconds)
    : command_(std::move(command)), dim_(dim), timeout_seconds_(timeout_seconds) {
  if (dim_ < 1) throw ValidationError("SubprocessSampler: dimension must be >= 1");
  if (command_.empty()) throw ValidationError("SubprocessSampler: empty command");
  spawn();
}

SubprocessSampler::~SubprocessSampler() { terminate(); }

void SubprocessSampler::spawn() {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw ProtocolError("sampler process: pipe failed: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    throw ProtocolError("sampler process: fork failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    setpgid(0, 0);  // own process group, so terminate() reaches grandchildren
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

void SubprocessSampler::terminate() {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  if (pid_ > 0) {
    const pid_t pid = static_cast<pid_t>(pid_);
    pid_ = -1;
    int status = 0;
    auto reap = [&](int tries) {
      for (int i = 0; i < tries; ++i) {
        if (waitpid(pid, &status, WNOHANG) != 0) return true;  // exited or gone
        usleep(10000);
      }
      return false;
    };
    if (reap(20)) return;
    kill(-pid, SIGTERM);  // the whole process group, sh and its children
    if (reap(50)) return;
    kill(-pid, SIGKILL);
    waitpid(pid, &status, 0);
  }
}

std::string SubprocessSampler::read_line() {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds_);
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ++lines_read_;
      return line;
    }
    const auto remaining = deadline - std::chrono::steady_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count();
    if (ms <= 0) {
      throw ProtocolError("sampler protocol: timed out after " +
                          std::to_string(timeout_seconds_) + " s waiting for line " +
                          std::to_string(lines_read_ + 1));
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rv = poll(&pfd, 1, static_cast<int>(ms));
    if (rv < 0) {
      throw ProtocolError("sampler protocol: poll failed: " + std::string(std::strerror(errno)));
    }
    if (rv == 0) continue;
    char chunk[4096];
    const ssize_t got = read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      throw ProtocolError("sampler protocol: read failed: " + std::string(std::strerror(errno)));
    }
    if (got == 0) {
      throw ProtocolError("sampler protocol: child exited before line " +
                          std::to_string(lines_read_ + 1));
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

PointSet SubprocessSampler::draw(std::size_t n) {
  if (pid_ <= 0) throw ProtocolError("sampler protocol: child is not running");
  const std::string request = "SAMPLE " + std::to_string(n) + " " + std::to_string(dim_) + "\n";
  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t w = write(to_child_, request.data() + written, request.size() - written);
    if (w < 0) {
      throw ProtocolError("sampler protocol: write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(w);
  }

  PointSet out(dim_);
  out.reserve(n);
  std::vector<double> coords(dim_);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string line = read_line();
    const char* p = line.c_str();
    int fields = 0;
    while (true) {
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == '\0') break;
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw ProtocolError("sampler protocol: line " + std::to_string(lines_read_) +
                            ": non-numeric field '" + std::string(p) + "'");
      }
      if (fields >= dim_) {
        ++fields;
        break;
      }
      coords[fields++] = v;
      p = end;
    }
    if (fields != dim_) {
      throw ProtocolError("sampler protocol: line " + std::to_string(lines_read_) + ": expected " +
                          std::to_string(dim_) + " fields, got " + std::to_string(fields));
    }
    out.push_back(coords);
  }
  return out;
}

}  // namespace datacopy
