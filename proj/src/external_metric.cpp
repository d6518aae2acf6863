#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <sstream>

#include "sqbench/metrics.hpp"

namespace sqbench {

namespace {

std::string substitute(const std::string& tmpl, const std::string& placeholder,
                       const std::string& value) {
  std::string out = tmpl;
  std::size_t pos = 0;
  while ((pos = out.find(placeholder, pos)) != std::string::npos) {
    out.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return out;
}

// Runs `command` through /bin/sh, capturing stdout, killing the child after
// `timeout_s`. Returns (exit status, captured output).
std::pair<int, std::string> run_with_timeout(const std::string& command,
                                             double timeout_s) {
  int pipe_fd[2];
  if (pipe(pipe_fd) != 0) throw Error("external_metric: pipe failed");
  const pid_t pid = fork();
  if (pid < 0) {
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    throw Error("external_metric: fork failed");
  }
  if (pid == 0) {
    dup2(pipe_fd[1], STDOUT_FILENO);
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
    _exit(127);
  }
  close(pipe_fd[1]);

  std::string output;
  char buf[4096];
  const int timeout_ms = static_cast<int>(timeout_s * 1000.0);
  int elapsed_ms = 0;
  bool timed_out = false;
  for (;;) {
    struct pollfd pfd{pipe_fd[0], POLLIN, 0};
    const int step_ms = 50;
    const int r = poll(&pfd, 1, step_ms);
    if (r > 0) {
      const ssize_t got = read(pipe_fd[0], buf, sizeof(buf));
      if (got <= 0) break;  // EOF or error: child is done writing
      output.append(buf, static_cast<std::size_t>(got));
    } else {
      elapsed_ms += step_ms;
      if (elapsed_ms >= timeout_ms) {
        timed_out = true;
        kill(pid, SIGKILL);
        break;
      }
    }
  }
  close(pipe_fd[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (timed_out) throw Error("external_metric: command timed out: " + command);
  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {exit_code, output};
}

}  // namespace

MosScore external_metric(const std::string& command, const std::string& ref_path,
                         const std::string& deg_path, double timeout_s) {
  std::string cmd = substitute(command, "{ref}", ref_path);
  cmd = substitute(cmd, "{deg}", deg_path);
  const auto [exit_code, output] = run_with_timeout(cmd, timeout_s);
  if (exit_code != 0)
    throw Error("external_metric: command exited with status " +
                std::to_string(exit_code) + ": " + cmd);
  std::istringstream stream(output);
  double score = 0.0;
  if (!(stream >> score))
    throw Error("external_metric: no parseable score in output of: " + cmd);
  std::string rest;
  if (stream >> rest)
    throw Error("external_metric: expected exactly one number, got extra: " +
                rest);
  return {std::clamp(score, 1.0, 5.0)};
}

Metric make_metric(const std::string& spec) {
  if (spec == "nsim") {
    return {"nsim", 16000,
            [](const AudioBuffer& ref, const AudioBuffer& deg) {
              return visqol_like_score(ref, deg);
            }};
  }
  if (spec == "disturbance") {
    return {"disturbance", 8000,
            [](const AudioBuffer& ref, const AudioBuffer& deg) {
              return disturbance_score(ref, deg);
            }};
  }
  if (spec.find("{ref}") != std::string::npos) {
    // External command template: scored through temp WAV files.
    return {"external", 8000,
            [spec](const AudioBuffer& ref, const AudioBuffer& deg) {
              char ref_path[] = "/tmp/sqbench_ref_XXXXXX";
              char deg_path[] = "/tmp/sqbench_deg_XXXXXX";
              const int rfd = mkstemp(ref_path);
              const int dfd = mkstemp(deg_path);
              if (rfd < 0 || dfd < 0)
                throw Error("external metric: cannot create temp files");
              close(rfd);
              close(dfd);
              try {
                write_wav(ref, ref_path);
                write_wav(deg, deg_path);
                const MosScore score = external_metric(spec, ref_path, deg_path);
                unlink(ref_path);
                unlink(deg_path);
                return score;
              } catch (...) {
                unlink(ref_path);
                unlink(deg_path);
                throw;
              }
            }};
  }
  throw Error("unknown metric: " + spec +
              " (expected nsim, disturbance, or a command template with {ref})");
}

std::vector<std::string> builtin_metric_names() { return {"nsim", "disturbance"}; }

}  // namespace sqbench
