#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "deduct/prover.hpp"
#include "deduct/syntax.hpp"

namespace deduct {

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> out;
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

struct TempFile {
  std::string path;

  explicit TempFile(const std::string& contents) {
    char buf[] = "/tmp/deduct_tptp_XXXXXX";
    int fd = mkstemp(buf);
    if (fd < 0) throw ExternalProverUnavailable("cannot create temp file");
    path = buf;
    ssize_t n = write(fd, contents.data(), contents.size());
    close(fd);
    if (n != static_cast<ssize_t>(contents.size()))
      throw ExternalProverUnavailable("cannot write temp file");
  }

  ~TempFile() { unlink(path.c_str()); }
};

// Runs argv, captures stdout, kills the child after the deadline.
// Returns (exit ok, captured output); throws if the binary cannot start.
std::pair<bool, std::string> run_with_timeout(const std::vector<std::string>& argv,
                                              double timeout_seconds) {
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0)
    throw ExternalProverUnavailable("pipe failed");

  pid_t pid = fork();
  if (pid < 0) throw ExternalProverUnavailable("fork failed");
  if (pid == 0) {
    setsid();  // own process group, so a timeout kill reaps grandchildren too
    dup2(out_pipe[1], STDOUT_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    int code = errno;
    ssize_t ignored = write(err_pipe[1], &code, sizeof(code));
    (void)ignored;
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);

  // exec failure reports errno through the close-on-exec pipe
  int exec_errno = 0;
  if (read(err_pipe[0], &exec_errno, sizeof(exec_errno)) == sizeof(exec_errno)) {
    close(err_pipe[0]);
    close(out_pipe[0]);
    waitpid(pid, nullptr, 0);
    throw ExternalProverUnavailable("cannot execute '" + argv[0] +
                                    "': " + std::strerror(exec_errno));
  }
  close(err_pipe[0]);

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(timeout_seconds));
  bool killed = false;
  int status = 0;
  // non-blocking reads while we watch the clock
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  std::string output;
  bool exited = false;
  while (true) {
    char buf[4096];
    ssize_t n;
    while ((n = read(out_pipe[0], buf, sizeof(buf))) > 0) output.append(buf, n);
    if (exited) break;  // child reaped; buffered output has been drained
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      exited = true;
      continue;
    }
    if (std::chrono::steady_clock::now() > deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      killed = true;
      exited = true;
      continue;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  close(out_pipe[0]);
  return {!killed, output};
}

}  // namespace

ProofOutcome prove_external(const Problem& p, const std::string& prover_cmd,
                            const ProverBudget& b) {
  TempFile file(print_tptp_file(p, {.strict_parens = true}));
  int timeout_s = std::max(1, static_cast<int>(std::ceil(b.max_seconds)));
  std::string cmd = replace_all(prover_cmd, "{timeout_s}", std::to_string(timeout_s));
  bool has_file = cmd.find("{file}") != std::string::npos;
  cmd = replace_all(cmd, "{file}", file.path);
  auto argv = split_command(cmd);
  if (argv.empty()) throw ExternalProverUnavailable("empty prover command");
  if (!has_file) argv.push_back(file.path);

  auto [finished, output] = run_with_timeout(argv, 2.0 * b.max_seconds);

  ProofOutcome out;
  if (!finished) {
    out.status = ProofStatus::BudgetExhausted;
    return out;
  }

  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    size_t pos = line.find("SZS status ");
    if (pos == std::string::npos) continue;
    std::istringstream rest(line.substr(pos + 11));
    std::string word;
    rest >> word;
    if (word == "Theorem") {
      out.status = ProofStatus::Entailed;
      out.proof.push_back(line);
    } else if (word == "CounterSatisfiable" || word == "Satisfiable") {
      out.status = ProofStatus::Saturated;
    } else if (word == "Timeout" || word == "GaveUp") {
      out.status = ProofStatus::BudgetExhausted;
    } else {
      throw UnrecognizedStatus(line);
    }
    return out;
  }
  throw UnrecognizedStatus(output.substr(0, 200));
}

}  // namespace deduct
