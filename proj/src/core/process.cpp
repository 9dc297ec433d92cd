#include "core/process.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include "core/errors.hpp"

namespace iqn {

ProcessResult run_process(const std::vector<std::string>& argv) {
  if (argv.empty())
    throw ExternalCodecError("empty external command");
  int pipefd[2];
  if (pipe(pipefd) != 0)
    throw ExternalCodecError(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    throw ExternalCodecError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    dup2(pipefd[1], STDERR_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv)
      args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    // Reached only when exec fails.
    fprintf(stderr, "exec %s: %s\n", args[0], std::strerror(errno));
    _exit(127);
  }
  close(pipefd[1]);
  ProcessResult res;
  char buf[4096];
  ssize_t n;
  while ((n = read(pipefd[0], buf, sizeof buf)) > 0)
    res.output.append(buf, static_cast<size_t>(n));
  close(pipefd[0]);
  int status = 0;
  if (waitpid(pid, &status, 0) < 0)
    throw ExternalCodecError(std::string("waitpid: ") + std::strerror(errno));
  if (WIFEXITED(status))
    res.exitCode = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    res.exitCode = 128 + WTERMSIG(status);
  return res;
}

TempDir::TempDir() {
  const char* base = std::getenv("IQNET_TMPDIR");
  std::filesystem::path dir = base && *base ? std::filesystem::path(base)
                                            : std::filesystem::temp_directory_path();
  std::filesystem::create_directories(dir);
  std::string tmpl = (dir / "iqnet-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data()))
    throw IoError(std::string("mkdtemp: ") + std::strerror(errno));
  path_ = buf.data();
}

TempDir::~TempDir() {
  if (!path_.empty()) {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
}

}  // namespace iqn
