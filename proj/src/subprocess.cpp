#include "zcoref/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "zcoref/json_io.hpp"

namespace zcoref {

std::string run_subprocess(const std::vector<std::string>& argv, const std::string& input) {
  if (argv.empty()) throw SubprocessError("empty resolver command");
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw SubprocessError(std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0) throw SubprocessError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> args;
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  size_t written = 0;
  while (written < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;  // child may exit early; surface the problem via status below
    }
    written += static_cast<size_t>(n);
  }
  close(in_pipe[1]);

  std::string output;
  char buf[4096];
  ssize_t n;
  while ((n = read(out_pipe[0], buf, sizeof(buf))) != 0) {
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    output.append(buf, static_cast<size_t>(n));
  }
  close(out_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw SubprocessError("resolver '" + argv[0] + "' exited with status " +
                          std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }
  return output;
}

namespace {

nlohmann::json exchange(const std::vector<std::string>& argv, const char* op,
                        const Document& doc) {
  nlohmann::json request{{"v", 1}, {"op", op}, {"doc", document_to_json(doc)}};
  const std::string raw = run_subprocess(argv, request.dump());
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception& e) {
    throw SubprocessError(std::string("bad resolver response: ") + e.what());
  }
  if (!response.contains("v") || response["v"].get<int>() != 1) {
    throw SubprocessError("resolver response missing protocol version 1");
  }
  return response;
}

}  // namespace

ClusterSet SubprocessCoref::resolve(const Document& doc) {
  nlohmann::json response = exchange(argv_, "resolve", doc);
  if (!response.contains("clusters")) throw SubprocessError("response lacks 'clusters'");
  return clusters_from_json(response["clusters"]);
}

std::vector<Azp> SubprocessAzpIdentifier::identify(const Document& doc) {
  nlohmann::json response = exchange(argv_, "identify", doc);
  if (!response.contains("gaps")) throw SubprocessError("response lacks 'gaps'");
  return gaps_from_json(response["gaps"]);
}

}  // namespace zcoref
