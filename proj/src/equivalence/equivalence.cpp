#include "pyidiom/equivalence.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace pyidiom::equivalence {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Equivalent: return "Equivalent";
    case Status::Divergent: return "Divergent";
    case Status::OriginalFails: return "OriginalFails";
    case Status::Nondeterministic: return "Nondeterministic";
    case Status::Timeout: return "Timeout";
  }
  return "?";
}

std::filesystem::path discover_runner() {
  if (const char* v = std::getenv("PYIDIOM_PYTHON"); v && *v) return v;
  const char* path = std::getenv("PATH");
  std::stringstream dirs(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    const auto candidate = std::filesystem::path(dir.empty() ? "." : dir) / "python3";
    if (::access(candidate.c_str(), X_OK) == 0) return candidate;
  }
  throw RunnerMissing("python3 not found on PATH");
}

namespace {

class ScratchDir {
 public:
  ScratchDir() {
    std::string templ = (std::filesystem::temp_directory_path() / "pyidiom-run-XXXXXX").string();
    if (!::mkdtemp(templ.data())) throw std::runtime_error(std::string("mkdtemp: ") + std::strerror(errno));
    path_ = templ;
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    for (int f : fd) {
      if (f >= 0) ::close(f);
    }
  }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
};

}  // namespace

RunOutput run_script(const std::string& script, const CheckOptions& options) {
  const std::filesystem::path runner = options.runner.empty() ? discover_runner() : options.runner;
  if (::access(runner.c_str(), X_OK) != 0) throw RunnerMissing("runner not executable: " + runner.string());

  ScratchDir scratch;
  const auto script_path = scratch.path() / "snippet.py";
  {
    std::ofstream out(script_path, std::ios::binary);
    out << script;
  }

  Pipe out_pipe;
  Pipe err_pipe;
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out_pipe.fd[1], 1);
  posix_spawn_file_actions_adddup2(&actions, err_pipe.fd[1], 2);
  posix_spawn_file_actions_addchdir_np(&actions, scratch.path().c_str());
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  const std::string runner_s = runner.string();
  const std::string script_s = script_path.string();
  std::vector<std::string> args = {runner_s, "-I", "-B", script_s};
  const std::string home = "HOME=" + scratch.path().string();
  std::vector<std::string> env = {"PATH=/usr/local/bin:/usr/bin:/bin", "LC_ALL=C.UTF-8", "PYTHONHASHSEED=0",
                                  "PYTHONIOENCODING=utf-8", home};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::vector<char*> envp;
  for (auto& e : env) envp.push_back(e.data());
  envp.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, runner_s.c_str(), &actions, &attr, argv.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) throw RunnerMissing("cannot spawn " + runner_s + ": " + std::strerror(rc));
  out_pipe.close_end(1);
  err_pipe.close_end(1);

  RunOutput result;
  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  pollfd fds[2] = {{out_pipe.fd[0], POLLIN, 0}, {err_pipe.fd[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open_fds = 2;
  char buffer[8192];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    const int ready = ::poll(fds, 2, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = ::read(fds[i].fd, buffer, sizeof buffer);
      if (n > 0) {
        sinks[i]->append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  if (result.timed_out) ::kill(-pid, SIGKILL);

  int status = 0;
  for (;;) {
    const pid_t w = ::waitpid(pid, &status, result.timed_out ? 0 : WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) break;
    if (w == 0) {
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        ::kill(-pid, SIGKILL);
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      }
    }
  }
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.exit_code = -WTERMSIG(status);
  return result;
}

namespace {

bool same(const RunOutput& a, const RunOutput& b) { return a.exit_code == b.exit_code && a.out == b.out; }

std::string first_difference(const RunOutput& a, const RunOutput& b) {
  std::ostringstream out;
  if (a.exit_code != b.exit_code) out << "exit " << a.exit_code << " vs " << b.exit_code << "; ";
  const auto lines = [](const std::string& s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    for (std::string l; std::getline(ss, l);) v.push_back(l);
    return v;
  };
  const auto la = lines(a.out);
  const auto lb = lines(b.out);
  for (std::size_t i = 0; i < std::max(la.size(), lb.size()); ++i) {
    const std::string x = i < la.size() ? la[i] : "<eof>";
    const std::string y = i < lb.size() ? lb[i] : "<eof>";
    if (x != y) {
      out << "line " << i + 1 << ": -" << x << " +" << y;
      break;
    }
  }
  return out.str();
}

}  // namespace

EquivalenceResult check(const std::string& original, const std::string& refactored, const CheckOptions& options,
                        std::string method_id) {
  EquivalenceResult r;
  r.method_id = std::move(method_id);
  for (auto& run : r.original) run = run_script(original, options);
  for (auto& run : r.refactored) run = run_script(refactored, options);
  const auto timed_out = [](const std::array<RunOutput, 2>& runs) { return runs[0].timed_out || runs[1].timed_out; };
  if (timed_out(r.original) || timed_out(r.refactored)) {
    r.status = Status::Timeout;
    r.detail = timed_out(r.original) ? "original timed out" : "refactored timed out";
  } else if (!same(r.original[0], r.original[1])) {
    r.status = Status::Nondeterministic;
    r.detail = "original: " + first_difference(r.original[0], r.original[1]);
  } else if (r.original[0].exit_code != 0) {
    r.status = Status::OriginalFails;
    r.detail = "original exit " + std::to_string(r.original[0].exit_code);
  } else if (!same(r.refactored[0], r.refactored[1])) {
    r.status = Status::Nondeterministic;
    r.detail = "refactored: " + first_difference(r.refactored[0], r.refactored[1]);
  } else if (!same(r.original[0], r.refactored[0])) {
    r.status = Status::Divergent;
    r.detail = first_difference(r.original[0], r.refactored[0]);
  } else {
    r.status = Status::Equivalent;
  }
  return r;
}

std::vector<Pair> load_pairs(const std::filesystem::path& directory) {
  constexpr std::string_view kOriginal = ".original.py";
  std::vector<Pair> out;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= kOriginal.size() || !name.ends_with(kOriginal)) continue;
    const std::string id = name.substr(0, name.size() - kOriginal.size());
    const auto other = directory / (id + ".refactored.py");
    if (!std::filesystem::exists(other)) throw std::runtime_error("missing " + other.string());
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    out.push_back(Pair{id, slurp(entry.path()), slurp(other)});
  }
  std::sort(out.begin(), out.end(), [](const Pair& a, const Pair& b) { return a.method_id < b.method_id; });
  return out;
}

std::size_t Summary::count(Status s) const {
  const auto it = counts.find(s);
  return it == counts.end() ? 0 : it->second;
}

Summary check_corpus(std::span<const Pair> pairs, const CheckOptions& options, std::size_t workers) {
  CheckOptions resolved = options;
  if (resolved.runner.empty()) resolved.runner = discover_runner();
  Summary summary;
  for (Status s : {Status::Equivalent, Status::Divergent, Status::OriginalFails, Status::Nondeterministic,
                   Status::Timeout}) {
    summary.counts[s] = 0;
  }
  summary.results.resize(pairs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, pairs.size()));
  for (std::size_t w = 0; w < n && !pairs.empty(); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < pairs.size(); i = next++) {
        const Pair& p = pairs[i];
        try {
          summary.results[i] = check(p.original, p.refactored, resolved, p.method_id);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = pairs.size();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  for (const auto& r : summary.results) ++summary.counts[r.status];
  return summary;
}

}  // namespace pyidiom::equivalence
