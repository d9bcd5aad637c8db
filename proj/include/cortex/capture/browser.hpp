#pragma once

// Launches a headless Chromium-family browser with remote debugging enabled
// and discovers its DevTools websocket endpoint.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cortex/error.hpp"

extern char** environ;

namespace cortex::capture {

/// Explicit path, then $CORTEX_BROWSER, then common Chromium binary names on $PATH.
inline std::filesystem::path find_browser(const std::string& explicit_path = {}) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("CORTEX_BROWSER"); env && *env) return env;
  const char* path_env = std::getenv("PATH");
  if (path_env) {
    std::stringstream dirs(path_env);
    std::string dir;
    std::vector<std::string> dirs_list;
    while (std::getline(dirs, dir, ':')) dirs_list.push_back(dir);
    for (const char* name : {"chromium", "chromium-browser", "google-chrome", "google-chrome-stable",
                             "chrome", "headless_shell"}) {
      for (const auto& d : dirs_list) {
        const auto candidate = std::filesystem::path(d) / name;
        if (::access(candidate.c_str(), X_OK) == 0) return candidate;
      }
    }
  }
  throw Error(ErrorCode::ProtocolError,
              "no browser found; pass --browser or set CORTEX_BROWSER to a Chromium binary");
}

class BrowserProcess {
 public:
  BrowserProcess(const std::filesystem::path& binary, std::chrono::seconds startup_timeout) {
    char dir_template[] = "/tmp/cortex-browser-XXXXXX";
    if (::mkdtemp(dir_template) == nullptr) throw Error(ErrorCode::IoFailure, "cannot create browser profile dir");
    profile_dir_ = dir_template;

    std::vector<std::string> args{binary.string(),
                                  "--headless=new",
                                  "--no-sandbox",
                                  "--disable-gpu",
                                  "--hide-scrollbars",
                                  "--force-device-scale-factor=1",
                                  "--no-first-run",
                                  "--no-default-browser-check",
                                  "--remote-debugging-port=0",
                                  "--user-data-dir=" + profile_dir_.string(),
                                  "about:blank"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    const std::string log = (profile_dir_ / "browser.log").string();
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
    const int rc = ::posix_spawn(&pid_, binary.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      cleanup_dir();
      throw Error(ErrorCode::ProtocolError, "cannot launch " + binary.string());
    }

    // The browser writes "<port>\n<browser target path>" once it listens.
    const auto port_file = profile_dir_ / "DevToolsActivePort";
    const auto deadline = std::chrono::steady_clock::now() + startup_timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      std::ifstream in(port_file);
      std::string port;
      std::string path;
      if (in && std::getline(in, port) && std::getline(in, path) && !port.empty() && !path.empty()) {
        ws_url_ = "ws://127.0.0.1:" + port + path;
        return;
      }
      int status = 0;
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        cleanup_dir();
        throw Error(ErrorCode::ProtocolError, "browser exited during startup");
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    terminate();
    throw Error(ErrorCode::ProtocolError, "browser did not expose a DevTools endpoint in time");
  }

  BrowserProcess(const BrowserProcess&) = delete;
  BrowserProcess& operator=(const BrowserProcess&) = delete;

  ~BrowserProcess() { terminate(); }

  const std::string& websocket_url() const { return ws_url_; }

 private:
  void terminate() {
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      int status = 0;
      for (int i = 0; i < 50 && ::waitpid(pid_, &status, WNOHANG) == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      if (::waitpid(pid_, &status, WNOHANG) == 0) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
      }
      pid_ = -1;
    }
    cleanup_dir();
  }

  void cleanup_dir() {
    std::error_code ec;
    if (!profile_dir_.empty()) std::filesystem::remove_all(profile_dir_, ec);
    profile_dir_.clear();
  }

  pid_t pid_ = -1;
  std::filesystem::path profile_dir_;
  std::string ws_url_;
};

}  // namespace cortex::capture
