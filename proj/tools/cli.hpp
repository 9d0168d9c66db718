// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: track, simulate, eval, export and serve.
// Exit status 0 on success, 1 for input errors (bad flags, malformed or
// missing files, invalid config), 2 for runtime failures.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

namespace flocktrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRuntime = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Static file server for a bundle directory. Every response carries
// Access-Control-Allow-Origin: * so a UI on another origin can fetch it.
class StaticServer {
 public:
  explicit StaticServer(std::filesystem::path dir);
  ~StaticServer();
  StaticServer(const StaticServer&) = delete;
  StaticServer& operator=(const StaticServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws kIo on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flocktrack::cli
