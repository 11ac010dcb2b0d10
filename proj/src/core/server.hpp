#pragma once

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include "core/engine.hpp"

namespace score::app {

// Newline-delimited TCP front end over an Engine: sensor lines on the
// ingest port, 'ROUTE'/'PARK' lines on the query port, one reply line per
// input line. Port 0 binds an ephemeral port; a negative query port
// disables the query listener. The engine must outlive the server.
class Server {
 public:
  struct Options {
    int ingest_port = 0;
    int query_port = 0;  // < 0 disables
  };

  Server(Engine& engine, const Options& options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int ingest_port() const { return ingest_port_; }
  int query_port() const { return query_port_; }

  void stop();

 private:
  int listen_on(int port, int& bound_port);
  void accept_loop(int listen_fd, bool is_query);
  void serve_connection(int fd, bool is_query);
  void track(int fd);
  void untrack(int fd);

  Engine& engine_;
  std::atomic<bool> stopping_{false};
  int ingest_fd_ = -1;
  int query_fd_ = -1;
  int ingest_port_ = -1;
  int query_port_ = -1;
  std::vector<std::thread> acceptors_;
  std::mutex conn_mutex_;
  std::vector<int> conn_fds_;
  std::vector<std::thread> conn_threads_;
};

}  // namespace score::app
