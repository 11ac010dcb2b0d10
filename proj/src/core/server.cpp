#include "core/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <string>

#include "core/error.hpp"

namespace score::app {

namespace {

void close_fd(int fd) {
  if (fd >= 0) ::close(fd);
}

bool send_all(int fd, const char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += n;
    len -= std::size_t(n);
  }
  return true;
}

}  // namespace

Server::Server(Engine& engine, const Options& options) : engine_(engine) {
  ingest_fd_ = listen_on(options.ingest_port, ingest_port_);
  if (options.query_port >= 0) {
    try {
      query_fd_ = listen_on(options.query_port, query_port_);
    } catch (...) {
      close_fd(ingest_fd_);
      throw;
    }
  }
  acceptors_.emplace_back([this] { accept_loop(ingest_fd_, false); });
  if (query_fd_ >= 0) acceptors_.emplace_back([this] { accept_loop(query_fd_, true); });
}

Server::~Server() { stop(); }

int Server::listen_on(int port, int& bound_port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(ErrorKind::Io, "socket: " + std::string(std::strerror(errno)));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string msg = std::strerror(errno);
    close_fd(fd);
    throw Error(ErrorKind::Io, "bind port " + std::to_string(port) + ": " + msg);
  }
  if (::listen(fd, 64) != 0) {
    const std::string msg = std::strerror(errno);
    close_fd(fd);
    throw Error(ErrorKind::Io, "listen: " + msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) == 0)
    bound_port = ntohs(bound.sin_port);
  return fd;
}

void Server::accept_loop(int listen_fd, bool is_query) {
  while (!stopping_.load()) {
    const int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;  // listener closed on stop
    }
    track(fd);
    // stop() sweeps conn_fds_ after setting the flag; track-then-check
    // guarantees one of the two paths shuts this connection down
    if (stopping_.load()) {
      untrack(fd);
      close_fd(fd);
      break;
    }
    std::lock_guard lock(conn_mutex_);
    conn_threads_.emplace_back([this, fd, is_query] { serve_connection(fd, is_query); });
  }
}

void Server::serve_connection(int fd, bool is_query) {
  std::string buffer;
  char chunk[4096];
  while (!stopping_.load()) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, std::size_t(n));
    std::size_t start = 0;
    for (;;) {
      const std::size_t nl = buffer.find('\n', start);
      if (nl == std::string::npos) break;
      const std::string_view line(buffer.data() + start, nl - start);
      const auto answer =
          is_query ? engine_.answer_query(line) : engine_.answer_ingest(line);
      if (answer) {
        std::string reply = *answer;
        reply += '\n';
        if (!send_all(fd, reply.data(), reply.size())) {
          untrack(fd);
          close_fd(fd);
          return;
        }
      }
      start = nl + 1;
    }
    buffer.erase(0, start);
  }
  untrack(fd);
  close_fd(fd);
}

void Server::track(int fd) {
  std::lock_guard lock(conn_mutex_);
  conn_fds_.push_back(fd);
}

void Server::untrack(int fd) {
  std::lock_guard lock(conn_mutex_);
  conn_fds_.erase(std::remove(conn_fds_.begin(), conn_fds_.end(), fd), conn_fds_.end());
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  if (ingest_fd_ >= 0) ::shutdown(ingest_fd_, SHUT_RDWR);
  if (query_fd_ >= 0) ::shutdown(query_fd_, SHUT_RDWR);
  close_fd(ingest_fd_);
  close_fd(query_fd_);
  ingest_fd_ = -1;
  query_fd_ = -1;
  {
    std::lock_guard lock(conn_mutex_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (std::thread& t : acceptors_)
    if (t.joinable()) t.join();
  // connection threads may still be appending; drain until stable
  for (;;) {
    std::vector<std::thread> pending;
    {
      std::lock_guard lock(conn_mutex_);
      pending.swap(conn_threads_);
    }
    if (pending.empty()) break;
    for (std::thread& t : pending)
      if (t.joinable()) t.join();
  }
}

}  // namespace score::app
