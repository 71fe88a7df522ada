#pragma once

#include <optional>
#include <string>

#include "ra3c/protocol.hpp"

namespace ra3c {

// Thin RAII wrappers over POSIX TCP sockets; enough for the loopback
// worker/server topology. RA3C_BIND overrides the listen address.

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    ~Socket();

    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    // Bounded exponential backoff on refused connections, then IoError.
    static Socket connect_to(const std::string& host, int port, int attempts = 6, int first_backoff_ms = 50);

    bool valid() const { return fd_ >= 0; }
    void send_all(std::span<const uint8_t> data);
    // false on clean EOF before any byte; throws on mid-read EOF or error.
    bool recv_all(uint8_t* buf, size_t n);
    void close();

private:
    int fd_ = -1;
};

class Listener {
public:
    // port 0 binds an ephemeral port; port() reports the actual one.
    explicit Listener(int port, std::string bind_addr = "");
    ~Listener();

    int port() const { return port_; }
    std::optional<Socket> accept_one();  // nullopt once closed
    void close();

private:
    int fd_ = -1;
    int port_ = 0;
};

void send_message(Socket& s, const Message& m);
std::optional<Message> recv_message(Socket& s);  // nullopt on clean close

std::pair<std::string, int> parse_host_port(const std::string& addr);

}  // namespace ra3c
