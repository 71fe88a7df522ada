#include "ra3c/socket.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace ra3c {

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

Socket::~Socket() { close(); }

void Socket::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

static sockaddr_in make_addr(const std::string& host, int port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(uint16_t(port));
    const std::string h = host.empty() ? "127.0.0.1" : host;
    if (::inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1)
        throw IoError("bad IPv4 address '" + h + "'");
    return addr;
}

Socket Socket::connect_to(const std::string& host, int port, int attempts, int first_backoff_ms) {
    int backoff = first_backoff_ms;
    std::string last_err;
    for (int i = 0; i < attempts; ++i) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw IoError("socket(): " + std::string(std::strerror(errno)));
        const sockaddr_in addr = make_addr(host, port);
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return Socket(fd);
        }
        last_err = std::strerror(errno);
        ::close(fd);
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
    }
    throw IoError("cannot connect to " + host + ":" + std::to_string(port) + " after " +
                  std::to_string(attempts) + " attempts: " + last_err);
}

void Socket::send_all(std::span<const uint8_t> data) {
    size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            throw IoError("send(): " + std::string(n < 0 ? std::strerror(errno) : "peer closed"));
        }
        off += size_t(n);
    }
}

bool Socket::recv_all(uint8_t* buf, size_t n) {
    size_t off = 0;
    while (off < n) {
        const ssize_t got = ::recv(fd_, buf + off, n - off, 0);
        if (got == 0) {
            if (off == 0) return false;  // clean close at a frame boundary
            throw ProtocolError("connection closed mid-frame");
        }
        if (got < 0) {
            if (errno == EINTR) continue;
            throw IoError("recv(): " + std::string(std::strerror(errno)));
        }
        off += size_t(got);
    }
    return true;
}

Listener::Listener(int port, std::string bind_addr) {
    if (bind_addr.empty()) {
        if (const char* env = std::getenv("RA3C_BIND")) bind_addr = env;
        else bind_addr = "127.0.0.1";
    }
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw IoError("socket(): " + std::string(std::strerror(errno)));
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = make_addr(bind_addr, port);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string err = std::strerror(errno);
        ::close(fd_);
        fd_ = -1;
        throw IoError("bind(" + bind_addr + ":" + std::to_string(port) + "): " + err);
    }
    if (::listen(fd_, 64) != 0) {
        const std::string err = std::strerror(errno);
        ::close(fd_);
        fd_ = -1;
        throw IoError("listen(): " + err);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

Listener::~Listener() { close(); }

void Listener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

std::optional<Socket> Listener::accept_one() {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) return std::nullopt;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Socket(fd);
}

void send_message(Socket& s, const Message& m) { s.send_all(encode_message(m)); }

std::optional<Message> recv_message(Socket& s) {
    uint8_t hdr[4];
    if (!s.recv_all(hdr, 4)) return std::nullopt;
    ByteReader rd(hdr);
    const uint32_t len = rd.u32le();
    if (len == 0 || len - 1 > kMaxPayload) throw ProtocolError("frame length " + std::to_string(len) + " out of range");
    std::vector<uint8_t> body(len);
    if (!s.recv_all(body.data(), len)) throw ProtocolError("connection closed mid-frame");
    return decode_body(body);
}

std::pair<std::string, int> parse_host_port(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw ValueError("address '" + addr + "' must be host:port");
    const std::string host = addr.substr(0, colon);
    const int port = std::atoi(addr.c_str() + colon + 1);
    if (port <= 0 || port > 65535) throw ValueError("bad port in '" + addr + "'");
    return {host, port};
}

}  // namespace ra3c
