#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "ra3c/net.hpp"
#include "ra3c/protocol.hpp"
#include "ra3c/render.hpp"
#include "ra3c/sim.hpp"
#include "ra3c/socket.hpp"

namespace ra3c {

// Lockstep environment session state machine, transport-agnostic: the TCP
// server and the in-process client both drive it with the same messages.
// HELLO negotiates the frame size and picks a track, RESET spawns, then OBS
// and ACT alternate strictly. A terminal OBS ends the episode; only RESET (or
// BYE) is accepted afterwards. RESET mid-episode abandons it.
class EnvSession {
public:
    struct Config {
        std::vector<std::shared_ptr<const Track>> tracks;
        SimConfig sim;
        int max_frame_dim = 256;
        uint64_t seed = 0;  // per-episode seeds derive from this
    };

    explicit EnvSession(Config cfg);

    // nullopt means the session is over (BYE) and the connection should close.
    std::optional<Message> handle(const Message& in);

    const Simulator* simulator() const { return sim_ ? &*sim_ : nullptr; }

private:
    Message do_hello(const HelloPayload& p);
    Message do_reset(uint16_t checkpoint);
    Message do_act(uint8_t action);
    ObsPayload make_obs(const StepEvents* ev);

    enum class State { AwaitHello, Idle, InEpisode };
    Config cfg_;
    State state_ = State::AwaitHello;
    std::optional<Simulator> sim_;
    RenderConfig render_;
    uint32_t episode_ = 0;
    uint32_t step_ = 0;
    int last_action_ = -1;
};

// Shared target network: serves weight snapshots and applies pushed gradients
// with RMSProp, serialized under one mutex. Stale pushes (basis version older
// than current) are applied as-is; staleness is only recorded.
class ParamService {
public:
    struct Stats {
        uint64_t pushes = 0;
        uint64_t stale_pushes = 0;
        uint64_t staleness_sum = 0;
        uint64_t nacks = 0;
    };

    ParamService(ParamSet initial, OptState opt, bool record_checksums = false);

    Message handle(const Message& in);

    ParamsPayload snapshot() const;
    uint64_t version() const;
    ParamSet current() const;
    Stats stats() const;

    // Consistency audit: FNV-1a of the weight vector after each applied push.
    uint64_t checksum_at(uint64_t version) const;
    static uint64_t weights_checksum(std::span<const float> w);

private:
    mutable std::mutex mu_;
    ParamSet params_;
    OptState opt_;
    Stats stats_;
    bool record_checksums_;
    std::vector<uint64_t> checksums_;  // index = version
};

// --- client-side interfaces --------------------------------------------------

class EnvClient {
public:
    virtual ~EnvClient() = default;
    virtual HelloPayload hello(int frame_h, int frame_w, int track) = 0;
    virtual ObsPayload reset(int checkpoint) = 0;
    virtual ObsPayload act(int action_class) = 0;
};

class ParamClient {
public:
    virtual ~ParamClient() = default;
    virtual ParamsPayload get() = 0;
    virtual uint64_t push(uint64_t basis_version, std::span<const float> grads) = 0;  // returns new version
};

// In-process transport: same message semantics, bytes included — every call
// round-trips through encode/decode exactly like the socket path.
class LocalEnvClient : public EnvClient {
public:
    explicit LocalEnvClient(EnvSession::Config cfg) : session_(std::move(cfg)) {}
    HelloPayload hello(int frame_h, int frame_w, int track) override;
    ObsPayload reset(int checkpoint) override;
    ObsPayload act(int action_class) override;

private:
    Message call(const Message& m);
    EnvSession session_;
};

class LocalParamClient : public ParamClient {
public:
    explicit LocalParamClient(std::shared_ptr<ParamService> service) : service_(std::move(service)) {}
    ParamsPayload get() override;
    uint64_t push(uint64_t basis_version, std::span<const float> grads) override;

private:
    Message call(const Message& m);
    std::shared_ptr<ParamService> service_;
};

class TcpEnvClient : public EnvClient {
public:
    TcpEnvClient(const std::string& host, int port);
    ~TcpEnvClient() override;
    HelloPayload hello(int frame_h, int frame_w, int track) override;
    ObsPayload reset(int checkpoint) override;
    ObsPayload act(int action_class) override;

private:
    Message call(const Message& m);
    Socket sock_;
};

class TcpParamClient : public ParamClient {
public:
    TcpParamClient(const std::string& host, int port);
    ~TcpParamClient() override;
    ParamsPayload get() override;
    uint64_t push(uint64_t basis_version, std::span<const float> grads) override;

private:
    Message call(const Message& m);
    Socket sock_;
};

// --- servers ------------------------------------------------------------------

// One thread per connection; sessions are fully independent.
class EnvServer {
public:
    EnvServer(EnvSession::Config session_cfg, int port, std::string bind_addr = "");
    ~EnvServer();
    int port() const;
    void stop();
    uint64_t protocol_errors() const { return protocol_errors_.load(); }

private:
    void accept_loop();
    EnvSession::Config cfg_;
    Listener listener_;
    std::thread accept_thread_;
    std::vector<std::thread> sessions_;
    std::mutex mu_;
    std::atomic<bool> stopping_{false};
    std::atomic<uint64_t> protocol_errors_{0};
};

class ParamServer {
public:
    ParamServer(std::shared_ptr<ParamService> service, int port, std::string bind_addr = "");
    ~ParamServer();
    int port() const;
    void stop();
    ParamService& service() { return *service_; }
    uint64_t protocol_errors() const { return protocol_errors_.load(); }

private:
    void accept_loop();
    std::shared_ptr<ParamService> service_;
    Listener listener_;
    std::thread accept_thread_;
    std::vector<std::thread> sessions_;
    std::mutex mu_;
    std::atomic<bool> stopping_{false};
    std::atomic<uint64_t> protocol_errors_{0};
};

}  // namespace ra3c
