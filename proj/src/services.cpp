#include "ra3c/services.hpp"

namespace ra3c {

EnvSession::EnvSession(Config cfg) : cfg_(std::move(cfg)) {
    if (cfg_.tracks.empty()) throw ValueError("env session needs at least one track");
}

std::optional<Message> EnvSession::handle(const Message& in) {
    if (in.type == MsgType::Bye) return std::nullopt;
    switch (state_) {
        case State::AwaitHello:
            if (in.type != MsgType::Hello) throw ProtocolError("expected HELLO first");
            return do_hello(std::get<HelloPayload>(in.body));
        case State::Idle:
            if (in.type != MsgType::Reset) throw ProtocolError("expected RESET (episode not running)");
            return do_reset(std::get<ResetPayload>(in.body).checkpoint);
        case State::InEpisode:
            if (in.type == MsgType::Reset) return do_reset(std::get<ResetPayload>(in.body).checkpoint);
            if (in.type != MsgType::Act) throw ProtocolError("expected ACT or RESET during an episode");
            return do_act(std::get<ActPayload>(in.body).action);
    }
    throw ProtocolError("bad session state");
}

Message EnvSession::do_hello(const HelloPayload& p) {
    if (p.frame_h < 8 || p.frame_w < 8 || p.frame_h > cfg_.max_frame_dim || p.frame_w > cfg_.max_frame_dim)
        throw ProtocolError("frame size out of range");
    if (p.track >= cfg_.tracks.size()) throw ProtocolError("track index out of range");
    render_ = RenderConfig{};
    render_.height = p.frame_h;
    render_.width = p.frame_w;
    sim_.emplace(cfg_.tracks[p.track], cfg_.sim);
    state_ = State::Idle;
    HelloPayload reply = p;
    reply.checkpoints = uint16_t(sim_->track().checkpoint_count());
    reply.track_length = float(sim_->track().length());
    return Message::hello(reply);
}

Message EnvSession::do_reset(uint16_t checkpoint) {
    if (int(checkpoint) >= sim_->track().checkpoint_count()) throw ProtocolError("checkpoint out of range");
    episode_ += 1;
    step_ = 0;
    last_action_ = -1;
    sim_->spawn(int(checkpoint), derive_seed(cfg_.seed, SeedStream::Episode, episode_));
    state_ = State::InEpisode;
    return Message::obs(make_obs(nullptr));
}

Message EnvSession::do_act(uint8_t action) {
    if (action >= kActionCount) throw ProtocolError("action class out of range");
    const ControlCommand cmd = class_to_control(action);
    const StepEvents ev = sim_->step(cmd);
    last_action_ = action;
    step_ += 1;
    if (ev.terminal()) state_ = State::Idle;
    return Message::obs(make_obs(&ev));
}

ObsPayload EnvSession::make_obs(const StepEvents* ev) {
    const Observation obs = observe(*sim_, render_, last_action_);
    ObsPayload p;
    p.episode = episode_;
    p.step = step_;
    p.frame = obs.frame_rgb;
    p.speed = float(obs.speed);
    p.alpha = float(obs.signal.alpha);
    p.d = float(obs.signal.d);
    p.r_w = float(obs.signal.r_w);
    p.progress = float(obs.progress);
    if (ev) {
        if (ev->hit) p.flags |= OBS_HIT;
        if (ev->crash) p.flags |= OBS_CRASH;
        if (ev->checkpoint) p.flags |= OBS_CHECKPOINT;
        if (ev->finished) p.flags |= OBS_FINISHED;
        p.flags |= uint8_t(int(ev->reason) << 4);
    }
    return p;
}

// --- ParamService ---------------------------------------------------------

ParamService::ParamService(ParamSet initial, OptState opt, bool record_checksums)
    : params_(std::move(initial)), opt_(std::move(opt)), record_checksums_(record_checksums) {
    if (!params_.same_layout(opt_.accum)) throw ShapeError("optimizer state does not match parameters");
    if (record_checksums_) checksums_.push_back(weights_checksum(params_.flatten()));
}

uint64_t ParamService::weights_checksum(std::span<const float> w) {
    uint64_t h = 1469598103934665603ull;
    const uint8_t* bytes = reinterpret_cast<const uint8_t*>(w.data());
    for (size_t i = 0; i < w.size() * 4; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

Message ParamService::handle(const Message& in) {
    switch (in.type) {
        case MsgType::GetParams:
            return Message::params(snapshot());
        case MsgType::PushGrads: {
            const auto& p = std::get<PushGradsPayload>(in.body);
            std::lock_guard lock(mu_);
            if (p.grads.size() != params_.flat_count()) {
                stats_.nacks += 1;
                return Message::nack("gradient count " + std::to_string(p.grads.size()) +
                                     " does not match parameter count " + std::to_string(params_.flat_count()));
            }
            ParamSet grads = params_.zeros_like();
            grads.unflatten(p.grads);
            if (p.basis_version < params_.version) {
                stats_.stale_pushes += 1;
                stats_.staleness_sum += params_.version - p.basis_version;
            }
            rmsprop_apply(params_, grads, opt_);
            stats_.pushes += 1;
            if (record_checksums_) checksums_.push_back(weights_checksum(params_.flatten()));
            return Message::ack(params_.version);
        }
        default:
            throw ProtocolError("param server expects GET_PARAMS or PUSH_GRADS");
    }
}

ParamsPayload ParamService::snapshot() const {
    std::lock_guard lock(mu_);
    return ParamsPayload{params_.version, params_.flatten()};
}

uint64_t ParamService::version() const {
    std::lock_guard lock(mu_);
    return params_.version;
}

ParamSet ParamService::current() const {
    std::lock_guard lock(mu_);
    return params_;
}

ParamService::Stats ParamService::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

uint64_t ParamService::checksum_at(uint64_t version) const {
    std::lock_guard lock(mu_);
    if (!record_checksums_ || version >= checksums_.size()) throw ValueError("no checksum recorded for version");
    return checksums_[version];
}

// --- local clients ----------------------------------------------------------

Message LocalEnvClient::call(const Message& m) {
    // through the codec both ways: identical bytes to the socket path
    auto reply = session_.handle(decode_message(encode_message(m)));
    if (!reply) throw ProtocolError("session closed");
    return decode_message(encode_message(*reply));
}

HelloPayload LocalEnvClient::hello(int h, int w, int track) {
    auto r = call(Message::hello(HelloPayload{uint16_t(h), uint16_t(w), uint16_t(track), 0, 0}));
    return std::get<HelloPayload>(r.body);
}

ObsPayload LocalEnvClient::reset(int checkpoint) {
    auto r = call(Message::reset(uint16_t(checkpoint)));
    return std::get<ObsPayload>(std::move(r.body));
}

ObsPayload LocalEnvClient::act(int action_class) {
    auto r = call(Message::act(uint8_t(action_class)));
    return std::get<ObsPayload>(std::move(r.body));
}

Message LocalParamClient::call(const Message& m) {
    return decode_message(encode_message(service_->handle(decode_message(encode_message(m)))));
}

ParamsPayload LocalParamClient::get() {
    auto r = call(Message::get_params());
    return std::get<ParamsPayload>(std::move(r.body));
}

uint64_t LocalParamClient::push(uint64_t basis_version, std::span<const float> grads) {
    auto r = call(Message::push_grads(PushGradsPayload{basis_version, {grads.begin(), grads.end()}}));
    if (r.type == MsgType::Nack) throw ValueError("push rejected: " + std::get<NackPayload>(r.body).diagnostic);
    return std::get<AckPayload>(r.body).version;
}

// --- tcp clients --------------------------------------------------------------

TcpEnvClient::TcpEnvClient(const std::string& host, int port) : sock_(Socket::connect_to(host, port)) {}

TcpEnvClient::~TcpEnvClient() {
    try {
        send_message(sock_, Message::bye());
    } catch (...) {
    }
}

Message TcpEnvClient::call(const Message& m) {
    send_message(sock_, m);
    auto reply = recv_message(sock_);
    if (!reply) throw IoError("env server closed the connection");
    return std::move(*reply);
}

HelloPayload TcpEnvClient::hello(int h, int w, int track) {
    auto r = call(Message::hello(HelloPayload{uint16_t(h), uint16_t(w), uint16_t(track), 0, 0}));
    return std::get<HelloPayload>(r.body);
}

ObsPayload TcpEnvClient::reset(int checkpoint) {
    auto r = call(Message::reset(uint16_t(checkpoint)));
    return std::get<ObsPayload>(std::move(r.body));
}

ObsPayload TcpEnvClient::act(int action_class) {
    auto r = call(Message::act(uint8_t(action_class)));
    return std::get<ObsPayload>(std::move(r.body));
}

TcpParamClient::TcpParamClient(const std::string& host, int port) : sock_(Socket::connect_to(host, port)) {}

TcpParamClient::~TcpParamClient() {
    try {
        send_message(sock_, Message::bye());
    } catch (...) {
    }
}

Message TcpParamClient::call(const Message& m) {
    send_message(sock_, m);
    auto reply = recv_message(sock_);
    if (!reply) throw IoError("param server closed the connection");
    return std::move(*reply);
}

ParamsPayload TcpParamClient::get() {
    auto r = call(Message::get_params());
    return std::get<ParamsPayload>(std::move(r.body));
}

uint64_t TcpParamClient::push(uint64_t basis_version, std::span<const float> grads) {
    auto r = call(Message::push_grads(PushGradsPayload{basis_version, {grads.begin(), grads.end()}}));
    if (r.type == MsgType::Nack) throw ValueError("push rejected: " + std::get<NackPayload>(r.body).diagnostic);
    return std::get<AckPayload>(r.body).version;
}

// --- servers -------------------------------------------------------------------

EnvServer::EnvServer(EnvSession::Config session_cfg, int port, std::string bind_addr)
    : cfg_(std::move(session_cfg)), listener_(port, std::move(bind_addr)) {
    accept_thread_ = std::thread([this] { accept_loop(); });
}

EnvServer::~EnvServer() { stop(); }

int EnvServer::port() const { return listener_.port(); }

void EnvServer::accept_loop() {
    while (!stopping_) {
        auto sock = listener_.accept_one();
        if (!sock) break;
        std::lock_guard lock(mu_);
        sessions_.emplace_back([this, s = std::move(*sock)]() mutable {
            EnvSession session(cfg_);
            try {
                for (;;) {
                    auto msg = recv_message(s);
                    if (!msg) break;
                    auto reply = session.handle(*msg);
                    if (!reply) break;
                    send_message(s, *reply);
                }
            } catch (const ProtocolError&) {
                protocol_errors_.fetch_add(1);
            } catch (const std::exception&) {
                // connection torn down; session state dies with it
            }
        });
    }
}

void EnvServer::stop() {
    if (stopping_.exchange(true)) return;
    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(mu_);
    for (auto& t : sessions_)
        if (t.joinable()) t.join();
    sessions_.clear();
}

ParamServer::ParamServer(std::shared_ptr<ParamService> service, int port, std::string bind_addr)
    : service_(std::move(service)), listener_(port, std::move(bind_addr)) {
    accept_thread_ = std::thread([this] { accept_loop(); });
}

ParamServer::~ParamServer() { stop(); }

int ParamServer::port() const { return listener_.port(); }

void ParamServer::accept_loop() {
    while (!stopping_) {
        auto sock = listener_.accept_one();
        if (!sock) break;
        std::lock_guard lock(mu_);
        sessions_.emplace_back([this, s = std::move(*sock)]() mutable {
            try {
                for (;;) {
                    auto msg = recv_message(s);
                    if (!msg || msg->type == MsgType::Bye) break;
                    send_message(s, service_->handle(*msg));
                }
            } catch (const ProtocolError&) {
                protocol_errors_.fetch_add(1);
            } catch (const std::exception&) {
            }
        });
    }
}

void ParamServer::stop() {
    if (stopping_.exchange(true)) return;
    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(mu_);
    for (auto& t : sessions_)
        if (t.joinable()) t.join();
    sessions_.clear();
}

}  // namespace ra3c
