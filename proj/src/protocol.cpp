#include "ra3c/protocol.hpp"

namespace ra3c {

bool operator==(const Message& a, const Message& b) { return a.type == b.type && a.body == b.body; }

std::vector<uint8_t> encode_body(const Message& m) {
    std::vector<uint8_t> out;
    out.push_back(uint8_t(m.type));
    switch (m.type) {
        case MsgType::Hello: {
            const auto& p = std::get<HelloPayload>(m.body);
            put_u16le(out, p.frame_h);
            put_u16le(out, p.frame_w);
            put_u16le(out, p.track);
            put_u16le(out, p.checkpoints);
            put_f32le(out, p.track_length);
            break;
        }
        case MsgType::Reset:
            put_u16le(out, std::get<ResetPayload>(m.body).checkpoint);
            break;
        case MsgType::Obs: {
            const auto& p = std::get<ObsPayload>(m.body);
            put_u32le(out, p.episode);
            put_u32le(out, p.step);
            out.insert(out.end(), p.frame.begin(), p.frame.end());
            put_f32le(out, p.speed);
            put_f32le(out, p.alpha);
            put_f32le(out, p.d);
            put_f32le(out, p.r_w);
            put_f32le(out, p.progress);
            put_u8(out, p.flags);
            break;
        }
        case MsgType::Act:
            put_u8(out, std::get<ActPayload>(m.body).action);
            break;
        case MsgType::GetParams:
        case MsgType::Bye:
            break;
        case MsgType::Params: {
            const auto& p = std::get<ParamsPayload>(m.body);
            put_u64le(out, p.version);
            put_u32le(out, uint32_t(p.weights.size()));
            for (float w : p.weights) put_f32le(out, w);
            break;
        }
        case MsgType::PushGrads: {
            const auto& p = std::get<PushGradsPayload>(m.body);
            put_u64le(out, p.basis_version);
            put_u32le(out, uint32_t(p.grads.size()));
            for (float g : p.grads) put_f32le(out, g);
            break;
        }
        case MsgType::Ack:
            put_u64le(out, std::get<AckPayload>(m.body).version);
            break;
        case MsgType::Nack: {
            const auto& p = std::get<NackPayload>(m.body);
            out.insert(out.end(), p.diagnostic.begin(), p.diagnostic.end());
            break;
        }
    }
    if (out.size() - 1 > kMaxPayload) throw ProtocolError("payload exceeds the 16 MiB limit");
    return out;
}

std::vector<uint8_t> encode_message(const Message& m) {
    auto body = encode_body(m);
    std::vector<uint8_t> out;
    out.reserve(body.size() + 4);
    put_u32le(out, uint32_t(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Message decode_body(std::span<const uint8_t> body) {
    if (body.empty()) throw ProtocolError("empty message body");
    if (body.size() - 1 > kMaxPayload) throw ProtocolError("payload exceeds the 16 MiB limit");
    ByteReader rd(body.subspan(1));
    Message m;
    switch (MsgType(body[0])) {
        case MsgType::Hello: {
            HelloPayload p;
            p.frame_h = rd.u16le();
            p.frame_w = rd.u16le();
            p.track = rd.u16le();
            p.checkpoints = rd.u16le();
            p.track_length = rd.f32le();
            m = Message::hello(p);
            break;
        }
        case MsgType::Reset:
            m = Message::reset(rd.u16le());
            break;
        case MsgType::Obs: {
            ObsPayload p;
            p.episode = rd.u32le();
            p.step = rd.u32le();
            if (rd.remaining() < 21) throw ProtocolError("OBS payload truncated");
            const size_t frame_len = rd.remaining() - 21;
            auto fb = rd.take(frame_len);
            p.frame.assign(fb.begin(), fb.end());
            p.speed = rd.f32le();
            p.alpha = rd.f32le();
            p.d = rd.f32le();
            p.r_w = rd.f32le();
            p.progress = rd.f32le();
            p.flags = rd.u8();
            m = Message::obs(std::move(p));
            break;
        }
        case MsgType::Act:
            m = Message::act(rd.u8());
            break;
        case MsgType::GetParams:
            m = Message::get_params();
            break;
        case MsgType::Params: {
            ParamsPayload p;
            p.version = rd.u64le();
            const uint32_t n = rd.u32le();
            if (rd.remaining() != size_t(n) * 4) throw ProtocolError("PARAMS length disagrees with count");
            p.weights.resize(n);
            for (auto& w : p.weights) w = rd.f32le();
            m = Message::params(std::move(p));
            break;
        }
        case MsgType::PushGrads: {
            PushGradsPayload p;
            p.basis_version = rd.u64le();
            const uint32_t n = rd.u32le();
            if (rd.remaining() != size_t(n) * 4) throw ProtocolError("PUSH_GRADS length disagrees with count");
            p.grads.resize(n);
            for (auto& g : p.grads) g = rd.f32le();
            m = Message::push_grads(std::move(p));
            break;
        }
        case MsgType::Ack:
            m = Message::ack(rd.u64le());
            break;
        case MsgType::Bye:
            m = Message::bye();
            break;
        case MsgType::Nack: {
            auto b = rd.take(rd.remaining());
            m = Message::nack(std::string(b.begin(), b.end()));
            break;
        }
        default:
            throw ProtocolError("unknown message tag " + std::to_string(int(body[0])));
    }
    if (!rd.done()) throw ProtocolError("trailing bytes after message payload");
    return m;
}

Message decode_message(std::span<const uint8_t> frame) {
    if (frame.size() < 5) throw ProtocolError("frame shorter than header + tag");
    ByteReader rd(frame.subspan(0, 4));
    const uint32_t len = rd.u32le();
    if (len != frame.size() - 4) throw ProtocolError("frame length field disagrees with data");
    return decode_body(frame.subspan(4));
}

}  // namespace ra3c
