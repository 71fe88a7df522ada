#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ra3c/common.hpp"

namespace ra3c {

// Wire framing: u32le length (tag + payload bytes), u8 tag, payload.
// All multi-byte integers little-endian. Payloads above 16 MiB are rejected
// before allocation.
constexpr size_t kMaxPayload = 16u << 20;
constexpr int kDefaultEnvPort = 7801;
constexpr int kDefaultParamPort = 7802;

enum class MsgType : uint8_t {
    Hello = 1,
    Reset = 2,
    Obs = 3,
    Act = 4,
    GetParams = 5,
    Params = 6,
    PushGrads = 7,
    Ack = 8,
    Bye = 9,
    Nack = 10,
};

// One layout both ways; the client leaves the server-filled fields zero.
struct HelloPayload {
    uint16_t frame_h = 0;
    uint16_t frame_w = 0;
    uint16_t track = 0;
    uint16_t checkpoints = 0;  // server fills
    float track_length = 0;    // server fills
    bool operator==(const HelloPayload&) const = default;
};

struct ResetPayload {
    uint16_t checkpoint = 0;
    bool operator==(const ResetPayload&) const = default;
};

// flags: bit0 hit, bit1 crash, bit2 checkpoint, bit3 finished,
// bits 4-5 crash reason (0 none, 1 stalled, 2 wrong way, 3 off road).
enum : uint8_t {
    OBS_HIT = 1 << 0,
    OBS_CRASH = 1 << 1,
    OBS_CHECKPOINT = 1 << 2,
    OBS_FINISHED = 1 << 3,
};

struct ObsPayload {
    uint32_t episode = 0;
    uint32_t step = 0;
    std::vector<uint8_t> frame;  // H*W*3, row-major RGB
    float speed = 0;             // m/s
    float alpha = 0;
    float d = 0;
    float r_w = 0;
    float progress = 0;
    uint8_t flags = 0;
    bool operator==(const ObsPayload&) const = default;

    bool terminal() const { return flags & (OBS_CRASH | OBS_FINISHED); }
    int crash_reason_code() const { return (flags >> 4) & 0x3; }
};

struct ActPayload {
    uint8_t action = 0;
    bool operator==(const ActPayload&) const = default;
};

struct ParamsPayload {
    uint64_t version = 0;
    std::vector<float> weights;
    bool operator==(const ParamsPayload&) const = default;
};

struct PushGradsPayload {
    uint64_t basis_version = 0;
    std::vector<float> grads;
    bool operator==(const PushGradsPayload&) const = default;
};

struct AckPayload {
    uint64_t version = 0;
    bool operator==(const AckPayload&) const = default;
};

struct NackPayload {
    std::string diagnostic;
    bool operator==(const NackPayload&) const = default;
};

struct Message {
    MsgType type = MsgType::Bye;
    std::variant<std::monostate, HelloPayload, ResetPayload, ObsPayload, ActPayload, ParamsPayload,
                 PushGradsPayload, AckPayload, NackPayload>
        body;

    static Message hello(HelloPayload p) { return {MsgType::Hello, std::move(p)}; }
    static Message reset(uint16_t cp) { return {MsgType::Reset, ResetPayload{cp}}; }
    static Message obs(ObsPayload p) { return {MsgType::Obs, std::move(p)}; }
    static Message act(uint8_t a) { return {MsgType::Act, ActPayload{a}}; }
    static Message get_params() { return {MsgType::GetParams, std::monostate{}}; }
    static Message params(ParamsPayload p) { return {MsgType::Params, std::move(p)}; }
    static Message push_grads(PushGradsPayload p) { return {MsgType::PushGrads, std::move(p)}; }
    static Message ack(uint64_t version) { return {MsgType::Ack, AckPayload{version}}; }
    static Message bye() { return {MsgType::Bye, std::monostate{}}; }
    static Message nack(std::string why) { return {MsgType::Nack, NackPayload{std::move(why)}}; }
};

bool operator==(const Message& a, const Message& b);

// Complete wire frame (length header included).
std::vector<uint8_t> encode_message(const Message& m);
Message decode_message(std::span<const uint8_t> frame);

// Tag + payload without the length header (what send/recv loops exchange
// after the length is consumed).
std::vector<uint8_t> encode_body(const Message& m);
Message decode_body(std::span<const uint8_t> body);

}  // namespace ra3c
