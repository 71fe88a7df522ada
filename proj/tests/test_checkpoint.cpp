#include <cstdio>

#include "doctest.h"
#include "ra3c/params.hpp"

using namespace ra3c;

TEST_CASE("crc32 reference vector") {
    const std::string s = "123456789";
    CHECK(crc32(std::span(reinterpret_cast<const uint8_t*>(s.data()), s.size())) == 0xCBF43926u);
}

static ParamSet sample_params() {
    ParamSet p;
    p.segments.push_back({"conv1.w", Tensor({2, 1, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8})});
    p.segments.push_back({"conv1.b", Tensor({2}, {-0.5f, 0.125f})});
    p.version = 7;
    return p;
}

TEST_CASE("checkpoint encodes header, segments and CRC") {
    auto bytes = encode_checkpoint(sample_params());
    CHECK(bytes[0] == 'R');
    CHECK(bytes[1] == 'A');
    CHECK(bytes[2] == '3');
    CHECK(bytes[3] == 'C');
    auto back = decode_checkpoint(bytes);
    REQUIRE(back.segments.size() == 2);
    CHECK(back.segments[0].name == "conv1.w");
    CHECK(back.segments[0].tensor.shape == std::vector<int>{2, 1, 2, 2});
    CHECK(back.segments[0].tensor.data == sample_params().segments[0].tensor.data);
    CHECK(back.segments[1].tensor.data == sample_params().segments[1].tensor.data);
}

TEST_CASE("checkpoint detects corruption via CRC") {
    auto bytes = encode_checkpoint(sample_params());
    bytes[20] ^= 0x40;
    CHECK_THROWS_AS(decode_checkpoint(bytes), IoError);
}

TEST_CASE("checkpoint rejects wrong magic and truncation") {
    auto bytes = encode_checkpoint(sample_params());
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bad), IoError);
    bytes.resize(bytes.size() - 9);
    CHECK_THROWS_AS(decode_checkpoint(bytes), IoError);
}

TEST_CASE("checkpoint file round-trip") {
    const std::string path = "/tmp/ra3c_test_ckpt.bin";
    save_checkpoint(sample_params(), path);
    auto back = load_checkpoint(path);
    CHECK(back.segments.size() == 2);
    CHECK(back.segments[1].tensor.data == sample_params().segments[1].tensor.data);
    std::remove(path.c_str());
}
