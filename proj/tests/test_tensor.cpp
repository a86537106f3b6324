#include "oracles.hpp"

#include "evrnet/tensor.hpp"

#include <doctest.h>

#include <filesystem>

using evr::Shape;
using evr::Tensor;

TEST_CASE("concat_channels shape arithmetic")
{
    const Tensor a(Shape{1, 3, 2, 2});
    const Tensor b(Shape{1, 2, 2, 2});
    CHECK(evr::concat_channels(a, b).shape() == Shape{1, 5, 2, 2});
}

TEST_CASE("concat_channels keeps channel order")
{
    const Tensor a(Shape{1, 3, 2, 2}, 0.0f);
    const Tensor b(Shape{1, 2, 2, 2}, 1.0f);
    const Tensor out = evr::concat_channels(a, b);
    for (std::uint32_t c = 0; c < 5; ++c)
        for (float v : out.plane(0, c))
            CHECK(v == (c < 3 ? 0.0f : 1.0f));
}

TEST_CASE("concat_channels matches index-mapping oracle and slices back")
{
    oracle::Random rng(11);
    for (int trial = 0; trial < 10; ++trial)
    {
        const std::uint32_t n = rng.integer(1, 2), h = rng.integer(1, 6), w = rng.integer(1, 6);
        const Tensor a = rng.tensor(Shape{n, std::uint32_t(rng.integer(1, 4)), h, w});
        const Tensor b = rng.tensor(Shape{n, std::uint32_t(rng.integer(1, 4)), h, w});
        const Tensor out = evr::concat_channels(a, b);
        CHECK(out == oracle::concat(a, b));
        CHECK(evr::slice_channels(out, 0, a.shape().c) == a);
        CHECK(evr::slice_channels(out, a.shape().c, b.shape().c) == b);
    }
}

TEST_CASE("concat_channels rejects mismatched shapes with both shapes in the message")
{
    const Tensor a(Shape{1, 3, 2, 2});
    const Tensor b(Shape{1, 2, 3, 2});
    try
    {
        evr::concat_channels(a, b);
        FAIL("expected ShapeError");
    }
    catch (const evr::ShapeError& e)
    {
        const std::string msg = e.what();
        CHECK(msg.find("(1,3,2,2)") != std::string::npos);
        CHECK(msg.find("(1,2,3,2)") != std::string::npos);
    }
}

TEST_CASE("elementwise add and sub")
{
    const Tensor a(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
    const Tensor b(Shape{1, 1, 2, 2}, {10, 10, 10, 10});
    CHECK(evr::add(a, b) == Tensor(Shape{1, 1, 2, 2}, {11, 12, 13, 14}));
    CHECK(evr::add(a, Tensor(a.shape())) == a);
    CHECK(evr::sub(a, Tensor(a.shape())) == a);
    const Tensor zero = evr::sub(a, a);
    for (float v : zero.data())
        CHECK(v == 0.0f);
    CHECK_THROWS_AS(evr::add(a, Tensor(Shape{1, 1, 2, 3})), evr::ShapeError);
    CHECK_THROWS_AS(evr::sub(a, Tensor(Shape{1, 2, 2, 2})), evr::ShapeError);
}

TEST_CASE("add and sub match scalar loops and invert each other")
{
    oracle::Random rng(5);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Shape s{1, std::uint32_t(rng.integer(1, 4)), std::uint32_t(rng.integer(1, 7)), std::uint32_t(rng.integer(1, 7))};
        const Tensor a = rng.tensor(s), b = rng.tensor(s);
        const Tensor a_copy = a, b_copy = b;
        CHECK(evr::add(a, b) == oracle::add(a, b));
        CHECK(evr::sub(a, b) == oracle::sub(a, b));
        // integer-valued inputs make the round trip exact
        const Tensor ia = rng.integer_tensor(s, -1000, 1000), ib = rng.integer_tensor(s, -1000, 1000);
        CHECK(evr::sub(evr::add(ia, ib), ib) == ia);
        CHECK(a == a_copy);
        CHECK(b == b_copy);
    }
}

TEST_CASE("add refuses to produce non-finite values")
{
    const Tensor big(Shape{1, 1, 1, 1}, 3.0e38f);
    CHECK_THROWS_AS(evr::add(big, big), evr::Error);
}

TEST_CASE("tensor construction validates dims")
{
    CHECK_THROWS_AS(Tensor(Shape{1, 0, 2, 2}), evr::ShapeError);
    CHECK_THROWS_AS(Tensor(Shape{1, 1, 2, 2}, std::vector<float>(3)), evr::ShapeError);
}

TEST_CASE("EVRT byte layout and round trip")
{
    const Tensor t(Shape{1, 2, 1, 2}, {1.0f, -2.0f, 0.5f, 0.0f});
    const auto bytes = evr::encode_tensor(t);
    REQUIRE(bytes.size() == 4 + 4 + 16 + 16);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EVRT");
    CHECK(bytes[4] == 1);
    CHECK(bytes[8] == 1);  // n
    CHECK(bytes[12] == 2); // c
    // 1.0f = 0x3F800000 little-endian
    CHECK(bytes[24] == 0x00);
    CHECK(bytes[27] == 0x3F);
    CHECK(evr::decode_tensor(bytes) == t);

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(evr::decode_tensor(bad), evr::FormatError);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(evr::decode_tensor(truncated), evr::FormatError);

    const auto path = std::filesystem::temp_directory_path() / "evrnet_test_tensor.evrt";
    evr::write_tensor(t, path);
    CHECK(evr::read_tensor(path) == t);
    std::filesystem::remove(path);
}
