#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "intertwine/noise.hpp"

using namespace intertwine::engine;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST_CASE("philox4x32-10 known answers") {
    auto check = [](PhiloxCounter ctr, PhiloxKey key, PhiloxCounter want) {
        const PhiloxCounter got = philox4x32_10(ctr, key);
        for (int i = 0; i < 4; ++i) CHECK(got[i] == want[i]);
    };
    check({0, 0, 0, 0}, {0, 0}, {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    check({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu},
          {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    check({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u},
          {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("increments are a pure function of (seed, stream, counter)") {
    const NoiseStream s{42, 7, 1000};
    const auto a = gauss_increments(s, 5, 0.01);
    const auto b = gauss_increments(s, 5, 0.01);
    CHECK(a == b);
    CHECK(a != gauss_increments(s.at(1001), 5, 0.01));
    CHECK(a != gauss_increments(NoiseStream{42, 8, 1000}, 5, 0.01));
    CHECK(a != gauss_increments(NoiseStream{43, 7, 1000}, 5, 0.01));

    std::vector<double> c(5);
    gauss_increments(s, 0.01, c);
    CHECK(a == c);

    // a longer request extends the shorter one
    const auto d = gauss_increments(s, 7, 0.01);
    for (int i = 0; i < 5; ++i) CHECK(d[i] == a[i]);
}

TEST_CASE("uniforms lie in the open unit interval") {
    std::vector<double> u(2);
    for (std::uint64_t c = 0; c < 20000; ++c) {
        uniforms(NoiseStream{1, 2, c}, u);
        for (double x : u) {
            CHECK(x > 0.0);
            CHECK(x < 1.0);
        }
    }
}

TEST_CASE("increment moments match N(0, h)") {
    const double h = 0.01;
    const std::size_t n = 1000000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (std::size_t c = 0; c < n / 4; ++c) {
        for (double x : gauss_increments(NoiseStream{3, 0, c}, 4, h)) {
            s1 += x;
            s2 += x * x;
            s4 += x * x * x * x;
        }
    }
    const double mean = s1 / n, var = s2 / n, m4 = s4 / n;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(h / n));
    CHECK(std::abs(var - h) <= 4.0 * h * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0 * h * h) <= 4.0 * h * h * std::sqrt(96.0 / n));
}

TEST_CASE("neighbouring streams are uncorrelated") {
    const std::size_t n = 200000;
    double sxy = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const double x = gauss_increments(NoiseStream{9, 0, c}, 1, 1.0)[0];
        const double y = gauss_increments(NoiseStream{9, 1, c}, 1, 1.0)[0];
        sxy += x * y;
    }
    CHECK(std::abs(sxy / n) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("nonpositive variance is rejected") {
    CHECK_THROWS_AS(gauss_increments(NoiseStream{}, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_increments(NoiseStream{}, 2, -1.0), std::invalid_argument);
}
