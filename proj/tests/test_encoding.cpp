#include "multicrop/encoding.hpp"

#include <doctest.h>

#include <cmath>

#include "multicrop/rng.hpp"

using namespace multicrop;

TEST_CASE("encode at p=0 is zeros with unit cosines") {
    const Eigen::VectorXd v = encode(0.0, 2);
    REQUIRE(v.size() == 7);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 1.0);
    CHECK(v[3] == 0.0);
    CHECK(v[4] == 1.0);
    CHECK(v[5] == 0.0);
    CHECK(v[6] == 1.0);
}

TEST_CASE("encode at p=1, L=0") {
    const Eigen::VectorXd v = encode(1.0, 0);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1.0);
    CHECK(std::abs(v[1]) <= 2e-16);  // sin(pi) up to rounding of pi itself
    CHECK(v[2] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("encode at p=0.5, L=1") {
    const Eigen::VectorXd v = encode(0.5, 1);
    REQUIRE(v.size() == 5);
    CHECK(v[0] == 0.5);
    CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(v[2]) <= 2e-16);
    CHECK(std::abs(v[3]) <= 2e-16);
    CHECK(v[4] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("output lengths hold across the supported level range") {
    const BBox box{17.0, -4.0, 120.0};
    for (int levels = 0; levels <= 64; ++levels) {
        CHECK(encode(0.3, levels).size() == 2 * levels + 3);
        CHECK(encode_bbox(box, levels).size() == encoding_length(levels));
        CHECK(encoding_length(levels) == 3 * (2 * levels + 3));
    }
    CHECK(encode_bbox(box).size() == 201);  // default L = 32
}

TEST_CASE("encode matches a direct per-band oracle") {
    CounterRng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const double p = rng.uniform(-500.0, 500.0);
        const int levels = static_cast<int>(rng.next_u64() % 11);
        const Eigen::VectorXd v = encode(p, levels);
        CHECK(v[0] == p);
        for (int l = 0; l <= levels; ++l) {
            // 1 ulp of slack: the library's sin/cos pair may be folded into a
            // single sincos call with different last-bit rounding.
            const double freq = std::pow(2.0, l) * M_PI;
            CHECK(std::abs(v[1 + 2 * l] - std::sin(freq * p)) <= 5e-16);
            CHECK(std::abs(v[2 + 2 * l] - std::cos(freq * p)) <= 5e-16);
        }
    }
}

TEST_CASE("per-band entries stay on the unit circle") {
    CounterRng rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = rng.uniform(-960.0, 960.0);
        const Eigen::VectorXd v = encode(p, 32);
        for (int l = 0; l <= 32; ++l) {
            const double s = v[1 + 2 * l], c = v[2 + 2 * l];
            CHECK(std::abs(s * s + c * c - 1.0) <= 1e-14);
        }
    }
}

TEST_CASE("integer inputs land on band extremes at low levels") {
    const Eigen::VectorXd v = encode(3.0, 4);
    CHECK(std::abs(v[1]) <= 1e-13);                            // sin(3 pi)
    CHECK(v[2] == doctest::Approx(-1.0).epsilon(1e-13));       // cos(3 pi)
    for (int l = 1; l <= 4; ++l) {
        CHECK(std::abs(v[1 + 2 * l]) <= 1e-13);                // sin(even pi)
        CHECK(v[2 + 2 * l] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("encode_bbox concatenates the three coordinates") {
    const BBox box{31.5, -210.25, 96.0};
    for (const double ps : {1.0, 0.5, 0.015625}) {
        const int n = 2 * 6 + 3;
        const Eigen::VectorXd v = encode_bbox(box, 6, ps);
        REQUIRE(v.size() == 3 * n);
        CHECK((v.segment(0, n).array() == encode(box.c_x * ps, 6).array()).all());
        CHECK((v.segment(n, n).array() == encode(box.c_y * ps, 6).array()).all());
        CHECK((v.segment(2 * n, n).array() == encode(box.b * ps, 6).array()).all());
    }
}

TEST_CASE("zero bbox encodes to zeros except the cosine slots") {
    const Eigen::VectorXd v = encode_bbox({0.0, 0.0, 0.0}, 32);
    const int n = 2 * 32 + 3;
    for (int c = 0; c < 3; ++c) {
        CHECK(v[c * n] == 0.0);
        for (int l = 0; l <= 32; ++l) {
            CHECK(v[c * n + 1 + 2 * l] == 0.0);
            CHECK(v[c * n + 2 + 2 * l] == 1.0);
        }
    }
}

TEST_CASE("relative encoding is antisymmetric and vanishes on identical boxes") {
    CounterRng rng(107);
    for (int trial = 0; trial < 25; ++trial) {
        const BBox m{rng.uniform(-400.0, 400.0), rng.uniform(-300.0, 300.0), rng.uniform(10.0, 600.0)};
        const BBox n{rng.uniform(-400.0, 400.0), rng.uniform(-300.0, 300.0), rng.uniform(10.0, 600.0)};
        const Eigen::VectorXd fwd = relative(m, n);
        const Eigen::VectorXd bwd = relative(n, m);
        REQUIRE(fwd.size() == 201);
        for (Eigen::Index i = 0; i < fwd.size(); ++i) CHECK(fwd[i] == -bwd[i]);
        CHECK(relative(m, m).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("pre_scale shrinks the argument, not the output layout") {
    // Scaling by an exact power of two must reproduce the encoding of the
    // scaled box bit for bit.
    const BBox box{640.0, -384.0, 224.0};
    const BBox scaled{box.c_x / 256.0, box.c_y / 256.0, box.b / 256.0};
    const Eigen::VectorXd a = encode_bbox(box, 32, 1.0 / 256.0);
    const Eigen::VectorXd b = encode_bbox(scaled, 32, 1.0);
    REQUIRE(a.size() == b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("negative level counts are rejected") {
    CHECK_THROWS_AS(encode(0.0, -1), InvalidSpec);
    CHECK_THROWS_AS(encode_bbox({0.0, 0.0, 1.0}, -3), InvalidSpec);
}
