#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spinlab/correlation.hpp"
#include "spinlab/rng.hpp"

using namespace spinlab;
using namespace spinlab::correlation;

static const double kPi = 3.14159265358979323846;

TEST_CASE("same-component probability follows sin^2(angle/2)") {
    CHECK(p_same(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p_same(kPi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p_same(kPi / 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p_same(kPi / 3) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p_same(2 * kPi / 3) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(p_same(-0.1), std::domain_error);
    CHECK_THROWS_AS(p_same(3.2), std::domain_error);
}

TEST_CASE("joint outcome probabilities split (1+z)/4 vs (1-z)/4 and sum to 1") {
    double z = 0.5;
    CHECK(joint_outcome_probability({Spin::Up, Spin::Up}, z) == doctest::Approx(0.375));
    CHECK(joint_outcome_probability({Spin::Down, Spin::Down}, z) == doctest::Approx(0.375));
    CHECK(joint_outcome_probability({Spin::Up, Spin::Down}, z) == doctest::Approx(0.125));
    CHECK(joint_outcome_probability({Spin::Down, Spin::Up}, z) == doctest::Approx(0.125));

    RandomStream rng(11);
    for (int k = 0; k < 100; ++k) {
        double zz = rng.uniform(-1.0, 1.0);
        double total = 0.0;
        for (Spin l : {Spin::Up, Spin::Down})
            for (Spin r : {Spin::Up, Spin::Down})
                total += joint_outcome_probability({l, r}, zz);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("classical triple density closed-form probes") {
    double d0 = classical_triple_density(0.0, 0.0, 0.0);
    CHECK(d0 == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-14));

    // disc(0.5, 0.5, 0.5) = 1 + 0.25 - 0.75 = 0.5
    double d1 = classical_triple_density(0.5, 0.5, 0.5);
    CHECK(d1 == doctest::Approx(1.0 / (8.0 * kPi * std::sqrt(0.5))).epsilon(1e-14));
    CHECK(d1 == doctest::Approx(0.056270).epsilon(1e-4));

    // outside the feasible region the density vanishes
    CHECK(classical_triple_density(0.9, -0.9, 0.9) == 0.0);
    CHECK(classical_triple_density(1.0, 0.0, 0.5) == 0.0); // disc < 0
    CHECK(classical_triple_density(1.0, 1.0, 1.0) == 0.0); // disc = 0 exactly

    CHECK(feasible_triple(0.0, 0.0, 0.0));
    CHECK(feasible_triple(0.5, 0.5, 0.5));
    CHECK(feasible_triple(1.0, 1.0, 1.0));
    CHECK_FALSE(feasible_triple(0.9, -0.9, 0.9));
}

TEST_CASE("classical triple density integrates to a constant conditional slice") {
    // For fixed (s,t) the u-section is 1/(8 pi sqrt(R^2 - (u - st)^2)) with
    // R^2 = (1-s^2)(1-t^2); Gauss-Chebyshev nodes integrate it exactly, giving
    // 1/8 per slice and 1/2 over the whole cube.
    const int m = 48;
    auto slice = [&](double s, double t) {
        double R = std::sqrt((1.0 - s * s) * (1.0 - t * t));
        double c = s * t;
        double acc = 0.0;
        for (int i = 1; i <= m; ++i) {
            double x = std::cos((2 * i - 1) * kPi / (2 * m));
            double u = c + R * x;
            double g = classical_triple_density(s, t, u) * R * std::sqrt(1.0 - x * x);
            acc += g;
        }
        return acc * kPi / m;
    };

    CHECK(slice(0.0, 0.0) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(slice(0.5, -0.3) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(slice(-0.8, 0.7) == doctest::Approx(0.125).epsilon(1e-10));

    // Midpoint rule over (s,t), exact slice value per cell: total = 1/2.
    const int ng = 64;
    double total = 0.0;
    for (int i = 0; i < ng; ++i) {
        double s = -1.0 + (i + 0.5) * 2.0 / ng;
        for (int j = 0; j < ng; ++j) {
            double t = -1.0 + (j + 0.5) * 2.0 / ng;
            total += slice(s, t) * (2.0 / ng) * (2.0 / ng);
        }
    }
    CHECK(total == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("delta plane forms vanish on their planes and points stay feasible") {
    RandomStream rng(7);
    for (int plane = 0; plane < 4; ++plane) {
        for (int k = 0; k < 500; ++k) {
            double z_ab = rng.uniform(-0.999, 0.999);
            PlaneSegment seg = plane_segment(plane, z_ab);
            REQUIRE(seg.weight > 0.0);
            REQUIRE(seg.za_lo >= -1.0 - 1e-15);
            REQUIRE(seg.za_hi <= 1.0 + 1e-15);
            double z_a = rng.uniform(seg.za_lo, seg.za_hi);
            double z_b = z_b_on_plane(plane, z_a, z_ab);
            CHECK(std::abs(z_b) <= 1.0 + 1e-12);
            CosineTriple p{z_a, z_b, z_ab};
            CHECK(std::abs(plane_form(plane, p)) <= 1e-12);
            // the quantum support sits inside the classically feasible region
            double disc = 1.0 + 2.0 * z_a * z_b * z_ab - z_a * z_a - z_b * z_b - z_ab * z_ab;
            CHECK(disc >= -1e-12);
            auto on = tetrahedral_density(p, 1e-9);
            CHECK(std::find(on.begin(), on.end(), plane) != on.end());
        }
    }
}

TEST_CASE("tetrahedral density support detection") {
    // interior point away from every plane
    CHECK(tetrahedral_density({0.1, 0.1, 0.1}).empty());
    // z_a + z_b + z_ab = -1
    auto on0 = tetrahedral_density({-0.5, -0.25, -0.25});
    REQUIRE(on0.size() == 1);
    CHECK(on0[0] == 0);
    // corner (1,1,1) lies on every plane except z_a + z_b + z_ab = -1
    auto corner = tetrahedral_density({1.0, 1.0, 1.0});
    CHECK(corner == std::vector<int>{1, 2, 3});
}

TEST_CASE("plane segment weights pair up as (1-u, 1+u, 1-u, 1+u)") {
    RandomStream rng(19);
    for (int k = 0; k < 200; ++k) {
        double u = rng.uniform(-1.0, 1.0);
        double w0 = plane_segment(0, u).weight;
        double w1 = plane_segment(1, u).weight;
        double w2 = plane_segment(2, u).weight;
        double w3 = plane_segment(3, u).weight;
        CHECK(w0 == doctest::Approx(1.0 - u).epsilon(1e-14));
        CHECK(w1 == doctest::Approx(1.0 + u).epsilon(1e-14));
        CHECK(w2 == doctest::Approx(1.0 - u).epsilon(1e-14));
        CHECK(w3 == doctest::Approx(1.0 + u).epsilon(1e-14));
        CHECK(w0 + w1 + w2 + w3 == doctest::Approx(4.0).epsilon(1e-14));
        // segment length along z_a equals the weight
        for (int p = 0; p < 4; ++p) {
            PlaneSegment s = plane_segment(p, u);
            CHECK(s.za_hi - s.za_lo == doctest::Approx(s.weight).epsilon(1e-13));
        }
    }
}

// P(z_a > 0 and z_b > 0 | z_ab) computed exactly from the four segments.
static double quadrant_prob(double u) {
    double total = 0.0;
    for (int p = 0; p < 4; ++p) {
        PlaneSegment seg = plane_segment(p, u);
        // z_b is linear in z_a on the plane; walk the interval finely enough
        // that the single sign change per line is resolved exactly by
        // bisection between the grid points.
        double lo = seg.za_lo, hi = seg.za_hi;
        // positive-z_a part
        double a0 = std::max(lo, 0.0);
        if (a0 >= hi) continue;
        // z_b(a) is linear: find where it crosses zero
        double b_lo = z_b_on_plane(p, a0, u);
        double b_hi = z_b_on_plane(p, hi, u);
        if (b_lo >= 0.0 && b_hi >= 0.0) {
            total += hi - a0;
        } else if (b_lo < 0.0 && b_hi < 0.0) {
            // nothing
        } else {
            // single root of the linear function
            double root = a0 + (hi - a0) * (0.0 - b_lo) / (b_hi - b_lo);
            if (b_lo >= 0.0)
                total += root - a0;
            else
                total += hi - root;
        }
    }
    return total / 4.0;
}

TEST_CASE("quadrant probability of the tetrahedral law is (1+z_ab)/4 exactly") {
    for (double u : {-0.9, -0.5, -0.1, 0.0, 0.1, 0.37, 0.5, 0.9}) {
        CHECK(quadrant_prob(u) == doctest::Approx((1.0 + u) / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("tetrahedral sampler: support, same-sign rate, per-side balance") {
    RandomStream rng(101);
    const int n = 200000;
    double u = 0.3;
    int same = 0, a_up = 0, b_up = 0;
    for (int k = 0; k < n; ++k) {
        auto [z_a, z_b] = sample_tetrahedral(u, rng);
        REQUIRE(std::abs(z_a) <= 1.0 + 1e-12);
        REQUIRE(std::abs(z_b) <= 1.0 + 1e-12);
        double best = 1e9;
        for (int p = 0; p < 4; ++p)
            best = std::min(best, std::abs(plane_form(p, {z_a, z_b, u})));
        REQUIRE(best <= 1e-12);
        if ((z_a > 0) == (z_b > 0)) ++same;
        if (z_a > 0) ++a_up;
        if (z_b > 0) ++b_up;
    }
    double sig = std::sqrt(0.25 / n);
    CHECK(std::abs(static_cast<double>(same) / n - (1.0 + u) / 2.0) <= 4 * sig);
    CHECK(std::abs(static_cast<double>(a_up) / n - 0.5) <= 4 * sig);
    CHECK(std::abs(static_cast<double>(b_up) / n - 0.5) <= 4 * sig);
}

TEST_CASE("tetrahedral sampler: single-side cosines are uniform (KS)") {
    RandomStream rng(202);
    const int n = 1000000;
    double u = 0.37;
    std::vector<double> za(n), zb(n);
    for (int k = 0; k < n; ++k) {
        auto [a, b] = sample_tetrahedral(u, rng);
        za[k] = a;
        zb[k] = b;
    }
    auto ks_uniform = [&](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            double F = (v[i] + 1.0) / 2.0;
            d = std::max(d, std::abs(F - static_cast<double>(i) / n));
            d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
        }
        return d;
    };
    double crit = 1.628 / std::sqrt(static_cast<double>(n)); // 1% level
    CHECK(ks_uniform(za) <= crit);
    CHECK(ks_uniform(zb) <= crit);
}
