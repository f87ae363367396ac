#include "spinlab/correlation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spinlab::correlation {

double p_same(double angle_ab) {
    if (!(angle_ab >= 0.0 && angle_ab <= M_PI))
        throw std::domain_error("p_same: angle outside [0, pi]");
    double s = std::sin(0.5 * angle_ab);
    return s * s;
}

double joint_outcome_probability(const OutcomePair& pair, double z_ab) {
    if (!(z_ab >= -1.0 && z_ab <= 1.0))
        throw std::domain_error("joint_outcome_probability: z_ab outside [-1,1]");
    return pair.same() ? 0.25 * (1.0 + z_ab) : 0.25 * (1.0 - z_ab);
}

double classical_triple_density(double s, double t, double u) {
    if (!(s >= -1.0 && s <= 1.0 && t >= -1.0 && t <= 1.0 && u >= -1.0 && u <= 1.0))
        throw std::domain_error("classical_triple_density: argument outside [-1,1]");
    double disc = 1.0 + 2.0 * s * t * u - s * s - t * t - u * u;
    if (disc <= 0.0)
        return 0.0;
    if (disc < 1e-300)
        return std::numeric_limits<double>::infinity();
    return 1.0 / (8.0 * M_PI * std::sqrt(disc));
}

bool feasible_triple(double s, double t, double u) {
    return 1.0 + 2.0 * s * t * u - s * s - t * t - u * u >= 0.0;
}

double plane_form(int plane, const CosineTriple& p) {
    switch (plane) {
        case 0: return p.z_a + p.z_b + p.z_ab + 1.0;
        case 1: return p.z_a - p.z_b - p.z_ab + 1.0;
        case 2: return p.z_a + p.z_b - p.z_ab - 1.0;
        case 3: return p.z_a - p.z_b + p.z_ab - 1.0;
    }
    throw std::out_of_range("plane_form: plane index");
}

std::vector<int> tetrahedral_density(const CosineTriple& p, double tol) {
    std::vector<int> on;
    for (int k = 0; k < 4; k++)
        if (std::fabs(plane_form(k, p)) <= tol)
            on.push_back(k);
    return on;
}

PlaneSegment plane_segment(int plane, double z_ab) {
    double u = z_ab;
    // Intersection of each plane with the square [-1,1]^2 at fixed z_ab,
    // expressed as the admissible z_a interval. The extents come out as
    // 1-u, 1+u, 1-u, 1+u, matching the four terms' weights.
    switch (plane) {
        case 0: return {1.0 - u, -1.0, -u};
        case 1: return {1.0 + u, -1.0, u};
        case 2: return {1.0 - u, u, 1.0};
        case 3: return {1.0 + u, -u, 1.0};
    }
    throw std::out_of_range("plane_segment: plane index");
}

double z_b_on_plane(int plane, double z_a, double z_ab) {
    switch (plane) {
        case 0: return -1.0 - z_ab - z_a;
        case 1: return z_a - z_ab + 1.0;
        case 2: return 1.0 + z_ab - z_a;
        case 3: return z_a + z_ab - 1.0;
    }
    throw std::out_of_range("z_b_on_plane: plane index");
}

std::pair<double, double> sample_tetrahedral(double z_ab, RandomStream& rng) {
    if (!(z_ab >= -1.0 && z_ab <= 1.0))
        throw std::domain_error("sample_tetrahedral: z_ab outside [-1,1]");
    // Total weight is (1-u)+(1+u)+(1-u)+(1+u) = 4 for every z_ab.
    double x = 4.0 * rng.next_double();
    int plane = 0;
    double acc = 0.0;
    for (; plane < 3; plane++) {
        acc += plane_segment(plane, z_ab).weight;
        if (x < acc)
            break;
    }
    PlaneSegment seg = plane_segment(plane, z_ab);
    double z_a = rng.uniform(seg.za_lo, seg.za_hi);
    return {z_a, z_b_on_plane(plane, z_a, z_ab)};
}

} // namespace spinlab::correlation
