#ifndef SPINLAB_CORRELATION_HPP
#define SPINLAB_CORRELATION_HPP

#include <utility>
#include <vector>

#include "spinlab/rng.hpp"

// Closed-form probability laws of the singlet-pair experiment: the quantum
// prediction, the classical joint density of three direction cosines, and the
// tetrahedral delta distribution with exact sampling.
//
// Sign convention used throughout: Z_AB = -a.b (the pair's spins are
// anti-parallel, the extra minus folds that in once). The classical triple
// density below works in raw dot products (s,t,u) = (a.c, b.c, a.b); flipping
// the sign of the components tied to the second particle bridges the two.

namespace spinlab::correlation {

struct CosineTriple {
    double z_a;
    double z_b;
    double z_ab;
};

enum class Spin { Up, Down };

struct OutcomePair {
    Spin left;
    Spin right;
    bool same() const { return left == right; }
};

// P(both detectors report the same component) as a function of the angle
// between the instrument orientations: sin^2(angle/2). Throws
// std::domain_error outside [0, pi].
double p_same(double angle_ab);

// P(up-up) = P(down-down) = (1+z_ab)/4, P(up-down) = P(down-up) = (1-z_ab)/4.
double joint_outcome_probability(const OutcomePair& pair, double z_ab);

// Joint density of the three pairwise dot products of three independent
// uniformly random unit vectors: 1/(8*pi*sqrt(1+2stu-s^2-t^2-u^2)) inside the
// feasible region, 0 outside, +inf when the discriminant is positive but
// denormal-small (the density genuinely diverges at the border).
double classical_triple_density(double s, double t, double u);

// true iff 1+2stu-s^2-t^2-u^2 >= 0 (the triangle inequality on the angles).
bool feasible_triple(double s, double t, double u);

// The four delta planes, in the order they appear in the density:
//   0: z_a + z_b + z_ab = -1
//   1: z_a - z_b - z_ab = -1
//   2: z_a + z_b - z_ab =  1
//   3: z_a - z_b + z_ab =  1
// plane_form returns lhs - rhs (zero on the plane).
double plane_form(int plane, const CosineTriple& p);

// Indices of the planes the triple lies on, within tol. Empty when the
// density is zero at the point.
std::vector<int> tetrahedral_density(const CosineTriple& p, double tol = 1e-12);

// Restriction of plane `plane` to the square [-1,1]^2 at fixed z_ab: a
// segment, parameterized by z_a. weight is the z_a-extent (the segment's
// 1-D measure up to the common sqrt factor, which cancels in the weights).
struct PlaneSegment {
    double weight;
    double za_lo;
    double za_hi;
};
PlaneSegment plane_segment(int plane, double z_ab);

// z_b solving the plane constraint at (z_a, z_ab).
double z_b_on_plane(int plane, double z_a, double z_ab);

// Exact draw from the conditional of the tetrahedral density given z_ab:
// pick a plane segment by weight, then uniformly along it.
std::pair<double, double> sample_tetrahedral(double z_ab, RandomStream& rng);

} // namespace spinlab::correlation

#endif
