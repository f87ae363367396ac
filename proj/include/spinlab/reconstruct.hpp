#ifndef SPINLAB_RECONSTRUCT_HPP
#define SPINLAB_RECONSTRUCT_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/experiment.hpp"
#include "spinlab/io_util.hpp"
#include "spinlab/rng.hpp"

// Recovers unit directions for every instrument mark from the pairwise
// same-spin statistics alone: invert the probability law to estimated dot
// products, then fit unit vectors on one sphere by weighted alternating
// minimization. Also quantifies how badly the linear angle law fails.

namespace spinlab::reconstruct {

enum class Law { SinSq, Linear };

struct CrossGram {
    std::vector<std::string> left_ids, right_ids;
    Eigen::MatrixXd c; // estimated a_i . b_j (after the anti-parallel flip)
    Eigen::MatrixXd w; // observation counts; 0 marks an absent pair
};

// SinSq: entry = 1 - 2 p_hat (exact inversion of sin^2(angle/2)).
// Linear: angle = pi * p_hat, entry = cos(angle).
CrossGram gram_from_table(const experiment::CorrelationTable& table, Law law);

struct Embedding {
    std::vector<std::string> left_ids, right_ids;
    std::vector<Eigen::Vector3d> left, right; // unit vectors
    double stress;       // weighted RMS of (a_i.b_j - c_ij)
    int iterations;
    double grad_norm;    // Riemannian gradient norm at the final point
    bool converged;
};

// Weighted rank-3 unit-vector fit: spectral start plus seeded random
// multi-starts, alternating exact per-vector updates (never increases the
// stress), lowest final stress wins with lowest start index as tie-break.
Embedding embed(const CrossGram& gram, int max_iters, double tol, const RandomStream& rng,
                int n_starts = 4);

// Symmetric angle matrix arccos(v_i . v_j) within one post.
Eigen::MatrixXd intra_post_angles(const std::vector<Eigen::Vector3d>& vecs);

// Best orthogonal transform (rotation or rotoreflection) mapping the
// recovered vectors onto the ground truth; returns the post-alignment RMS
// angular error in radians.
double align_to_truth(const Embedding& e, const experiment::PostConfig& left_truth,
                      const experiment::PostConfig& right_truth);

std::string embedding_json(const Embedding& e, const RunMeta& meta);

} // namespace spinlab::reconstruct

#endif
