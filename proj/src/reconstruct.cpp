#include "spinlab/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spinlab::reconstruct {

CrossGram gram_from_table(const experiment::CorrelationTable& table, Law law) {
    std::set<std::string> lset, rset;
    for (const auto& [key, st] : table.rows) {
        lset.insert(key.first);
        rset.insert(key.second);
    }
    CrossGram g;
    g.left_ids.assign(lset.begin(), lset.end());
    g.right_ids.assign(rset.begin(), rset.end());
    std::map<std::string, int> lidx, ridx;
    for (size_t i = 0; i < g.left_ids.size(); i++)
        lidx[g.left_ids[i]] = static_cast<int>(i);
    for (size_t j = 0; j < g.right_ids.size(); j++)
        ridx[g.right_ids[j]] = static_cast<int>(j);
    g.c = Eigen::MatrixXd::Zero(g.left_ids.size(), g.right_ids.size());
    g.w = Eigen::MatrixXd::Zero(g.left_ids.size(), g.right_ids.size());
    for (const auto& [key, st] : table.rows) {
        double p = st.p_hat();
        double entry = (law == Law::SinSq) ? 1.0 - 2.0 * p : std::cos(M_PI * p);
        entry = std::clamp(entry, -1.0, 1.0);
        int i = lidx[key.first], j = ridx[key.second];
        g.c(i, j) = entry;
        g.w(i, j) = static_cast<double>(st.n_total);
    }
    return g;
}

namespace {

// Minimize a^T M a - 2 v.a over the unit sphere (M symmetric PSD).
// Trust-region subproblem with the secular equation; exact, so the
// alternating sweep can never increase the stress.
Eigen::Vector3d sphere_quadratic_min(const Eigen::Matrix3d& M, const Eigen::Vector3d& v,
                                     const Eigen::Vector3d& fallback) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    Eigen::Vector3d d = es.eigenvalues(); // ascending
    Eigen::Matrix3d Q = es.eigenvectors();
    Eigen::Vector3d beta = Q.transpose() * v;

    double scale = std::max({std::fabs(d(0)), std::fabs(d(2)), v.norm(), 1e-300});
    if (v.norm() <= 1e-15 * scale) {
        if (M.norm() <= 1e-300)
            return fallback; // nothing constrains this vector
        return Q.col(0);     // pure quadratic: smallest-eigenvalue direction
    }

    auto norm2_at = [&](double lam) {
        double n2 = 0.0;
        for (int k = 0; k < 3; k++) {
            double den = d(k) + lam;
            n2 += (beta(k) / den) * (beta(k) / den);
        }
        return n2;
    };

    double lo = -d(0);
    // hard case: v has no component along the bottom eigenspace
    double gap = 1e-12 * std::max(1.0, std::fabs(d(0)));
    bool hard = std::fabs(beta(0)) <= 1e-14 * v.norm();
    if (hard) {
        Eigen::Vector3d y = Eigen::Vector3d::Zero();
        for (int k = 1; k < 3; k++)
            if (d(k) + lo > gap)
                y += (beta(k) / (d(k) + lo)) * Q.col(k);
        double n2 = y.squaredNorm();
        if (n2 <= 1.0)
            return y + std::sqrt(std::max(0.0, 1.0 - n2)) * Q.col(0);
        // otherwise the secular root lies to the right of -d(0); fall through
    }

    double a = lo + gap;
    while (norm2_at(a) < 1.0 && a > lo + 1e-300) {
        gap *= 0.25;
        a = lo + gap;
    }
    double b = lo + std::max(1.0, v.norm()) + std::fabs(d(2)) + 1.0;
    while (norm2_at(b) > 1.0)
        b = lo + 2.0 * (b - lo);
    for (int it = 0; it < 200; it++) {
        double mid = 0.5 * (a + b);
        if (mid == a || mid == b)
            break;
        if (norm2_at(mid) > 1.0)
            a = mid;
        else
            b = mid;
    }
    double lam = 0.5 * (a + b);
    Eigen::Vector3d x;
    for (int k = 0; k < 3; k++)
        x(k) = beta(k) / (d(k) + lam);
    Eigen::Vector3d out = Q * x;
    return out.normalized();
}

double weighted_stress(const CrossGram& g, const std::vector<Eigen::Vector3d>& A,
                       const std::vector<Eigen::Vector3d>& B) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.c.rows(); i++)
        for (int j = 0; j < g.c.cols(); j++) {
            double w = g.w(i, j);
            if (w <= 0.0)
                continue;
            double r = A[i].dot(B[j]) - g.c(i, j);
            num += w * r * r;
            den += w;
        }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double gradient_norm(const CrossGram& g, const std::vector<Eigen::Vector3d>& A,
                     const std::vector<Eigen::Vector3d>& B) {
    double total = 0.0;
    for (int i = 0; i < g.c.rows(); i++) {
        Eigen::Vector3d grad = Eigen::Vector3d::Zero();
        for (int j = 0; j < g.c.cols(); j++)
            if (g.w(i, j) > 0.0)
                grad += 2.0 * g.w(i, j) * (A[i].dot(B[j]) - g.c(i, j)) * B[j];
        grad -= grad.dot(A[i]) * A[i];
        total += grad.squaredNorm();
    }
    for (int j = 0; j < g.c.cols(); j++) {
        Eigen::Vector3d grad = Eigen::Vector3d::Zero();
        for (int i = 0; i < g.c.rows(); i++)
            if (g.w(i, j) > 0.0)
                grad += 2.0 * g.w(i, j) * (A[i].dot(B[j]) - g.c(i, j)) * A[i];
        grad -= grad.dot(B[j]) * B[j];
        total += grad.squaredNorm();
    }
    return std::sqrt(total);
}

Eigen::Vector3d random_unit(RandomStream& rng) {
    double z = rng.uniform(-1.0, 1.0);
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {rho * std::cos(phi), rho * std::sin(phi), z};
}

} // namespace

Embedding embed(const CrossGram& gram, int max_iters, double tol, const RandomStream& rng,
                int n_starts) {
    int nl = static_cast<int>(gram.c.rows());
    int nr = static_cast<int>(gram.c.cols());
    if (nl == 0 || nr == 0 || gram.w.maxCoeff() <= 0.0)
        throw std::invalid_argument("embed: gram has no present entries");

    Embedding best;
    best.stress = std::numeric_limits<double>::infinity();

    for (int start = 0; start < n_starts; start++) {
        std::vector<Eigen::Vector3d> A(nl), B(nr);
        if (start == 0) {
            // spectral initialization from the zero-filled gram
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram.c,
                                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
            int k = std::min<int>(3, static_cast<int>(svd.singularValues().size()));
            for (int i = 0; i < nl; i++) {
                Eigen::Vector3d v = Eigen::Vector3d::Zero();
                for (int m = 0; m < k; m++)
                    v(m) = svd.matrixU()(i, m) * std::sqrt(svd.singularValues()(m));
                A[i] = v.norm() > 1e-12 ? v.normalized() : Eigen::Vector3d(0, 0, 1);
            }
            for (int j = 0; j < nr; j++) {
                Eigen::Vector3d v = Eigen::Vector3d::Zero();
                for (int m = 0; m < k; m++)
                    v(m) = svd.matrixV()(j, m) * std::sqrt(svd.singularValues()(m));
                B[j] = v.norm() > 1e-12 ? v.normalized() : Eigen::Vector3d(0, 0, 1);
            }
        } else {
            RandomStream rs = rng.derive(start);
            for (int i = 0; i < nl; i++)
                A[i] = random_unit(rs);
            for (int j = 0; j < nr; j++)
                B[j] = random_unit(rs);
        }

        double stress = weighted_stress(gram, A, B);
        int iter = 0;
        bool converged = false;
        for (; iter < max_iters; iter++) {
            for (int i = 0; i < nl; i++) {
                Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
                Eigen::Vector3d v = Eigen::Vector3d::Zero();
                for (int j = 0; j < nr; j++) {
                    double w = gram.w(i, j);
                    if (w <= 0.0)
                        continue;
                    M += w * B[j] * B[j].transpose();
                    v += w * gram.c(i, j) * B[j];
                }
                A[i] = sphere_quadratic_min(M, v, A[i]);
            }
            for (int j = 0; j < nr; j++) {
                Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
                Eigen::Vector3d v = Eigen::Vector3d::Zero();
                for (int i = 0; i < nl; i++) {
                    double w = gram.w(i, j);
                    if (w <= 0.0)
                        continue;
                    M += w * A[i] * A[i].transpose();
                    v += w * gram.c(i, j) * A[i];
                }
                B[j] = sphere_quadratic_min(M, v, B[j]);
            }
            double next = weighted_stress(gram, A, B);
            if (stress - next <= tol * std::max(1.0, stress)) {
                stress = std::min(stress, next);
                converged = true;
                iter++;
                break;
            }
            stress = next;
        }

        if (stress < best.stress) {
            best.left_ids = gram.left_ids;
            best.right_ids = gram.right_ids;
            best.left = A;
            best.right = B;
            best.stress = stress;
            best.iterations = iter;
            best.converged = converged;
            best.grad_norm = gradient_norm(gram, A, B);
        }
    }
    return best;
}

Eigen::MatrixXd intra_post_angles(const std::vector<Eigen::Vector3d>& vecs) {
    int n = static_cast<int>(vecs.size());
    Eigen::MatrixXd angles(n, n);
    for (int i = 0; i < n; i++) {
        angles(i, i) = 0.0;
        for (int j = i + 1; j < n; j++) {
            double d = std::clamp(vecs[i].dot(vecs[j]), -1.0, 1.0);
            angles(i, j) = angles(j, i) = std::acos(d);
        }
    }
    return angles;
}

double align_to_truth(const Embedding& e, const experiment::PostConfig& left_truth,
                      const experiment::PostConfig& right_truth) {
    auto lookup = [](const experiment::PostConfig& post, const std::string& id) {
        for (const experiment::Mark& m : post.marks)
            if (m.id == id)
                return Eigen::Vector3d(m.dir[0], m.dir[1], m.dir[2]);
        throw std::invalid_argument("align_to_truth: mark not in truth config: " + id);
    };

    std::vector<Eigen::Vector3d> rec, tru;
    for (size_t i = 0; i < e.left_ids.size(); i++) {
        rec.push_back(e.left[i]);
        tru.push_back(lookup(left_truth, e.left_ids[i]));
    }
    for (size_t j = 0; j < e.right_ids.size(); j++) {
        rec.push_back(e.right[j]);
        tru.push_back(lookup(right_truth, e.right_ids[j]));
    }

    Eigen::Matrix3d Bmat = Eigen::Matrix3d::Zero();
    for (size_t k = 0; k < rec.size(); k++)
        Bmat += tru[k] * rec[k].transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(Bmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d Qrot = svd.matrixU() * svd.matrixV().transpose();

    double sum = 0.0;
    for (size_t k = 0; k < rec.size(); k++) {
        // chord-based angle: acos(dot) cannot resolve angles below ~1e-8
        double chord = (Qrot * rec[k] - tru[k]).norm();
        double ang = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
        sum += ang * ang;
    }
    return std::sqrt(sum / rec.size());
}

std::string embedding_json(const Embedding& e, const RunMeta& meta) {
    std::ostringstream out;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "{\n  \"meta\": {\"seed\": %llu, \"version\": \"%s\", "
                  "\"config_digest\": \"%016llx\"},\n",
                  static_cast<unsigned long long>(meta.seed), kVersion,
                  static_cast<unsigned long long>(meta.config_digest));
    out << buf;
    out << "  \"stress\": " << format_double(e.stress)
        << ",\n  \"iterations\": " << e.iterations
        << ",\n  \"grad_norm\": " << format_double(e.grad_norm)
        << ",\n  \"converged\": " << (e.converged ? "true" : "false") << ",\n";
    auto dump_post = [&](const char* name, const std::vector<std::string>& ids,
                         const std::vector<Eigen::Vector3d>& vecs, bool last) {
        out << "  \"" << name << "\": [\n";
        for (size_t k = 0; k < ids.size(); k++) {
            out << "    {\"id\": \"" << ids[k] << "\", \"dir\": [" << format_double(vecs[k](0))
                << ", " << format_double(vecs[k](1)) << ", " << format_double(vecs[k](2))
                << "]}" << (k + 1 < ids.size() ? "," : "") << "\n";
        }
        out << "  ]" << (last ? "\n" : ",\n");
    };
    dump_post("left", e.left_ids, e.left, false);
    dump_post("right", e.right_ids, e.right, true);
    out << "}\n";
    return out.str();
}

} // namespace spinlab::reconstruct
