#ifndef SPINLAB_EXPERIMENT_HPP
#define SPINLAB_EXPERIMENT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spinlab/io_util.hpp"
#include "spinlab/rng.hpp"

// Monte Carlo two-post spin experiment: each trial picks one instrument mark
// per post, fires an anti-parallel particle pair, and logs only
// (left mark, right mark, same-or-not). Three outcome models are available.

namespace spinlab::experiment {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

struct Mark {
    std::string id;
    Vec3 dir; // unit
};

enum class PostLabel { Left, Right };

struct PostConfig {
    PostLabel label;
    std::vector<Mark> marks;
    void validate() const; // unit norms, unique ids, non-empty
};

enum class Model { QM, ClassicalSign, Tetrahedral };

struct OutcomeRecord {
    std::string left_mark;
    std::string right_mark;
    char result; // 'S' or 'N'
};

// Optional adversarial mark picker (trial index -> mark indices); used to
// test correlated instrument schedules. Default (empty) picks independently
// and uniformly.
using ScheduleHook = std::function<std::pair<int, int>(std::uint64_t, int, int)>;

// Trial i draws from rng.derive(i), so the logbook is canonical in trial
// order no matter how trials are sharded.
std::vector<OutcomeRecord> run_experiment(const PostConfig& left, const PostConfig& right,
                                          std::uint64_t n_trials, Model model,
                                          const RandomStream& rng,
                                          const ScheduleHook& hook = {});

struct PairStats {
    std::uint64_t n_same = 0;
    std::uint64_t n_total = 0;
    double p_hat() const { return static_cast<double>(n_same) / static_cast<double>(n_total); }
    double std_err() const {
        double p = p_hat();
        return std::sqrt(p * (1.0 - p) / static_cast<double>(n_total));
    }
};

struct CorrelationTable {
    std::map<std::pair<std::string, std::string>, PairStats> rows;
};

CorrelationTable aggregate(const std::vector<OutcomeRecord>& log);

// uniform random unit vector (2 draws, no rejection)
Vec3 random_unit_vector(RandomStream& rng);

// ---- file formats ----
// Logbook CSV: '#' metadata comments, then header left_mark,right_mark,result
void write_logbook_csv(std::ostream& out, const std::vector<OutcomeRecord>& log,
                       const RunMeta& meta);
std::vector<OutcomeRecord> read_logbook_csv(std::istream& in);

// Post config JSON: {"left": [{"id": "...", "dir": [x,y,z]}, ...], "right": [...]}
std::pair<PostConfig, PostConfig> posts_from_json_text(const std::string& text);
std::string posts_to_json_text(const PostConfig& left, const PostConfig& right);

std::string table_json(const CorrelationTable& table, const RunMeta& meta);

} // namespace spinlab::experiment

#endif
