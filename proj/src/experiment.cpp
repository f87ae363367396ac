#include "spinlab/experiment.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spinlab/correlation.hpp"

namespace spinlab::experiment {

void PostConfig::validate() const {
    if (marks.empty())
        throw std::invalid_argument("post has no marks");
    std::set<std::string> seen;
    for (const Mark& m : marks) {
        if (m.id.empty() || m.id.find(',') != std::string::npos)
            throw std::invalid_argument("bad mark id: '" + m.id + "'");
        if (!seen.insert(m.id).second)
            throw std::invalid_argument("duplicate mark id: " + m.id);
        double norm = std::sqrt(dot(m.dir, m.dir));
        if (std::fabs(norm - 1.0) > 1e-12)
            throw std::invalid_argument("mark " + m.id + " direction is not unit length");
    }
}

Vec3 random_unit_vector(RandomStream& rng) {
    double z = rng.uniform(-1.0, 1.0);
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {rho * std::cos(phi), rho * std::sin(phi), z};
}

namespace {

inline bool up(double v) { return v >= 0.0; } // sign(0) resolves to Up

} // namespace

std::vector<OutcomeRecord> run_experiment(const PostConfig& left, const PostConfig& right,
                                          std::uint64_t n_trials, Model model,
                                          const RandomStream& rng, const ScheduleHook& hook) {
    left.validate();
    right.validate();
    if (n_trials < 1)
        throw std::invalid_argument("run_experiment: need at least one trial");
    int nl = static_cast<int>(left.marks.size());
    int nr = static_cast<int>(right.marks.size());

    std::vector<OutcomeRecord> log;
    log.reserve(n_trials);
    for (std::uint64_t trial = 0; trial < n_trials; trial++) {
        RandomStream stream = rng.derive(trial);
        int li, ri;
        if (hook) {
            std::tie(li, ri) = hook(trial, nl, nr);
        } else {
            li = stream.next_index(nl);
            ri = stream.next_index(nr);
        }
        const Vec3& a = left.marks[li].dir;
        const Vec3& b = right.marks[ri].dir;
        bool same;
        switch (model) {
            case Model::QM: {
                // P(S) = sin^2(angle/2) = (1 - a.b)/2
                same = stream.next_double() < 0.5 * (1.0 - dot(a, b));
                break;
            }
            case Model::ClassicalSign: {
                // shared hidden axis n; the right particle carries -n
                Vec3 axis = random_unit_vector(stream);
                same = up(dot(a, axis)) == up(-dot(b, axis));
                break;
            }
            case Model::Tetrahedral: {
                double z_ab = -dot(a, b);
                auto [z_a, z_b] = correlation::sample_tetrahedral(z_ab, stream);
                same = up(z_a) == up(z_b);
                break;
            }
            default:
                throw std::logic_error("unknown model");
        }
        log.push_back({left.marks[li].id, right.marks[ri].id, same ? 'S' : 'N'});
    }
    return log;
}

CorrelationTable aggregate(const std::vector<OutcomeRecord>& log) {
    if (log.empty())
        throw std::invalid_argument("aggregate: empty logbook");
    CorrelationTable table;
    for (const OutcomeRecord& rec : log) {
        PairStats& st = table.rows[{rec.left_mark, rec.right_mark}];
        st.n_total++;
        if (rec.result == 'S')
            st.n_same++;
    }
    return table;
}

void write_logbook_csv(std::ostream& out, const std::vector<OutcomeRecord>& log,
                       const RunMeta& meta) {
    for (const std::string& line : meta.header_lines())
        out << "# " << line << "\n";
    out << "left_mark,right_mark,result\n";
    for (const OutcomeRecord& rec : log)
        out << rec.left_mark << ',' << rec.right_mark << ',' << rec.result << "\n";
}

std::vector<OutcomeRecord> read_logbook_csv(std::istream& in) {
    std::vector<OutcomeRecord> log;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!saw_header) {
            if (line != "left_mark,right_mark,result")
                throw std::runtime_error("logbook: unexpected header: " + line);
            saw_header = true;
            continue;
        }
        size_t c1 = line.find(',');
        size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos || c2 + 2 != line.size())
            throw std::runtime_error("logbook: bad row: " + line);
        char res = line[c2 + 1];
        if (res != 'S' && res != 'N')
            throw std::runtime_error("logbook: result must be S or N: " + line);
        log.push_back({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1), res});
    }
    if (!saw_header)
        throw std::runtime_error("logbook: missing header");
    return log;
}

namespace {

PostConfig post_from_json(const nlohmann::json& arr, PostLabel label) {
    PostConfig post;
    post.label = label;
    for (const auto& item : arr) {
        Mark m;
        m.id = item.at("id").get<std::string>();
        auto d = item.at("dir");
        if (d.size() != 3)
            throw std::invalid_argument("mark " + m.id + ": dir must have 3 components");
        m.dir = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>()};
        post.marks.push_back(m);
    }
    post.validate();
    return post;
}

} // namespace

std::pair<PostConfig, PostConfig> posts_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    return {post_from_json(j.at("left"), PostLabel::Left),
            post_from_json(j.at("right"), PostLabel::Right)};
}

std::string posts_to_json_text(const PostConfig& left, const PostConfig& right) {
    nlohmann::json j;
    for (const PostConfig* post : {&left, &right}) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Mark& m : post->marks)
            arr.push_back({{"id", m.id}, {"dir", {m.dir[0], m.dir[1], m.dir[2]}}});
        j[post->label == PostLabel::Left ? "left" : "right"] = std::move(arr);
    }
    return j.dump(2);
}

std::string table_json(const CorrelationTable& table, const RunMeta& meta) {
    std::ostringstream out;
    char buf[160];
    out << "{\n  \"meta\": {";
    std::snprintf(buf, sizeof buf, "\"seed\": %llu, \"version\": \"%s\", \"config_digest\": \"%016llx\"",
                  static_cast<unsigned long long>(meta.seed), kVersion,
                  static_cast<unsigned long long>(meta.config_digest));
    out << buf << "},\n  \"pairs\": [\n";
    bool first = true;
    for (const auto& [key, st] : table.rows) {
        if (!first)
            out << ",\n";
        first = false;
        std::snprintf(buf, sizeof buf,
                      "    {\"left\": \"%s\", \"right\": \"%s\", \"n_same\": %llu, "
                      "\"n_total\": %llu, \"p_hat\": %s, \"std_err\": %s}",
                      key.first.c_str(), key.second.c_str(),
                      static_cast<unsigned long long>(st.n_same),
                      static_cast<unsigned long long>(st.n_total),
                      format_double(st.p_hat()).c_str(), format_double(st.std_err()).c_str());
        out << buf;
    }
    out << "\n  ]\n}\n";
    return out.str();
}

} // namespace spinlab::experiment
