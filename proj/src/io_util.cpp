#include "spinlab/io_util.hpp"

#include <cstdio>

namespace spinlab {

std::vector<std::string> RunMeta::header_lines() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "seed=%llu version=%s config_digest=%016llx",
                  static_cast<unsigned long long>(seed), kVersion,
                  static_cast<unsigned long long>(config_digest));
    return {buf};
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; prec++) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        double back;
        std::sscanf(probe, "%lf", &back);
        if (back == v)
            return probe;
    }
    return buf;
}

} // namespace spinlab
