#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

namespace lecam {

struct Jump {
    double time;
    double size;
};

/// A finite-activity path on [0, T]: sorted jumps plus a deterministic drift rate.
struct JumpPath {
    double T = 0.0;
    std::vector<Jump> jumps;
    double drift_rate = 0.0;

    /// Throws unless times are strictly increasing inside (0, T].
    void validate() const;
    [[nodiscard]] double value_at(double t) const;

    [[nodiscard]] nlohmann::json header() const;
    /// First line "# {json header}", then "time,size" rows.
    void write_csv(std::ostream& os) const;
    static JumpPath read_csv(std::istream& is);
};

}  // namespace lecam
