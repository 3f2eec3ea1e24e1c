#include "lecam/path.hpp"

#include "lecam/error.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lecam {

void JumpPath::validate() const {
    require(T >= 0.0, "JumpPath: negative horizon");
    double prev = 0.0;
    for (const Jump& j : jumps) {
        require(j.time > prev, "JumpPath: jump times must be strictly increasing in (0, T]");
        require(j.time <= T, "JumpPath: jump after the horizon");
        prev = j.time;
    }
}

double JumpPath::value_at(double t) const {
    double x = drift_rate * t;
    for (const Jump& j : jumps) {
        if (j.time > t) break;
        x += j.size;
    }
    return x;
}

nlohmann::json JumpPath::header() const {
    return {{"T", T}, {"drift_rate", drift_rate}, {"jumps", jumps.size()}};
}

void JumpPath::write_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "# " << header().dump() << '\n' << "time,size\n";
    for (const Jump& j : jumps) os << j.time << ',' << j.size << '\n';
    os.precision(old);
}

JumpPath JumpPath::read_csv(std::istream& is) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)) && line.rfind("# ", 0) == 0,
            "JumpPath::read_csv: missing JSON header");
    const auto h = nlohmann::json::parse(line.substr(2));
    JumpPath p;
    p.T = h.at("T").get<double>();
    p.drift_rate = h.at("drift_rate").get<double>();
    std::getline(is, line);  // column names
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        Jump j{};
        char comma = 0;
        row >> j.time >> comma >> j.size;
        require(!row.fail() && comma == ',', "JumpPath::read_csv: malformed row '" + line + "'");
        p.jumps.push_back(j);
    }
    p.validate();
    return p;
}

}  // namespace lecam
