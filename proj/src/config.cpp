#include "beurling/config.hpp"

#include "beurling/hash.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace beurling {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& field, const std::string& msg) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    throw ConfigError(where + field + ": " + msg);
}

double to_real(const std::string& v, int line, const std::string& field) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
        fail(line, field, "expected a finite real, got '" + v + "'");
    return x;
}

std::int64_t to_int(const std::string& v, int line, const std::string& field) {
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) fail(line, field, "expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& v, int line, const std::string& field) {
    errno = 0;
    char* end = nullptr;
    if (!v.empty() && v[0] == '-') fail(line, field, "expected a nonnegative integer, got '" + v + "'");
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) fail(line, field, "expected an integer, got '" + v + "'");
    return x;
}

Zero to_zero(const std::string& v, int line) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(trim(p));
    if (parts.size() != 2 && parts.size() != 3) fail(line, "zero", "expected beta,gamma[,mult]");
    Zero z;
    z.beta = to_real(parts[0], line, "zero.beta");
    z.gamma = to_real(parts[1], line, "zero.gamma");
    if (parts.size() == 3) {
        const std::int64_t m = to_int(parts[2], line, "zero.mult");
        if (m < 1 || m > 1000000) fail(line, "zero.mult", "must be in [1, 1e6]");
        z.mult = static_cast<int>(m);
    }
    if (z.gamma < 0.0) fail(line, "zero.gamma", "list gamma >= 0; the conjugate is implied");
    return z;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!(r >= 0.5 && r < 1.0)) fail(0, "r", "must lie in [1/2, 1)");
    for (const Zero& z : zeros.entries()) {
        if (!(z.beta > 0.5 && z.beta < 1.0)) fail(0, "zero.beta", "must lie in (1/2, 1)");
        if (!(z.beta > r)) fail(0, "zero.beta", "must exceed r = " + format_double(r));
    }
    if (M && *M < 0) fail(0, "M", "must be nonnegative");
    if (!(x_max > 1.0)) fail(0, "x_max", "must exceed 1");
    if (!(X_cut > 1.0 && X_cut <= x_max)) fail(0, "X_cut", "must lie in (1, x_max]");
    if (!(grid_ratio > 1.0)) fail(0, "grid_ratio", "must exceed 1");
    if (output_dir.empty()) fail(0, "output_dir", "must not be empty");
    if (sine) {
        if (!(sine->epsilon > 0.0 && sine->epsilon < 0.5)) fail(0, "sine.epsilon", "must lie in (0, 1/2)");
        if (sine->budget < 1) fail(0, "sine.budget", "must be positive");
    }
    if (interference) {
        const InterferenceConfig& c = *interference;
        if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) fail(0, "interference.epsilon", "must lie in (0, 1/2)");
        if (!(c.beta0 > 0.5 && c.beta0 < 1.0 && c.beta0 > r))
            fail(0, "interference.beta0", "must lie in (max(1/2, r), 1)");
        if (c.v && !(*c.v > 0.0)) fail(0, "interference.v", "must be positive");
        if (!(c.x_lo >= 1.0 && c.x_hi > c.x_lo)) fail(0, "interference.x_lo", "need 1 <= x_lo < x_hi");
        if (c.x_hi > x_max) fail(0, "interference.x_hi", "must not exceed x_max");
    }
    if (oscillation) {
        const OscillationConfig& c = *oscillation;
        if (!(c.epsilon > 0.0)) fail(0, "oscillation.epsilon", "must be positive");
        if (!(c.Y > 1.0)) fail(0, "oscillation.Y", "must exceed 1");
        if (!(c.c > 1.0)) fail(0, "oscillation.c", "must exceed 1");
        if (!(c.m >= 1.0)) fail(0, "oscillation.m", "must be at least 1");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<Zero> zeros;
    std::string section;
    std::set<std::string> seen;
    std::istringstream in(text);
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, line, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section == "sine") cfg.sine.emplace();
            else if (section == "interference") cfg.interference.emplace();
            else if (section == "oscillation") cfg.oscillation.emplace();
            else fail(line_no, section, "unknown section");
            if (!seen.insert("[" + section + "]").second) fail(line_no, section, "section repeated");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, line, "expected key = value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        const std::string field = section.empty() ? key : section + "." + key;
        if (key != "zero" && !seen.insert(field).second) fail(line_no, field, "given twice");
        try {
            if (section.empty()) {
                if (key == "r") cfg.r = to_real(val, line_no, field);
                else if (key == "zero") zeros.push_back(to_zero(val, line_no));
                else if (key == "M") cfg.M = to_int(val, line_no, field);
                else if (key == "sampler") cfg.sampler = parse_sampler_method(val);
                else if (key == "seed") cfg.seed = to_u64(val, line_no, field);
                else if (key == "x_max") cfg.x_max = to_real(val, line_no, field);
                else if (key == "X_cut") cfg.X_cut = to_real(val, line_no, field);
                else if (key == "grid_ratio") cfg.grid_ratio = to_real(val, line_no, field);
                else if (key == "output_dir") cfg.output_dir = val;
                else fail(line_no, field, "unknown key");
            } else if (section == "sine") {
                SineConfig& s = *cfg.sine;
                if (key == "epsilon") s.epsilon = to_real(val, line_no, field);
                else if (key == "strategy") s.strategy = parse_strategy(val);
                else if (key == "seed") s.seed = to_u64(val, line_no, field);
                else if (key == "budget") s.budget = to_int(val, line_no, field);
                else fail(line_no, field, "unknown key");
            } else if (section == "interference") {
                InterferenceConfig& s = *cfg.interference;
                if (key == "v") s.v = to_real(val, line_no, field);
                else if (key == "epsilon") s.epsilon = to_real(val, line_no, field);
                else if (key == "beta0") s.beta0 = to_real(val, line_no, field);
                else if (key == "x_lo") s.x_lo = to_real(val, line_no, field);
                else if (key == "x_hi") s.x_hi = to_real(val, line_no, field);
                else fail(line_no, field, "unknown key");
            } else {
                OscillationConfig& s = *cfg.oscillation;
                if (key == "epsilon") s.epsilon = to_real(val, line_no, field);
                else if (key == "Y") s.Y = to_real(val, line_no, field);
                else if (key == "c") s.c = to_real(val, line_no, field);
                else if (key == "m") s.m = to_real(val, line_no, field);
                else fail(line_no, field, "unknown key");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            fail(line_no, field, e.what());
        }
    }
    cfg.zeros = ZeroSpec(std::move(zeros));
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "r = " << format_double(cfg.r) << "\n";
    for (const Zero& z : cfg.zeros.entries())
        os << "zero = " << format_double(z.beta) << "," << format_double(z.gamma) << "," << z.mult << "\n";
    if (cfg.M) os << "M = " << *cfg.M << "\n";
    os << "sampler = " << to_string(cfg.sampler) << "\n"
       << "seed = " << cfg.seed << "\n"
       << "x_max = " << format_double(cfg.x_max) << "\n"
       << "X_cut = " << format_double(cfg.X_cut) << "\n"
       << "grid_ratio = " << format_double(cfg.grid_ratio) << "\n"
       << "output_dir = " << cfg.output_dir << "\n";
    if (cfg.sine) {
        const SineConfig& s = *cfg.sine;
        os << "\n[sine]\nepsilon = " << format_double(s.epsilon) << "\nstrategy = " << to_string(s.strategy)
           << "\nseed = " << s.seed << "\nbudget = " << s.budget << "\n";
    }
    if (cfg.interference) {
        const InterferenceConfig& s = *cfg.interference;
        os << "\n[interference]\n";
        if (s.v) os << "v = " << format_double(*s.v) << "\n";
        os << "epsilon = " << format_double(s.epsilon) << "\nbeta0 = " << format_double(s.beta0)
           << "\nx_lo = " << format_double(s.x_lo) << "\nx_hi = " << format_double(s.x_hi) << "\n";
    }
    if (cfg.oscillation) {
        const OscillationConfig& s = *cfg.oscillation;
        os << "\n[oscillation]\nepsilon = " << format_double(s.epsilon) << "\nY = " << format_double(s.Y)
           << "\nc = " << format_double(s.c) << "\nm = " << format_double(s.m) << "\n";
    }
    return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) { return to_hex(sha256(serialize(cfg))); }

}  // namespace beurling
