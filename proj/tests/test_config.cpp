#include "beurling/config.hpp"
#include "beurling/density.hpp"
#include "beurling/runner.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beurling;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"(# sample
r = 0.6
zero = 0.75,5
zero = 0.7,11,2
M = 3
sampler = dmv-random
seed = 42
x_max = 1e6
X_cut = 1e5
grid_ratio = 1.2
output_dir = results

[sine]
epsilon = 0.3
strategy = anneal
budget = 5000

[interference]
v = 150
x_lo = 1e4
x_hi = 1e6

[oscillation]
Y = 50
m = 3
)";

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("beurling_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("config parsing", "[config]") {
    const ExperimentConfig c = parse_config(kSample);
    CHECK(c.r == 0.6);
    REQUIRE(c.zeros.entries().size() == 2);
    CHECK(c.zeros.entries()[1] == Zero{0.7, 11.0, 2});
    CHECK(c.M == 3);
    CHECK(c.sampler == SamplerMethod::dmv_random);
    CHECK(c.seed == 42);
    CHECK(c.x_max == 1e6);
    CHECK(c.X_cut == 1e5);
    CHECK(c.output_dir == "results");
    REQUIRE(c.sine);
    CHECK(c.sine->strategy == SearchStrategy::anneal);
    CHECK(c.sine->budget == 5000);
    CHECK(c.sine->seed == 1);
    REQUIRE(c.interference);
    CHECK(c.interference->v == 150.0);
    CHECK(c.interference->x_hi == 1e6);
    CHECK(c.interference->beta0 == 0.75);
    REQUIRE(c.oscillation);
    CHECK(c.oscillation->Y == 50.0);
    CHECK(c.oscillation->c == 2.0);

    const ExperimentConfig d = parse_config("");
    CHECK(d == ExperimentConfig{});
    CHECK_FALSE(d.M);
    CHECK_FALSE(d.sine);
}

TEST_CASE("config round trip and hash", "[config]") {
    const ExperimentConfig c = parse_config(kSample);
    const std::string s = serialize(c);
    CHECK(parse_config(s) == c);
    CHECK(serialize(parse_config(s)) == s);
    CHECK(config_hash(c) == config_hash(parse_config(s)));
    CHECK(config_hash(c).size() == 64);
    ExperimentConfig d = c;
    d.seed = 43;
    CHECK(config_hash(d) != config_hash(c));
    // comments and blank lines do not change the hash
    CHECK(config_hash(parse_config(std::string("\n# x\n") + kSample)) == config_hash(c));
    CHECK(config_hash(ExperimentConfig{}) == config_hash(parse_config(serialize(ExperimentConfig{}))));
}

TEST_CASE("config diagnostics name the field", "[config]") {
    CHECK(message_of("r = 0.4\n").find("r") != std::string::npos);
    CHECK(message_of("colour = red\n").find("colour") != std::string::npos);
    CHECK(message_of("seed = 1\nseed = 2\n").find("line 2") != std::string::npos);
    CHECK(message_of("seed = 1\nseed = 2\n").find("given twice") != std::string::npos);
    CHECK(message_of("x_max = banana\n").find("x_max") != std::string::npos);
    CHECK(message_of("x_max = 1e5\nX_cut = 1e6\n").find("X_cut") != std::string::npos);
    CHECK(message_of("grid_ratio = 1\n").find("grid_ratio") != std::string::npos);
    CHECK(message_of("zero = 0.75\n").find("zero") != std::string::npos);
    CHECK(message_of("M = -1\n").find("M") != std::string::npos);
    CHECK(message_of("[bogus]\n").find("bogus") != std::string::npos);
    CHECK(message_of("sampler = uniform\n").find("sampler") != std::string::npos);
    CHECK(message_of("[sine]\nstrategy = greedy\n").find("strategy") != std::string::npos);
    CHECK(message_of("just text\n").find("line 1") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/beurling.cfg"), ConfigError);
}

TEST_CASE("runner usage errors", "[config][runner]") {
    std::ostringstream log;
    ExperimentConfig c;
    c.zeros = ZeroSpec({{0.75, 5.0, 1}});
    c.M = 1;
    c.x_max = c.X_cut = 1e4;
    RunOptions o;
    o.out_dir = fresh_dir("nobuild").string();
    CHECK(run("tables", c, o, log) == kUsageError);
    CHECK(log.str().find("build") != std::string::npos);
    CHECK(run("frobnicate", c, o, log) == kUsageError);

    fs::create_directories(*o.out_dir);
    std::ofstream(fs::path(*o.out_dir) / ".lock") << "held";
    CHECK(run("build", c, o, log) == kUsageError);
    fs::remove_all(*o.out_dir);
}

TEST_CASE("runner build, tables and reproducibility", "[config][runner]") {
    ExperimentConfig c;
    c.zeros = ZeroSpec({{0.75, 5.0, 1}});
    c.M = 1;
    c.seed = 9;
    c.x_max = c.X_cut = 1e4;
    RunOptions o;
    o.out_dir = fresh_dir("build").string();
    std::ostringstream log;
    REQUIRE(run("build", c, o, log) == kPass);
    const fs::path dir = *o.out_dir;
    CHECK(fs::exists(dir / "primes.bprm"));
    CHECK(fs::exists(dir / "manifest-build.txt"));
    CHECK_FALSE(fs::exists(dir / ".lock"));
    const std::string manifest = slurp(dir / "manifest-build.txt");
    ExperimentConfig effective = c;
    effective.output_dir = dir.string();
    CHECK(manifest.find(config_hash(effective)) != std::string::npos);

    // quantile sampling lists floor(F(x_max) + 1/2) primes
    const TargetDensity d(c.r, c.zeros, c.M);
    const auto n = static_cast<std::uintmax_t>(std::floor(d.F(c.x_max) + 0.5));
    CHECK(fs::file_size(dir / "primes.bprm") == 65 + 8 * n);

    REQUIRE(run("tables", c, o, log) == kPass);
    const std::string first = slurp(dir / "tables.csv");
    CHECK(first.rfind("x,N,psi,theta,Pi,Delta\n", 0) == 0);
    REQUIRE(run("tables", c, o, log) == kPass);
    CHECK(slurp(dir / "tables.csv") == first);

    ExperimentConfig other = c;
    other.x_max = 2e4;
    other.X_cut = 2e4;
    CHECK(run("tables", other, o, log) == kUsageError);
    fs::remove_all(dir);
}

TEST_CASE("runner lemmas", "[config][runner]") {
    ExperimentConfig c;
    RunOptions o;
    o.out_dir = fresh_dir("lemmas").string();
    std::ostringstream log;
    CHECK(run("lemmas", c, o, log) == kPass);
    CHECK(fs::file_size(fs::path(*o.out_dir) / "lemmas.txt") > 0);
    fs::remove_all(*o.out_dir);
}
