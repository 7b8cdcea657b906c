#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace friable::cli {

enum class Format { Json, Csv, Plain };

struct RunConfig {
    std::string subcommand;
    Format format = Format::Json;
    std::uint64_t seed = 1;
    int threads = 1;
    bool timings = false;

    double x = 0;
    double y = 0;
    double u = 0;
    double theta = 0;
    double delta = 0;
    double alpha = 1;
    double tol = 1e-10;
    double tail_tol = 1e-10;
    double Delta = 1e4;
    std::int64_t a = 1;
    std::int64_t q = 1;
    std::int64_t p = 2;
    std::int64_t Q = 1;
    std::int64_t prime_cutoff = 100;
    std::int64_t grid = 4096;
    std::uint64_t N = 1;
    int k = 1;
    int s = 1;
    std::vector<double> Qs;
    std::vector<double> xs;
    std::vector<int> s_list;
    std::string strategy = "auto";
    std::string suite = "all";
    bool infty = false;
    bool no_exact = false;
    bool y_equals_x = false;

    // Long option names given on the command line, without dashes.
    std::set<std::string> given;
    bool has(const std::string& name) const { return given.count(name) > 0; }
};

struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = 0;    // meaningful when config is empty
    std::string output;   // help text
    std::string error;    // one-line reason for exit code 2
};

// args excludes the program name.
ParseOutcome parse_and_validate(const std::vector<std::string>& args);

// 0 on success, 1 on numeric, resource or domain errors from the library.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_and_validate followed by dispatch.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SuiteRow {
    std::string suite;
    std::string check;
    std::int64_t cases = 0;
    bool pass = false;
    std::string detail;
};

// Exact-identity self tests: "appendix", "moments", "erdos-turan" or "all".
std::vector<SuiteRow> run_verify(const std::string& suite, std::uint64_t seed);

}  // namespace friable::cli
