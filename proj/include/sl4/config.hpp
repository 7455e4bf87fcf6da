#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sl4/problem.hpp"
#include "sl4/truncation.hpp"

namespace sl4 {

/// Value of the structured-text problem format (a strict TOML subset).
struct TomlValue {
    enum class Type { String, Number, Bool, Array };
    Type type = Type::Number;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<TomlValue> array;
    int line = 0;
};

struct TomlTable {
    std::map<std::string, TomlValue> values;
    std::map<std::string, TomlTable> tables;
    int line = 0;
};

/// Parses key = value lines, [table] and [a.b] headers, strings, numbers
/// (including inf and nan), booleans, nested and multi-line arrays, and # comments.
/// Throws Error(Config) with "source:line: message" on malformed input or duplicates.
TomlTable parse_toml(const std::string& text, const std::string& source = "<input>");

/// Problem from the problem-file schema; unknown keys are rejected with their line.
ProblemSpec problem_from_toml(const TomlTable& root, const std::string& source = "<input>");
ProblemSpec parse_problem_text(const std::string& text, const std::string& source = "<input>");
ProblemSpec load_problem_file(const std::string& path);

/// Inclusive index range parsed from "k" or "lo..hi".
struct KRange {
    int lo = 0;
    int hi = 0;
};
KRange parse_k_range(const std::string& text);

/// Schedule spec: [left:|right:]geometric:first=F,factor=R,count=N
/// | [left:|right:]linear:start=S,stop=E,step=H | [left:|right:]list:x1,x2,...
/// Without a side prefix the problem's single truncated side is used.
TruncationSchedule parse_schedule(const std::string& spec, const ProblemSpec& problem);

/// Schedule used when none is given: geometric distances 0.1 L * 10^(-j/2), j < 10,
/// toward a finite end of an interval of length L, and b_j = a + 3, ..., a + 10
/// toward infinity (mirrored on the left).
TruncationSchedule default_schedule(const ProblemSpec& problem, Side side);

/// Command-line run settings.
struct RunConfig {
    std::string subcommand;
    std::string problem_path;
    std::string builtin;
    std::string k_range = "0..2";
    std::optional<double> lambda_star;
    std::vector<std::string> schedules;
    double tol = 1e-6;
    std::string out_dir = ".";
    unsigned long long seed = 1;
};

/// Problem named by the config (file or builtin, exactly one).
ProblemSpec resolve_problem(const RunConfig& cfg);

}  // namespace sl4
