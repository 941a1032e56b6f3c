#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace meas {

inline constexpr int kSchemaVersion = 1;

enum class Command { Verify, Primitives, Antipode, Nichols, Export };

struct RunConfig {
    Command command = Command::Verify;
    // Positional selector of primitives, antipode and nichols.
    std::string selector;
    std::string covering;
    std::string bialgebra;
    // antipode: "can" or a covering selector for the transfer leg.
    std::string via;
    // MonoidTable files select the dual of the monoid algebra.
    bool dual = false;
    int N = 6;
    int m = 4;
    int window = 4;
    bool json = false;
    std::string out;
};

// Exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommandResult {
    int exit_code = 0;
    std::string output;
};

// Throws UsageError for unknown selectors and unsupported inputs.
CommandResult run_command(const RunConfig& cfg);

// Parses args (without the program name), runs the command and writes the report to
// cfg.out or out. Returns 0 pass, 1 check failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meas
