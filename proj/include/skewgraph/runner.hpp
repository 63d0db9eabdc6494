#ifndef SKEWGRAPH_RUNNER_HPP
#define SKEWGRAPH_RUNNER_HPP

#include <string>
#include <vector>

#include "skewgraph/config.hpp"

namespace skewgraph {

// process exit codes: 0 ok, 2 config parse error, 3 validation failure,
// 4 numerical failure
enum ExitStatus { kOk = 0, kParseError = 2, kValidationError = 3, kNumericalError = 4 };

struct RunResult {
    int status = kOk;
    std::vector<std::string> outputs;  // files written, relative to out dir
    std::string summary;               // nested key = value report
};

bool is_known_command(const std::string& command);

// executes one command against a parsed config, writing CSV outputs, a summary
// and a manifest into cfg.out (or out_override when nonempty)
RunResult run_command(const std::string& command, const RunConfig& cfg,
                      const std::string& out_override = "");

} // namespace skewgraph

#endif
