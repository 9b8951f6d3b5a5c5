#pragma once

#include <map>
#include <string>

#include "bec/config.hpp"

namespace bec {

// Exit codes of bec-kinetics.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

const char* code_version();

// Runs one subcommand and returns file name -> contents (CSV files and manifest.toml).
// Nothing is written; the same config always gives byte-identical contents.
std::map<std::string, std::string> run_subcommand(const RunConfig& cfg);

// Full command line: bec-kinetics <subcommand> --config FILE [--out DIR].
int cli_main(int argc, char** argv);

}  // namespace bec
