#ifndef PERIODLAB_CLI_HPP
#define PERIODLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <periodlab/core_numerics.hpp>

namespace periodlab::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

/// Parses "1.5", "-2i", "i", "0.3-1e-2i" or "[re, im]".
Complex parse_complex(const std::string &text);

/// Runs one command. `args` excludes the program name. The artifact goes to
/// `out` (or to --output), messages and errors to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace periodlab::cli

#endif
