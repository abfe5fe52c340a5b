#pragma once

#include <stdexcept>
#include <string>

namespace dhj {

// Thrown when an operation's preconditions are violated (bad input, domain
// errors, malformed configuration).
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Configuration-level failure; the CLI maps it to exit code 2.
class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace dhj
