#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace eclipse {

// User-facing failure (bad file, bad config, malformed input).
class RuntimeError : public std::runtime_error {
 public:
    explicit RuntimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Contract violation inside the library (precondition broken by the caller).
class ContractError : public std::logic_error {
 public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

namespace detail {
[[noreturn]] inline void throwContract(const char* cond, const char* file, int line,
                                       const std::string& msg) {
    std::ostringstream os;
    os << file << ":" << line << ": requirement failed: " << cond;
    if (!msg.empty()) os << " (" << msg << ")";
    throw ContractError(os.str());
}
}  // namespace detail

}  // namespace eclipse

#define ECLIPSE_REQUIRE(cond, msg)                                             \
    do {                                                                       \
        if (!(cond)) ::eclipse::detail::throwContract(#cond, __FILE__, __LINE__, (msg)); \
    } while (0)
