#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qosrank {

// All library failures carry a stable short code ("parse", "schema", ...)
// that the CLI turns into its prefix-tagged error lines.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* parse = "E_PARSE";
inline constexpr const char* schema = "E_SCHEMA";
inline constexpr const char* args = "E_ARGS";
inline constexpr const char* learner = "E_LEARNER";
inline constexpr const char* eval = "E_EVAL";
inline constexpr const char* cube = "E_CUBE";
inline constexpr const char* io = "E_IO";
}  // namespace errc

}  // namespace qosrank
