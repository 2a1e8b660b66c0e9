#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace priograph {

enum class ErrorCode {
    duplicate_id,
    empty_label,
    invalid_field,
    all_zero_distribution,
    unknown_node,
    unknown_pair,
    remote_unreachable,
    malformed_response,
    renorm_undefined,
    cyclic,
    incomplete,
    node_set_mismatch,
    unresolved_slot,
    claim_collision,
    parse_error,
    io_error,
    unsupported,
    verify_infra,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace priograph
