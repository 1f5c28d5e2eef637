#pragma once

#include <stdexcept>
#include <string>

namespace obw {

// Exit codes of the command line tool; library code throws the matching type.
enum ExitCode { kOk = 0, kParse = 2, kValidation = 3, kResource = 4, kConsistency = 5 };

class Error : public std::runtime_error {
public:
    Error(int code, std::string stage, const std::string& msg)
        : std::runtime_error(msg), code_(code), stage_(std::move(stage)) {}
    int code() const { return code_; }
    const std::string& stage() const { return stage_; }
    void set_stage(std::string s) { stage_ = std::move(s); }

private:
    int code_;
    std::string stage_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg, std::string stage = "parse")
        : Error(kParse, std::move(stage), msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg, std::string stage = "validate")
        : Error(kValidation, std::move(stage), msg) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& msg, std::string stage = "")
        : Error(kResource, std::move(stage), msg) {}
};

struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& msg, std::string stage = "")
        : Error(kConsistency, std::move(stage), msg) {}
};

} // namespace obw
