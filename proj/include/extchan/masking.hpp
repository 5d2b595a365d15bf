#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace extchan {

class GatewayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnbalancedParens : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class UnknownCommand : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class BadIndex : public GatewayError {
public:
    explicit BadIndex(size_t k)
        : GatewayError("no stored expression number " + std::to_string(k)) {}
};

class FileError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

// Ordered table of stored expressions; entry k (1-based) is addressed as dd(k).
class MaskingStore {
public:
    size_t size() const { return entries_.size(); }
    const std::string& entry(size_t k) const; // 1-based, throws BadIndex
    size_t add(std::string expr);             // returns the new 1-based index

    void save(const std::string& filename) const; // one entry per line, LF
    void load(const std::string& filename);       // replaces the store

    bool operator==(const MaskingStore&) const = default;

private:
    std::vector<std::string> entries_;
};

// Optional simplification step applied to extracted acc() arguments before
// they are stored (the external CAS behind the gateway).
using Simplifier = std::function<std::string(const std::string&)>;

// Replaces every acc(<expr>) in the line by dd(k). With filtering on and a
// simplifier given, <expr> is simplified before storage; otherwise stored
// verbatim. Arguments are extracted by parenthesis-depth counting.
std::string mask_line(MaskingStore& store, std::string_view line,
                      const Simplifier& simplifier = {}, bool filter_on = true);

// Replaces every dd(k) with "(" + entry k + ")"; unknown indices are left
// untouched.
std::string expand_line(const MaskingStore& store, std::string_view line);

// The live masking gateway: '@' command lines drive the store, everything
// else is masked (or expanded, in @e1 mode).
class GatewaySession {
public:
    explicit GatewaySession(Simplifier simplifier = {}) : simplifier_(std::move(simplifier)) {}

    std::vector<std::string> process_line(std::string_view line);
    // '@' command dispatch, exposed for direct testing.
    std::vector<std::string> command(std::string_view line);

    MaskingStore& store() { return store_; }
    const MaskingStore& store() const { return store_; }
    bool filtering() const { return filtering_; }
    bool expanding() const { return expanding_; }

private:
    MaskingStore store_;
    Simplifier simplifier_;
    bool filtering_ = true;
    bool expanding_ = false;
};

} // namespace extchan
