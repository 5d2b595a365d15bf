#pragma once

#include "extchan/registry.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace extchan {

class SyntaxError : public ChannelError {
public:
    SyntaxError(int line_no, const std::string& msg)
        : ChannelError("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    int line;
};

// Runtime script failure that is not a channel error (undefined variable,
// malformed number, file trouble).
class ScriptError : public ChannelError {
public:
    using ChannelError::ChannelError;
};

struct Instruction {
    enum class Kind {
        External,        // a = variable (if has_var), b = system command
        ToExternal,      // a = format text
        FromExternal,    // a = variable (if has_var); echo_flag; maxlength
        Prompt,          // a = prompt text (may be empty)
        SetExternal,     // a = descriptor expression
        RmExternal,      // a = descriptor expression or empty
        SetExternalAttr, // a = attribute spec
        System,          // a = system command
        Pipe,            // a = system command
        Define,          // a = name, b = value
        Do,              // a = loop variable, b = from, c = to
        EndDo,
        Write,           // a = file name, b = format text
        Remove,          // a = file name
        Echo,            // a = format text
        Data             // a = raw line
    };

    Kind kind{};
    int line = 0;
    std::string a, b, c;
    bool has_var = false;
    int echo_flag = 0; // -1 suppress, +1 echo, 0 follow the global setting
    std::optional<long> maxlength;
};

// Line-oriented parse. Comment lines (leading '*') are dropped; backtick
// interpolation stays unresolved until execution. Throws SyntaxError.
std::vector<Instruction> parse_script(std::string_view source);

// Executes parsed programs against a channel registry. Strictly one
// instruction at a time; blocking reads block the script.
class Interpreter {
public:
    Interpreter(ChannelRegistry& registry, std::ostream& out, std::ostream& diag);

    void set_echo(bool on) { echo_default_ = on; }
    void define(std::string name, std::string value);
    std::optional<std::string> variable(const std::string& name) const;
    const std::vector<std::pair<std::string, std::string>>& locals() const {
        return locals_;
    }

    // Returns 0 on success, 1 on any script or channel error (a diagnostic
    // naming the script line goes to the diag stream).
    int run(std::span<const Instruction> program);
    int run_source(std::string_view source);

private:
    void exec_block(std::span<const Instruction> block);
    void exec_one(const Instruction& in);
    void splice(const std::string& text);
    void process_data_line(const std::string& raw);
    void finish_local_statement();
    void print_locals();
    std::string interpolate(std::string_view text) const;
    std::string expand_format(std::string_view fmt) const;
    long to_long(const std::string& text) const;

    ChannelRegistry& registry_;
    std::ostream& out_;
    std::ostream& diag_;
    std::map<std::string, std::string> vars_;
    std::vector<std::pair<std::string, std::string>> locals_;
    bool echo_default_ = false;
    bool halted_ = false;
    bool accumulating_ = false;
    std::string statement_buf_;
    int cur_line_ = 0;
};

} // namespace extchan
