#include "extchan/script.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace extchan {

namespace {

std::string to_lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return r;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

void skip_ws(std::string_view& s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
}

// Reads a double-quoted token; escape sequences are kept raw for later
// expansion. Returns nullopt when the text does not start with a quote.
std::optional<std::string> take_quoted(std::string_view& s, int line) {
    skip_ws(s);
    if (s.empty() || s.front() != '"') return std::nullopt;
    std::string content;
    size_t i = 1;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            content.push_back(c);
            content.push_back(s[i + 1]);
            i += 2;
            continue;
        }
        if (c == '"') {
            s.remove_prefix(i + 1);
            return content;
        }
        content.push_back(c);
        ++i;
    }
    throw SyntaxError(line, "unterminated string");
}

std::string take_angle_name(std::string_view& s, int line) {
    skip_ws(s);
    if (s.empty() || s.front() != '<') throw SyntaxError(line, "expected <filename>");
    size_t close = s.find('>');
    if (close == std::string_view::npos) throw SyntaxError(line, "expected <filename>");
    std::string name(trim(s.substr(1, close - 1)));
    s.remove_prefix(close + 1);
    if (name.empty()) throw SyntaxError(line, "empty file name");
    return name;
}

Instruction parse_instruction(std::string_view rest, int line) {
    // rest starts right after '#'
    size_t i = 0;
    while (i < rest.size() && std::isalpha(static_cast<unsigned char>(rest[i]))) ++i;
    std::string word = to_lower(rest.substr(0, i));
    std::string_view args = rest.substr(i);
    int echo_flag = 0;
    if (!args.empty() && (args.front() == '+' || args.front() == '-')) {
        if (word == "fromexternal") {
            echo_flag = args.front() == '+' ? 1 : -1;
            args.remove_prefix(1);
        }
    }

    Instruction in;
    in.line = line;

    if (word == "external") {
        in.kind = Instruction::Kind::External;
        if (auto var = take_quoted(args, line)) {
            in.a = *var;
            in.has_var = true;
        }
        in.b = std::string(trim(args));
        if (in.b.empty()) throw SyntaxError(line, "#external wants a system command");
    } else if (word == "toexternal") {
        in.kind = Instruction::Kind::ToExternal;
        auto fmt = take_quoted(args, line);
        if (!fmt) throw SyntaxError(line, "#toexternal wants a quoted format string");
        in.a = *fmt;
        if (!trim(args).empty())
            throw SyntaxError(line, "unexpected text after the format string");
    } else if (word == "fromexternal") {
        in.kind = Instruction::Kind::FromExternal;
        in.echo_flag = echo_flag;
        if (auto var = take_quoted(args, line)) {
            in.a = *var;
            in.has_var = true;
            std::string_view num = trim(args);
            if (!num.empty()) {
                // allow "var",len and "var" len
                if (num.front() == ',') num = trim(num.substr(1));
                long v = 0;
                auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
                if (ec != std::errc() || p != num.data() + num.size() || v < 0)
                    throw SyntaxError(line, "bad maxlength");
                in.maxlength = v;
            }
        } else if (!trim(args).empty()) {
            throw SyntaxError(line, "unexpected text after #fromexternal");
        }
    } else if (word == "prompt") {
        in.kind = Instruction::Kind::Prompt;
        in.a = std::string(trim(args));
    } else if (word == "setexternal") {
        in.kind = Instruction::Kind::SetExternal;
        in.a = std::string(trim(args));
        if (in.a.empty()) throw SyntaxError(line, "#setexternal wants a descriptor");
    } else if (word == "rmexternal") {
        in.kind = Instruction::Kind::RmExternal;
        in.a = std::string(trim(args));
    } else if (word == "setexternalattr") {
        in.kind = Instruction::Kind::SetExternalAttr;
        in.a = std::string(trim(args));
        if (in.a.empty()) throw SyntaxError(line, "#setexternalattr wants attributes");
    } else if (word == "system") {
        in.kind = Instruction::Kind::System;
        in.a = std::string(trim(args));
        if (in.a.empty()) throw SyntaxError(line, "#system wants a command");
    } else if (word == "pipe") {
        in.kind = Instruction::Kind::Pipe;
        in.a = std::string(trim(args));
        if (in.a.empty()) throw SyntaxError(line, "#pipe wants a command");
    } else if (word == "define") {
        in.kind = Instruction::Kind::Define;
        skip_ws(args);
        size_t j = 0;
        while (j < args.size() && (std::isalnum(static_cast<unsigned char>(args[j])) ||
                                   args[j] == '_' || args[j] == '$'))
            ++j;
        if (j == 0) throw SyntaxError(line, "#define wants a name");
        in.a = std::string(args.substr(0, j));
        args.remove_prefix(j);
        if (auto val = take_quoted(args, line))
            in.b = *val;
        else
            in.b = std::string(trim(args));
    } else if (word == "do") {
        in.kind = Instruction::Kind::Do;
        std::string_view body = trim(args);
        size_t eq = body.find('=');
        if (eq == std::string_view::npos) throw SyntaxError(line, "#do wants var = from,to");
        in.a = std::string(trim(body.substr(0, eq)));
        std::string_view range = body.substr(eq + 1);
        size_t comma = range.find(',');
        if (in.a.empty() || comma == std::string_view::npos)
            throw SyntaxError(line, "#do wants var = from,to");
        in.b = std::string(trim(range.substr(0, comma)));
        in.c = std::string(trim(range.substr(comma + 1)));
    } else if (word == "enddo") {
        in.kind = Instruction::Kind::EndDo;
    } else if (word == "write") {
        in.kind = Instruction::Kind::Write;
        in.a = take_angle_name(args, line);
        auto fmt = take_quoted(args, line);
        if (!fmt) throw SyntaxError(line, "#write wants a quoted format string");
        in.b = *fmt;
    } else if (word == "remove") {
        in.kind = Instruction::Kind::Remove;
        in.a = take_angle_name(args, line);
    } else if (word == "echo") {
        in.kind = Instruction::Kind::Echo;
        auto fmt = take_quoted(args, line);
        if (!fmt) throw SyntaxError(line, "#echo wants a quoted format string");
        in.a = *fmt;
    } else {
        throw SyntaxError(line, "unknown instruction #" + word);
    }
    return in;
}

} // namespace

std::vector<Instruction> parse_script(std::string_view source) {
    std::vector<Instruction> program;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= source.size()) {
        size_t nl = source.find('\n', pos);
        std::string_view raw = source.substr(
            pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        if (nl == std::string_view::npos && raw.empty()) break;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        std::string_view stripped = trim(raw);
        if (stripped.empty()) {
            Instruction in;
            in.kind = Instruction::Kind::Data;
            in.line = line_no;
            program.push_back(std::move(in));
            continue;
        }
        if (stripped.front() == '*') continue; // comment
        if (stripped.front() == '#') {
            program.push_back(parse_instruction(stripped.substr(1), line_no));
        } else {
            Instruction in;
            in.kind = Instruction::Kind::Data;
            in.line = line_no;
            in.a = std::string(raw);
            program.push_back(std::move(in));
        }
    }
    return program;
}

Interpreter::Interpreter(ChannelRegistry& registry, std::ostream& out, std::ostream& diag)
    : registry_(registry), out_(out), diag_(diag) {}

void Interpreter::define(std::string name, std::string value) {
    vars_[std::move(name)] = std::move(value);
}

std::optional<std::string> Interpreter::variable(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) return std::nullopt;
    return it->second;
}

std::string Interpreter::interpolate(std::string_view text) const {
    std::string out;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '`') {
            size_t close = text.find('\'', i + 1);
            if (close == std::string_view::npos)
                throw ScriptError("unterminated `name' interpolation");
            std::string name(text.substr(i + 1, close - i - 1));
            auto it = vars_.find(name);
            if (it == vars_.end())
                throw ScriptError("undefined variable `" + name + "'");
            out += it->second;
            i = close + 1;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

std::string Interpreter::expand_format(std::string_view fmt) const {
    std::string interpolated = interpolate(fmt);
    std::string out;
    size_t i = 0;
    while (i < interpolated.size()) {
        char c = interpolated[i];
        if (c == '\\' && i + 1 < interpolated.size()) {
            char n = interpolated[i + 1];
            switch (n) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '\\': out.push_back('\\'); break;
                case '"': out.push_back('"'); break;
                default:
                    out.push_back(c);
                    out.push_back(n);
            }
            i += 2;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

long Interpreter::to_long(const std::string& text) const {
    long v = 0;
    std::string_view t = trim(text);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
        throw ScriptError("expected an integer, got '" + std::string(t) + "'");
    return v;
}

void Interpreter::splice(const std::string& text) {
    std::vector<Instruction> sub = parse_script(text);
    exec_block(sub);
}

void Interpreter::finish_local_statement() {
    accumulating_ = false;
    std::string stmt = statement_buf_;
    statement_buf_.clear();
    size_t semi = stmt.find(';');
    if (semi != std::string::npos) stmt.resize(semi);
    // stmt is "Local name=expr" with fragments already trimmed and joined
    size_t eq = stmt.find('=');
    if (eq == std::string::npos) return;
    std::string name(trim(std::string_view(stmt).substr(5, eq - 5)));
    std::string expr(trim(std::string_view(stmt).substr(eq + 1)));
    for (auto& [n, e] : locals_) {
        if (n == name) {
            e = expr;
            return;
        }
    }
    locals_.emplace_back(std::move(name), std::move(expr));
}

void Interpreter::print_locals() {
    for (const auto& [name, expr] : locals_)
        out_ << name << " = " << expr << "\n";
}

void Interpreter::process_data_line(const std::string& raw) {
    std::string_view stripped = trim(raw);
    if (accumulating_) {
        statement_buf_ += stripped;
        if (stripped.find(';') != std::string_view::npos) finish_local_statement();
        return;
    }
    if (stripped.empty()) return;
    std::string lower = to_lower(stripped);
    if (lower.rfind("local ", 0) == 0 || lower.rfind("local\t", 0) == 0) {
        accumulating_ = true;
        statement_buf_.assign(stripped);
        if (stripped.find(';') != std::string_view::npos) finish_local_statement();
    } else if (lower == "print;" || lower == "print ;" || lower == "print") {
        print_locals();
    } else if (stripped.front() == '.') {
        if (lower == ".end") halted_ = true; // other dots are no-ops
    } else if (lower.rfind("drop ", 0) == 0) {
        std::string_view name = trim(stripped.substr(5));
        if (!name.empty() && name.back() == ';') name = trim(name.substr(0, name.size() - 1));
        std::erase_if(locals_, [&](const auto& p) { return p.first == name; });
    }
    // anything else is inert
}

void Interpreter::exec_one(const Instruction& in) {
    using K = Instruction::Kind;
    switch (in.kind) {
        case K::External: {
            int id = registry_.open_channel(interpolate(in.b));
            if (in.has_var) vars_[in.a] = std::to_string(id);
            break;
        }
        case K::ToExternal:
            registry_.send(expand_format(in.a));
            break;
        case K::FromExternal: {
            std::optional<size_t> maxlen;
            if (in.maxlength) maxlen = static_cast<size_t>(*in.maxlength);
            std::string text = registry_.read_until_prompt(maxlen);
            bool echo = in.echo_flag > 0 || (in.echo_flag == 0 && echo_default_);
            if (echo) out_ << text << "\n";
            if (in.has_var)
                vars_[in.a] = text;
            else
                splice(text);
            break;
        }
        case K::Prompt:
            registry_.set_prompt(interpolate(in.a));
            break;
        case K::SetExternal:
            registry_.set_current(static_cast<int>(to_long(interpolate(in.a))));
            break;
        case K::RmExternal:
            if (in.a.empty())
                registry_.remove_channel();
            else
                registry_.remove_channel(static_cast<int>(to_long(interpolate(in.a))));
            break;
        case K::SetExternalAttr:
            registry_.set_default_attrs(interpolate(in.a));
            break;
        case K::System: {
            std::string cmd = interpolate(in.a);
            int rc = std::system(cmd.c_str());
            diag_ << "#system `" << cmd << "' exited " << rc << "\n";
            break;
        }
        case K::Pipe: {
            std::string cmd = interpolate(in.a);
            FILE* p = ::popen(cmd.c_str(), "r");
            if (!p) throw ScriptError("#pipe: cannot start '" + cmd + "'");
            std::string text;
            char buf[4096];
            size_t n;
            while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, n);
            ::pclose(p);
            splice(text);
            break;
        }
        case K::Define:
            vars_[in.a] = in.b;
            break;
        case K::Write: {
            std::ofstream f(interpolate(in.a), std::ios::app | std::ios::binary);
            if (!f) throw ScriptError("#write: cannot open " + in.a);
            f << expand_format(in.b) << "\n";
            break;
        }
        case K::Remove:
            std::remove(interpolate(in.a).c_str());
            break;
        case K::Echo:
            out_ << expand_format(in.a) << "\n";
            break;
        case K::Data:
            process_data_line(in.a);
            break;
        case K::Do:
        case K::EndDo:
            // handled by exec_block
            break;
    }
}

void Interpreter::exec_block(std::span<const Instruction> block) {
    size_t pc = 0;
    while (pc < block.size() && !halted_) {
        const Instruction& in = block[pc];
        cur_line_ = in.line;
        if (in.kind == Instruction::Kind::Do) {
            size_t depth = 1, j = pc + 1;
            for (; j < block.size(); ++j) {
                if (block[j].kind == Instruction::Kind::Do) ++depth;
                else if (block[j].kind == Instruction::Kind::EndDo && --depth == 0) break;
            }
            if (j == block.size()) throw ScriptError("#do without matching #enddo");
            long from = to_long(interpolate(in.b));
            long to = to_long(interpolate(in.c));
            for (long v = from; v <= to && !halted_; ++v) {
                vars_[in.a] = std::to_string(v);
                exec_block(block.subspan(pc + 1, j - pc - 1));
            }
            pc = j + 1;
            continue;
        }
        if (in.kind == Instruction::Kind::EndDo)
            throw ScriptError("#enddo without matching #do");
        exec_one(in);
        ++pc;
    }
}

int Interpreter::run(std::span<const Instruction> program) {
    try {
        exec_block(program);
        return 0;
    } catch (const ChannelError& e) {
        diag_ << "error at script line " << cur_line_ << ": " << e.what() << "\n";
        return 1;
    }
}

int Interpreter::run_source(std::string_view source) {
    std::vector<Instruction> program;
    try {
        program = parse_script(source);
    } catch (const SyntaxError& e) {
        diag_ << "syntax error: " << e.what() << "\n";
        return 1;
    }
    return run(program);
}

} // namespace extchan
