#include "extchan/masking.hpp"

#include <cctype>
#include <fstream>

namespace extchan {

const std::string& MaskingStore::entry(size_t k) const {
    if (k == 0 || k > entries_.size()) throw BadIndex(k);
    return entries_[k - 1];
}

size_t MaskingStore::add(std::string expr) {
    entries_.push_back(std::move(expr));
    return entries_.size();
}

void MaskingStore::save(const std::string& filename) const {
    std::ofstream f(filename, std::ios::binary);
    if (!f) throw FileError("cannot write " + filename);
    for (const auto& e : entries_) f << e << "\n";
    if (!f) throw FileError("write to " + filename + " failed");
}

void MaskingStore::load(const std::string& filename) {
    std::ifstream f(filename, std::ios::binary);
    if (!f) throw FileError("cannot read " + filename);
    std::vector<std::string> loaded;
    std::string line;
    while (std::getline(f, line)) loaded.push_back(line);
    entries_ = std::move(loaded);
}

std::string mask_line(MaskingStore& store, std::string_view line,
                      const Simplifier& simplifier, bool filter_on) {
    std::string out;
    size_t pos = 0;
    while (pos < line.size()) {
        size_t m = line.find("acc(", pos);
        if (m == std::string_view::npos) {
            out.append(line.substr(pos));
            break;
        }
        // skip a match inside a longer identifier (e.g. "macc(")
        if (m > 0 && (std::isalnum(static_cast<unsigned char>(line[m - 1])) ||
                      line[m - 1] == '_')) {
            out.append(line.substr(pos, m + 4 - pos));
            pos = m + 4;
            continue;
        }
        out.append(line.substr(pos, m - pos));
        size_t depth = 1;
        size_t i = m + 4;
        while (i < line.size() && depth > 0) {
            if (line[i] == '(') ++depth;
            else if (line[i] == ')') --depth;
            ++i;
        }
        if (depth != 0)
            throw UnbalancedParens("unbalanced parentheses in acc() argument");
        std::string expr(line.substr(m + 4, i - m - 5));
        if (filter_on && simplifier) expr = simplifier(expr);
        size_t k = store.add(std::move(expr));
        out += "dd(" + std::to_string(k) + ")";
        pos = i;
    }
    return out;
}

std::string expand_line(const MaskingStore& store, std::string_view line) {
    std::string out;
    size_t pos = 0;
    while (pos < line.size()) {
        size_t m = line.find("dd(", pos);
        if (m == std::string_view::npos) {
            out.append(line.substr(pos));
            break;
        }
        bool ident_prefix =
            m > 0 && (std::isalnum(static_cast<unsigned char>(line[m - 1])) ||
                      line[m - 1] == '_');
        size_t i = m + 3;
        size_t digits_start = i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        bool closed = i < line.size() && line[i] == ')' && i > digits_start;
        if (ident_prefix || !closed) {
            out.append(line.substr(pos, m + 3 - pos));
            pos = m + 3;
            continue;
        }
        size_t k = std::stoul(std::string(line.substr(digits_start, i - digits_start)));
        if (k == 0 || k > store.size()) {
            // not one of ours
            out.append(line.substr(pos, i + 1 - pos));
        } else {
            out.append(line.substr(pos, m - pos));
            out += "(" + store.entry(k) + ")";
        }
        pos = i + 1;
    }
    return out;
}

std::vector<std::string> GatewaySession::command(std::string_view line) {
    if (line.empty() || line.front() != '@')
        throw UnknownCommand("not a gateway command: '" + std::string(line) + "'");
    if (line.size() < 2) throw UnknownCommand("empty gateway command");
    char letter = line[1];
    std::string_view arg = line.substr(2);
    switch (letter) {
        case 'f':
            if (arg == "0") filtering_ = false;
            else if (arg == "1") filtering_ = true;
            else throw UnknownCommand("@f wants 0 or 1");
            return {};
        case 'e':
            if (arg == "0") expanding_ = false;
            else if (arg == "1") expanding_ = true;
            else throw UnknownCommand("@e wants 0 or 1");
            return {};
        case 'v': {
            // re-emit arg, substituting each @(k) with entry k
            std::string out;
            size_t pos = 0;
            while (pos < arg.size()) {
                size_t m = arg.find("@(", pos);
                if (m == std::string_view::npos) {
                    out.append(arg.substr(pos));
                    break;
                }
                size_t i = m + 2;
                size_t ds = i;
                while (i < arg.size() && std::isdigit(static_cast<unsigned char>(arg[i]))) ++i;
                if (i == ds || i >= arg.size() || arg[i] != ')')
                    throw UnknownCommand("@v wants @(number) references");
                size_t k = std::stoul(std::string(arg.substr(ds, i - ds)));
                out.append(arg.substr(pos, m - pos));
                out += store_.entry(k); // throws BadIndex when out of range
                pos = i + 1;
            }
            return {out};
        }
        case 's':
        case 'r': {
            while (!arg.empty() && (arg.front() == ' ' || arg.front() == '\t'))
                arg.remove_prefix(1);
            if (arg.empty()) throw UnknownCommand("@s/@r want a file name");
            if (letter == 's') store_.save(std::string(arg));
            else store_.load(std::string(arg));
            return {};
        }
        default:
            throw UnknownCommand(std::string("unknown gateway command @") + letter);
    }
}

std::vector<std::string> GatewaySession::process_line(std::string_view line) {
    if (!line.empty() && line.front() == '@') return command(line);
    if (expanding_) return {expand_line(store_, line)};
    return {mask_line(store_, line, simplifier_, filtering_)};
}

} // namespace extchan
