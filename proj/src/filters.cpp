#include "extchan/filters.hpp"

#include <cctype>
#include <cstdio>

namespace extchan {

FilterSpec FilterSpec::prompt_inject(char marker, std::string prompt) {
    return {Kind::PromptInject, marker, std::move(prompt)};
}
FilterSpec FilterSpec::blank_line_drop() {
    return {Kind::BlankLineDrop};
}
FilterSpec FilterSpec::neg_power_parenthesize() {
    return {Kind::NegPowerParenthesize};
}
FilterSpec FilterSpec::power_to_double_star() {
    return {Kind::PowerToDoubleStar};
}
FilterSpec FilterSpec::double_star_to_caret() {
    return {Kind::DoubleStarToCaret};
}
FilterSpec FilterSpec::line_join(char marker, std::string prompt) {
    return {Kind::LineJoinUntilMarker, marker, std::move(prompt)};
}

namespace {

std::vector<std::string> split_on_marker(std::string_view line, char marker,
                                         const std::string& prompt) {
    std::vector<std::string> out;
    size_t pos = 0;
    bool first = true;
    while (pos <= line.size()) {
        size_t m = line.find(marker, pos);
        std::string_view seg = line.substr(
            pos, m == std::string_view::npos ? std::string_view::npos : m - pos);
        bool last = m == std::string_view::npos;
        if (!first) out.push_back(prompt);
        // a marker at the very end of the line produces no empty tail line
        if (!(last && !first && seg.empty())) out.emplace_back(seg);
        first = false;
        if (last) break;
        pos = m + 1;
    }
    return out;
}

std::string rewrite_neg_powers(std::string_view line) {
    std::string out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '^' && i + 1 < line.size() && line[i + 1] == '-') {
            size_t j = i + 2;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            if (j > i + 2) {
                out += "^(-";
                out.append(line.substr(i + 2, j - i - 2));
                out += ")";
                i = j;
                continue;
            }
            // symbolic negative exponent: left as-is, but worth a note
            std::fprintf(stderr, "filter: symbolic exponent after '^-' left unchanged\n");
        }
        out.push_back(line[i]);
        ++i;
    }
    return out;
}

std::string replace_all(std::string_view line, std::string_view from, std::string_view to) {
    std::string out;
    size_t pos = 0;
    while (pos < line.size()) {
        size_t m = line.find(from, pos);
        if (m == std::string_view::npos) {
            out.append(line.substr(pos));
            break;
        }
        out.append(line.substr(pos, m - pos));
        out.append(to);
        pos = m + from.size();
    }
    return out;
}

} // namespace

std::vector<std::string> Filter::feed(std::string_view line) {
    using K = FilterSpec::Kind;
    switch (spec_.kind) {
        case K::PromptInject: {
            auto seq = split_on_marker(line, spec_.marker, spec_.prompt);
            // a bare line without the marker passes through unchanged
            return seq;
        }
        case K::BlankLineDrop:
            if (line.empty()) return {};
            return {std::string(line)};
        case K::NegPowerParenthesize:
            return {rewrite_neg_powers(line)};
        case K::PowerToDoubleStar:
            return {replace_all(line, "^", "**")};
        case K::DoubleStarToCaret:
            return {replace_all(line, "**", "^")};
        case K::LineJoinUntilMarker: {
            pending_.append(line);
            std::vector<std::string> out;
            size_t m;
            while ((m = pending_.find(spec_.marker)) != std::string::npos) {
                out.push_back(pending_.substr(0, m));
                out.push_back(spec_.prompt);
                pending_.erase(0, m + 1);
            }
            return out;
        }
    }
    return {};
}

std::vector<std::string> Filter::finish() {
    if (spec_.kind == FilterSpec::Kind::LineJoinUntilMarker && !pending_.empty()) {
        std::vector<std::string> out{pending_};
        pending_.clear();
        return out;
    }
    return {};
}

std::vector<std::string> run_filter(const FilterSpec& spec, std::string_view line) {
    Filter f(spec);
    return f.feed(line);
}

FilterChain::FilterChain(std::vector<FilterSpec> specs) {
    filters_.reserve(specs.size());
    for (auto& s : specs) filters_.emplace_back(std::move(s));
}

std::vector<std::string> FilterChain::push(size_t stage, std::string_view line) {
    if (stage >= filters_.size()) return {std::string(line)};
    std::vector<std::string> out;
    for (const auto& produced : filters_[stage].feed(line)) {
        auto down = push(stage + 1, produced);
        out.insert(out.end(), down.begin(), down.end());
    }
    return out;
}

std::vector<std::string> FilterChain::feed(std::string_view line) {
    return push(0, line);
}

std::vector<std::string> FilterChain::finish() {
    std::vector<std::string> out;
    for (size_t s = 0; s < filters_.size(); ++s) {
        for (const auto& produced : filters_[s].finish()) {
            auto down = push(s + 1, produced);
            out.insert(out.end(), down.begin(), down.end());
        }
    }
    return out;
}

std::vector<std::string> compose(const std::vector<FilterSpec>& specs,
                                 const std::vector<std::string>& input_lines) {
    FilterChain chain(specs);
    std::vector<std::string> out;
    for (const auto& line : input_lines) {
        auto produced = chain.feed(line);
        out.insert(out.end(), produced.begin(), produced.end());
    }
    auto tail = chain.finish();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

} // namespace extchan
