#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace extchan {

// One line-buffered stream transformation. Filters map an input line stream
// to an output line stream; only LineJoinUntilMarker buffers beyond the
// current line. Lines carry no trailing newline here; the driver adds it and
// flushes per line.
struct FilterSpec {
    enum class Kind {
        PromptInject,         // replace each end marker by newline+prompt+newline
        BlankLineDrop,        // drop empty lines
        NegPowerParenthesize, // X^-123 -> X^(-123)
        PowerToDoubleStar,    // ^  -> **
        DoubleStarToCaret,    // ** -> ^
        LineJoinUntilMarker   // join lines until the marker, then emit + prompt
    };

    Kind kind{};
    char marker = '$';
    std::string prompt = "P";

    static FilterSpec prompt_inject(char marker = '$', std::string prompt = "P");
    static FilterSpec blank_line_drop();
    static FilterSpec neg_power_parenthesize();
    static FilterSpec power_to_double_star();
    static FilterSpec double_star_to_caret();
    static FilterSpec line_join(char marker = '$', std::string prompt = "P");
};

// A running instance of one filter (LineJoinUntilMarker is stateful).
class Filter {
public:
    explicit Filter(FilterSpec spec) : spec_(std::move(spec)) {}

    std::vector<std::string> feed(std::string_view line);
    // Flushes buffered text at end of input.
    std::vector<std::string> finish();

    const FilterSpec& spec() const { return spec_; }

private:
    FilterSpec spec_;
    std::string pending_; // LineJoinUntilMarker accumulation
};

// Stateless convenience: one line in, zero or more lines out.
std::vector<std::string> run_filter(const FilterSpec& spec, std::string_view line);

// Left-to-right composition; each input line is pushed through the whole
// chain before the next one is consumed.
class FilterChain {
public:
    explicit FilterChain(std::vector<FilterSpec> specs);

    std::vector<std::string> feed(std::string_view line);
    std::vector<std::string> finish();

private:
    std::vector<Filter> filters_;
    std::vector<std::string> push(size_t stage, std::string_view line);
};

// Applies the chain to a whole line sequence (testing convenience).
std::vector<std::string> compose(const std::vector<FilterSpec>& specs,
                                 const std::vector<std::string>& input_lines);

} // namespace extchan
