// gateway — strictly line-buffered stream filters and the masking gateway.
//
//   gateway --filter NAME[:ARGS] [--filter ...]   stdin -> stdout filtering
//   gateway --mask [--simplifier-cmd CMD --prompt P]   @-command masking mode

#include "extchan/filters.hpp"
#include "extchan/masking.hpp"
#include "extchan/registry.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

extchan::FilterSpec parse_filter_arg(const std::string& arg) {
    std::string name = arg;
    char marker = '$';
    std::string prompt = "P";
    size_t colon = arg.find(':');
    if (colon != std::string::npos) {
        name = arg.substr(0, colon);
        std::string rest = arg.substr(colon + 1);
        size_t colon2 = rest.find(':');
        std::string marker_text = colon2 == std::string::npos ? rest : rest.substr(0, colon2);
        if (marker_text.size() != 1)
            throw CLI::ValidationError("--filter", "marker must be a single byte");
        marker = marker_text[0];
        if (colon2 != std::string::npos) prompt = rest.substr(colon2 + 1);
    }
    using extchan::FilterSpec;
    if (name == "promptinject") return FilterSpec::prompt_inject(marker, prompt);
    if (name == "blankdrop") return FilterSpec::blank_line_drop();
    if (name == "negpower") return FilterSpec::neg_power_parenthesize();
    if (name == "pow2star") return FilterSpec::power_to_double_star();
    if (name == "star2caret") return FilterSpec::double_star_to_caret();
    if (name == "linejoin") return FilterSpec::line_join(marker, prompt);
    throw CLI::ValidationError("--filter", "unknown filter '" + name + "'");
}

void emit(const std::vector<std::string>& lines) {
    for (const auto& l : lines) std::cout << l << "\n" << std::flush;
}

int run_filters(const std::vector<std::string>& filter_args) {
    std::vector<extchan::FilterSpec> specs;
    for (const auto& a : filter_args) specs.push_back(parse_filter_arg(a));
    extchan::FilterChain chain(std::move(specs));
    std::string line;
    while (std::getline(std::cin, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        emit(chain.feed(line));
    }
    emit(chain.finish());
    return 0;
}

int run_mask(const std::string& simplifier_cmd, const std::string& prompt) {
    extchan::ChannelRegistry registry;
    extchan::Simplifier simplifier;
    if (!simplifier_cmd.empty()) {
        registry.set_prompt(prompt);
        registry.open_channel(simplifier_cmd);
        simplifier = [&registry](const std::string& expr) {
            registry.send(expr + "\n");
            return registry.read_until_prompt();
        };
    }
    extchan::GatewaySession session(simplifier);
    std::string line;
    while (std::getline(std::cin, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            emit(session.process_line(line));
        } catch (const extchan::GatewayError& e) {
            std::cerr << "gateway: " << e.what() << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"line-buffered gateway filters"};
    std::vector<std::string> filter_args;
    bool mask = false;
    std::string simplifier_cmd;
    std::string prompt = "P";
    app.add_option("--filter", filter_args, "filter name[:marker[:prompt]]");
    app.add_flag("--mask", mask, "run the masking gateway with @-command support");
    app.add_option("--simplifier-cmd", simplifier_cmd,
                   "command filtering acc() content in --mask mode");
    app.add_option("--prompt", prompt, "prompt of the simplifier channel");
    CLI11_PARSE(app, argc, argv);

    if (mask == !filter_args.empty()) {
        std::cerr << "gateway: use either --mask or at least one --filter\n";
        return 2;
    }
    try {
        return mask ? run_mask(simplifier_cmd, prompt) : run_filters(filter_args);
    } catch (const std::exception& e) {
        std::cerr << "gateway: " << e.what() << "\n";
        return 1;
    }
}
