// mockcas — a prompt-speaking stand-in for an external computer algebra
// system. Reads one rational-polynomial expression per line, prints the
// GCD-contracted result followed by the prompt line.

#include "extchan/poly.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"mock computer-algebra child (rational polynomial GCD contraction)"};
    std::string prompt;
    long startup_delay_ms = 0;
    std::string order = "asc";
    app.add_option("--prompt", prompt, "prompt line emitted after each reply");
    app.add_option("--startup-delay", startup_delay_ms,
                   "one-time startup delay in milliseconds");
    app.add_option("--order", order, "term order: asc or desc")
        ->check(CLI::IsMember({"asc", "desc"}));
    CLI11_PARSE(app, argc, argv);

    bool ascending = order == "asc";
    if (startup_delay_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(startup_delay_ms));

    std::string line;
    while (std::getline(std::cin, line)) {
        std::string_view expr = line;
        while (!expr.empty() && (expr.front() == ' ' || expr.front() == '\t'))
            expr.remove_prefix(1);
        if (expr.empty()) {
            // nothing to evaluate; keep framing intact anyway
            std::cout << prompt << "\n" << std::flush;
            continue;
        }
        try {
            extchan::Ratio r = extchan::gcd_contract(extchan::parse_poly_expr(expr));
            std::cout << extchan::format_ratio(r, ascending) << "\n";
        } catch (const std::exception& e) {
            std::cout << "ERROR: " << e.what() << "\n";
        }
        std::cout << prompt << "\n" << std::flush;
    }
    return 0;
}
