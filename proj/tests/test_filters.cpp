#include <doctest.h>

#include "extchan/filters.hpp"
#include "extchan/masking.hpp"
#include "extchan/poly.hpp"
#include "test_util.hpp"

#include <random>
#include <string>
#include <vector>

using namespace extchan;

namespace {

std::vector<std::string> one(const FilterSpec& spec, std::string_view line) {
    return run_filter(spec, line);
}

// The descending-order contraction used by the masking examples.
std::string contract_desc(const std::string& expr) {
    return format_ratio(gcd_contract(parse_poly_expr(expr)), /*ascending=*/false);
}

} // namespace

TEST_CASE("negative exponents gain parentheses") {
    auto spec = FilterSpec::neg_power_parenthesize();
    CHECK(one(spec, "a^-1") == std::vector<std::string>{"a^(-1)"});
    CHECK(one(spec, "x^-12+y^-3") == std::vector<std::string>{"x^(-12)+y^(-3)"});
    // positive powers and already-parenthesized ones pass through
    CHECK(one(spec, "a^2") == std::vector<std::string>{"a^2"});
    CHECK(one(spec, "a^(-2)") == std::vector<std::string>{"a^(-2)"});
}

TEST_CASE("caret and double-star notations convert both ways") {
    CHECK(one(FilterSpec::power_to_double_star(), "x^3") ==
          std::vector<std::string>{"x**3"});
    CHECK(one(FilterSpec::double_star_to_caret(), "x**3") ==
          std::vector<std::string>{"x^3"});
    // the combined rewrite from the acceptance fixture
    auto chained = compose({FilterSpec::neg_power_parenthesize(),
                            FilterSpec::power_to_double_star()},
                           {"a^-1"});
    CHECK(chained == std::vector<std::string>{"a**(-1)"});
}

TEST_CASE("end marker becomes a prompt line") {
    auto spec = FilterSpec::prompt_inject('$', "P");
    CHECK(one(spec, "3 / 2$") == std::vector<std::string>{"3 / 2", "P"});
    CHECK(one(spec, "a$b$") == std::vector<std::string>{"a", "P", "b", "P"});
    CHECK(one(spec, "no marker") == std::vector<std::string>{"no marker"});
}

TEST_CASE("blank lines are dropped") {
    auto spec = FilterSpec::blank_line_drop();
    CHECK(one(spec, "").empty());
    CHECK(one(spec, "kept") == std::vector<std::string>{"kept"});
}

TEST_CASE("line joining buffers until the marker") {
    Filter f(FilterSpec::line_join('$', "P"));
    CHECK(f.feed("3 +").empty());
    CHECK(f.feed(" x$") == std::vector<std::string>{"3 + x", "P"});
    CHECK(f.finish().empty());

    Filter g(FilterSpec::line_join('$', "P"));
    CHECK(g.feed("dangling").empty());
    CHECK(g.finish() == std::vector<std::string>{"dangling"});
}

TEST_CASE("chains stream line by line") {
    FilterChain chain({FilterSpec::prompt_inject('$', "P"),
                       FilterSpec::blank_line_drop()});
    CHECK(chain.feed("x$") == std::vector<std::string>{"x", "P"});
    CHECK(chain.feed("") == std::vector<std::string>{});
    CHECK(chain.finish().empty());
}

TEST_CASE("caret and double-star rewrites are mutual inverses") {
    std::mt19937 rng(424242);
    // no '*': text that already contains stars next to a caret cannot be
    // distinguished from a converted power, so the inverse only holds for
    // star-free input
    const std::string alphabet = "abxyz0123456789+-/() ";
    for (int iter = 0; iter < 300; ++iter) {
        size_t len = rng() % 50;
        std::string line;
        for (size_t i = 0; i < len; ++i) line += alphabet[rng() % alphabet.size()];
        // '^' round trips through '**'; the reverse needs a '**'-free start
        auto starred = compose({FilterSpec::power_to_double_star()}, {line + "^7"});
        auto back = compose({FilterSpec::double_star_to_caret()}, starred);
        REQUIRE(back.size() == 1);
        CHECK(back[0] == line + "^7");
    }
}

TEST_CASE("masking swaps bracketed expressions for numbered stand-ins") {
    MaskingStore store;
    std::string out = mask_line(store, "some string + acc((d+1)/(d-1)+d) + another string",
                                contract_desc, true);
    CHECK(out == "some string + dd(1) + another string");
    REQUIRE(store.size() == 1);
    CHECK(store.entry(1) == "(d^2+1)/(d-1)");
}

TEST_CASE("masking without simplification stores the text verbatim") {
    MaskingStore store;
    std::string out = mask_line(store, "head acc(x+y) tail", {}, true);
    CHECK(out == "head dd(1) tail");
    CHECK(store.entry(1) == "x+y");
}

TEST_CASE("masking counts parentheses, not characters") {
    MaskingStore store;
    std::string out = mask_line(store, "acc(f(a,(b)) + g(c))", {}, true);
    CHECK(out == "dd(1)");
    CHECK(store.entry(1) == "f(a,(b)) + g(c)");
}

TEST_CASE("identifier-prefixed acc is left alone") {
    MaskingStore store;
    CHECK(mask_line(store, "macc(x)", {}, true) == "macc(x)");
    CHECK(store.size() == 0);
}

TEST_CASE("unbalanced masking input is an error") {
    MaskingStore store;
    CHECK_THROWS_AS(mask_line(store, "acc((x)", {}, true), UnbalancedParens);
}

TEST_CASE("masking a line twice adds nothing new") {
    MaskingStore store;
    std::string once = mask_line(store, "a + acc(x) + acc(y)", {}, true);
    size_t n = store.size();
    std::string twice = mask_line(store, once, {}, true);
    CHECK(twice == once);
    CHECK(store.size() == n);
}

TEST_CASE("expansion restores stored expressions in parentheses") {
    MaskingStore store;
    store.add("x+1");
    store.add("y-2");
    CHECK(expand_line(store, "dd(1)*dd(2)") == "(x+1)*(y-2)");
    // unknown index stays untouched
    CHECK(expand_line(store, "dd(7)") == "dd(7)");
}

TEST_CASE("session command language") {
    GatewaySession s(contract_desc);
    // masking on by default
    auto out = s.process_line("id ff = acc((d+1)/(d-1)+d);");
    CHECK(out == std::vector<std::string>{"id ff = dd(1);"});

    // @v substitutes stored values
    out = s.process_line("@vid dd(1) = @(1);");
    CHECK(out == std::vector<std::string>{"id dd(1) = (d^2+1)/(d-1);"});

    // @f0 turns simplification off: stored verbatim
    s.process_line("@f0");
    s.process_line("x = acc(1+1);");
    CHECK(s.store().entry(2) == "1+1");
    s.process_line("@f1");

    // @e1 switches to expansion mode
    s.process_line("@e1");
    out = s.process_line("use dd(2) here");
    CHECK(out == std::vector<std::string>{"use (1+1) here"});
    s.process_line("@e0");

    CHECK_THROWS_AS(s.command("@q nonsense"), UnknownCommand);
    CHECK_THROWS_AS(s.process_line("@v@(99)"), BadIndex);
}

TEST_CASE("store save/load round trip") {
    testutil::TempDir dir;
    auto f = dir.file("store.txt");

    MaskingStore a;
    a.add("(d^2+1)/(d-1)");
    a.add("x+y*z");
    a.add("42");
    a.save(f.string());

    MaskingStore b;
    b.add("stale entry; load must replace this");
    b.load(f.string());
    CHECK(a == b);
    CHECK(b.size() == 3);
    CHECK(b.entry(1) == "(d^2+1)/(d-1)");

    MaskingStore c;
    CHECK_THROWS_AS(c.load((dir.path() / "absent.txt").string()), FileError);
}

TEST_CASE("session @s/@r persists the store") {
    testutil::TempDir dir;
    auto f = dir.file("session-store.txt");

    GatewaySession s;
    s.process_line("a = acc(p+q);");
    s.process_line("b = acc(r);");
    s.command("@s " + f.string());

    GatewaySession t;
    t.command("@r " + f.string());
    CHECK(t.store() == s.store());
    CHECK(t.process_line("@vcheck @(2);") ==
          std::vector<std::string>{"check r;"});
}
