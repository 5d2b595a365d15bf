#include <doctest.h>

#include "extchan/script.hpp"
#include "test_util.hpp"

#include <chrono>
#include <sstream>
#include <string>

using namespace extchan;
using namespace std::chrono_literals;

namespace {

struct Run {
    std::ostringstream out, diag;
    int rc;
    explicit Run(const std::string& source) {
        ChannelRegistry reg;
        reg.set_read_deadline(5s);
        Interpreter interp(reg, out, diag);
        rc = interp.run_source(source);
    }
};

} // namespace

TEST_CASE("parse: channel instructions") {
    auto prog = parse_script("#external \"n1\" cat -u\n");
    REQUIRE(prog.size() == 1);
    CHECK(prog[0].kind == Instruction::Kind::External);
    CHECK(prog[0].has_var);
    CHECK(prog[0].a == "n1");
    CHECK(prog[0].b == "cat -u");

    prog = parse_script("#external grep pattern\n");
    REQUIRE(prog.size() == 1);
    CHECK_FALSE(prog[0].has_var);
    CHECK(prog[0].b == "grep pattern");

    prog = parse_script("#fromexternal \"tmp\" 1\n");
    REQUIRE(prog.size() == 1);
    CHECK(prog[0].kind == Instruction::Kind::FromExternal);
    CHECK(prog[0].has_var);
    CHECK(prog[0].a == "tmp");
    CHECK(prog[0].maxlength == 1);

    prog = parse_script("#fromexternal+\n#fromexternal-\n#fromexternal\n");
    REQUIRE(prog.size() == 3);
    CHECK(prog[0].echo_flag == 1);
    CHECK(prog[1].echo_flag == -1);
    CHECK(prog[2].echo_flag == 0);

    prog = parse_script("#prompt READY\n#prompt\n");
    REQUIRE(prog.size() == 2);
    CHECK(prog[0].a == "READY");
    CHECK(prog[1].a == "");
}

TEST_CASE("parse: comments vanish, data lines survive verbatim") {
    auto prog = parse_script("* a comment\n  Local x=1;\n");
    REQUIRE(prog.size() == 1);
    CHECK(prog[0].kind == Instruction::Kind::Data);
    CHECK(prog[0].a == "  Local x=1;");
}

TEST_CASE("parse: malformed input is a syntax error with the line number") {
    CHECK_THROWS_AS(parse_script("#frobnicate\n"), SyntaxError);
    CHECK_THROWS_AS(parse_script("#toexternal \"no closing quote\n"), SyntaxError);
    CHECK_THROWS_AS(parse_script("#external\n"), SyntaxError);
    CHECK_THROWS_AS(parse_script("#do i\n"), SyntaxError);
    try {
        parse_script("* ok\n#bogus\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("the worked two-channel example runs byte-exact") {
    const std::string script = R"(  symbol a,b;

  #external "n1" cat -u

  #external "n2" cat -u

  *  cat simply repeats its input. The default prompt is an
  *  empty line. So we use "\n\n" here -- one "\n" is to finish
  *  the line, and the next "\n" is the prompt:
  #toexternal "(a+b)^2\n\n"

  #setexternal `n1'
  *  For this channel the prompt will be "READY\n":
  #toexternal "(a+b)^3\nREADY\n"

  #setexternal `n2'
  *  Set the default prompt:
  #prompt
  Local aPLUSbTO2=
  #fromexternal
         ;

  #setexternal `n1'
  #prompt READY
  Local aPLUSbTO3=
  #fromexternal
         ;

  #rmexternal `n1'
  #rmexternal `n2'

  Print;
  .end
)";
    Run r(script);
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "aPLUSbTO2 = (a+b)^2\naPLUSbTO3 = (a+b)^3\n");
    CHECK(r.diag.str() == "");
}

TEST_CASE("do loops expand their variable per pass") {
    Run r("#do i=1,3\n#echo \"pass `i'\"\n#enddo\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "pass 1\npass 2\npass 3\n");
}

TEST_CASE("do loops nest") {
    Run r("#do i=1,2\n#do j=1,2\n#echo \"`i'`j'\"\n#enddo\n#enddo\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "11\n12\n21\n22\n");
}

TEST_CASE("an empty do range runs zero times") {
    Run r("#do i=3,2\n#echo \"never\"\n#enddo\n#echo \"after\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "after\n");
}

TEST_CASE("define feeds backtick interpolation everywhere") {
    Run r("#define who \"world\"\n#echo \"hello `who'\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "hello world\n");
}

TEST_CASE("undefined variables fail the run and name the line") {
    Run r("#echo \"ok\"\n#echo \"`nosuch'\"\n");
    CHECK(r.rc == 1);
    CHECK(r.out.str() == "ok\n");
    CHECK(r.diag.str().find("line 2") != std::string::npos);
    CHECK(r.diag.str().find("nosuch") != std::string::npos);
}

TEST_CASE("maxlength truncates into the variable and realigns the stream") {
    Run r("#external cat\n"
          "#toexternal \"abcdefgh\\n\\n\"\n"
          "#fromexternal \"v\" 3\n"
          "#toexternal \"next\\n\\n\"\n"
          "#fromexternal \"w\"\n"
          "#echo \"`v'-`w'\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "abc-next\n");
}

TEST_CASE("fromexternal+ lists the fetched text even without a variable") {
    Run r("#external cat\n"
          "#toexternal \"plain text line\\n\\n\"\n"
          "#fromexternal+ \"v\"\n"
          "#echo \"got `v'\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "plain text line\ngot plain text line\n");
}

TEST_CASE("rmexternal 0 removes every channel") {
    Run r("#external cat\n"
          "#external cat\n"
          "#rmexternal 0\n"
          "#toexternal \"x\"\n");
    CHECK(r.rc == 1);
    CHECK(r.diag.str().find("no current external channel") != std::string::npos);
}

TEST_CASE("rmexternal without argument removes the current channel") {
    Run r("#external \"c1\" cat\n"
          "#external \"c2\" cat\n"
          "#rmexternal\n"
          "#setexternal `c1'\n"
          "#toexternal \"still here\\n\\n\"\n"
          "#fromexternal \"v\"\n"
          "#echo \"`v'\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "still here\n");
}

TEST_CASE("pipe output is spliced as program text") {
    Run r("Local p=\n"
          "#pipe echo '1+1'\n"
          ";\n"
          "print;\n"
          ".end\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "p = 1+1\n");
}

TEST_CASE("pipe splicing may carry instructions, not just data") {
    Run r("#pipe printf '#echo \"from the pipe\"\\n'\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "from the pipe\n");
}

TEST_CASE("system and pipe produce the same spliced program") {
    testutil::TempDir dir;
    auto f = dir.file("exchange.txt");
    std::string via_system = "#system echo 'Local s=42;' > " + f.string() + "\n" +
                             "#pipe cat " + f.string() + "\n" +
                             "print;\n.end\n";
    Run rs(via_system);
    CHECK(rs.rc == 0);
    CHECK(rs.out.str() == "s = 42\n");

    Run rp("#pipe echo 'Local s=42;'\nprint;\n.end\n");
    CHECK(rp.rc == 0);
    CHECK(rp.out.str() == rs.out.str());
}

TEST_CASE("write appends expanded lines; remove deletes the file") {
    testutil::TempDir dir;
    auto f = dir.file("out.txt");
    Run r("#define v \"payload\"\n"
          "#write <" + f.string() + "> \"line one `v'\"\n"
          "#write <" + f.string() + "> \"line two\"\n");
    CHECK(r.rc == 0);
    CHECK(testutil::read_file(f) == "line one payload\nline two\n");

    Run r2("#remove <" + f.string() + ">\n");
    CHECK(r2.rc == 0);
    CHECK_FALSE(std::filesystem::exists(f));
}

TEST_CASE(".end stops execution immediately") {
    Run r("#echo \"before\"\n.end\n#echo \"after\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "before\n");
}

TEST_CASE("dot lines other than .end are inert") {
    Run r(".sort\n#echo \"alive\"\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "alive\n");
}

TEST_CASE("locals can be redefined and dropped") {
    Run r("Local a=1;\n"
          "Local b=2;\n"
          "Local a=3;\n"
          "Drop b;\n"
          "print;\n.end\n");
    CHECK(r.rc == 0);
    CHECK(r.out.str() == "a = 3\n");
}

TEST_CASE("identical scripts produce identical output") {
    const std::string script = "#external cat\n"
                               "#toexternal \"ping\\n\\n\"\n"
                               "#fromexternal \"v\"\n"
                               "#echo \"`v'\"\n";
    Run a(script), b(script);
    CHECK(a.rc == 0);
    CHECK(a.out.str() == b.out.str());
}
