// Drives the installed command-line binary end to end.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"

#ifndef CTLDL_CLI_PATH
#error "CTLDL_CLI_PATH must point at the ctldl binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CTLDL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/ctldl_cli_") + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("mc prints the truth set one state per line") {
  const auto k = temp_file("k.txt",
                           "state a p\n"
                           "state b\n"
                           "edge a b\n"
                           "edge b a\n");
  const auto r = run_cli("mc --kripke " + k + " --formula \"E[ true U p ]\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "a\nb\n");

  const auto r2 = run_cli("mc --kripke " + k + " --formula \"p & !p\"");
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.empty());
}

TEST_CASE("translate ctl2std reproduces the globally-example rules") {
  const auto r = run_cli("translate --direction ctl2std --formula \"E[ false ~U p ]\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "% goal: G\n"
        "G1(X) :- W(X).\n"
        "G2(X) :- W(X), !G1(X).\n"
        "G3(X) :- P0(X).\n"
        "G(X) :- G2(X), G3(X).\n"
        "G(X) :- G3(X), !A(X).\n"
        "G(X) :- B1(X,X).\n"
        "G(X) :- G3(X), R(X,Y), G(Y).\n"
        "B1(X,Y) :- G3(X), R(X,Y), G3(Y).\n"
        "B1(X,Y) :- G3(X), R(X,U), B1(U,Y).\n"
        "A(X) :- R(X,Y).\n"
        "W(X) :- R(X,Y).\n"
        "W(X) :- R(Y,X).\n"
        "W(X) :- P0(X).\n");
}

TEST_CASE("translate output round-trips through std2ctl") {
  const auto prog = run_cli("translate --direction ctl2std --formula \"EX p & E[ p U q ]\"");
  REQUIRE(prog.exit_code == 0);
  const auto file = temp_file("prog.dl", prog.out);
  const auto back = run_cli("translate --direction std2ctl --input " + file);
  CHECK(back.exit_code == 0);
  CHECK(back.out == "EX p0 & E[ p0 U p1 ]\n");
}

TEST_CASE("eval engines agree") {
  const auto prog = temp_file("eval.dl",
                              "% goal: G\n"
                              "G(X) :- G2(X).\n"
                              "G(X) :- G1(X), R(X,Y), G(Y).\n"
                              "G1(X) :- P0(X).\n"
                              "G2(X) :- P1(X).\n");
  const auto db = temp_file("eval.facts",
                            "R(a,b).\nR(b,c).\nP0(a).\nP0(b).\nP1(c).\n");
  const auto direct = run_cli("eval --program " + prog + " --database " + db);
  CHECK(direct.exit_code == 0);
  CHECK(direct.out == "G(a).\nG(b).\nG(c).\n");
  const auto via = run_cli("eval --program " + prog + " --database " + db + " --engine via-ctl");
  CHECK(via.exit_code == 0);
  CHECK(via.out == direct.out);
}

TEST_CASE("eval succ engine defaults cmax to the domain size") {
  const auto prog = temp_file("succ.dl",
                              "% goal: C\n"
                              "C(X,1) :- P0(X), S0(X,Y).\n"
                              "C(X,N) :- P0(X), S0(X,Y), C(Y,N-1), N <= cmax.\n");
  const auto db = temp_file("succ.facts", "S0(a,a).\nP0(a).\n");
  const auto r = run_cli("eval --program " + prog + " --database " + db + " --engine succ");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "C(a,1).\n");
  const auto r3 = run_cli("eval --program " + prog + " --database " + db +
                          " --engine succ --cmax 3");
  CHECK(r3.out == "C(a,1).\nC(a,2).\nC(a,3).\n");
}

TEST_CASE("closure output is re-readable and idempotent") {
  const auto db = temp_file("closure.facts", "R(a,b).\nP0(c).\n");
  const auto once = run_cli("closure --database " + db);
  CHECK(once.exit_code == 0);
  CHECK(once.out == "P0(c).\nR(a,b).\nR(b,b).\nR(c,c).\n");
  const auto file = temp_file("closure2.facts", once.out);
  const auto twice = run_cli("closure --database " + file);
  CHECK(twice.out == once.out);
}

TEST_CASE("normalize") {
  const auto enf = run_cli("normalize --form enf --formula \"A[ p U q ]\"");
  CHECK(enf.exit_code == 0);
  CHECK(enf.out == "!E[ !p ~U !q ]\n");
  const auto pnf = run_cli("normalize --form pnf --formula \"!(p & EX q)\"");
  CHECK(pnf.out == "!p | AX !q\n");
}

TEST_CASE("sat and contains exit codes") {
  CHECK(run_cli("sat --formula \"p & !p\" --bound 3").exit_code == 1);
  const auto sat = run_cli("sat --formula \"EX p & !p\" --bound 3");
  CHECK(sat.exit_code == 0);
  CHECK(sat.out.find("# witness state: s0") == 0);

  CHECK(run_cli("contains --f1 \"q\" --f2 \"E[ true U q ]\" --bound 3").exit_code == 0);
  const auto cex = run_cli("contains --f1 \"E[ true U q ]\" --f2 \"q\" --bound 3");
  CHECK(cex.exit_code == 1);
  CHECK(cex.out.find("state") != std::string::npos);
}

TEST_CASE("roundtrip succeeds on translatable formulas") {
  const auto r = run_cli("roundtrip --formula \"A[ p U q ]\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("enf: !E[ !p ~U !q ]") == 0);
  CHECK(r.out.find("recovered: !E[ !p ~U !q ]\n") != std::string::npos);
}

TEST_CASE("bench emits a csv table") {
  const auto r = run_cli("bench --sizes 50,100 --reps 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("size,route,millis\n", 0) == 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 1 + 4);  // header + two routes per size

  const auto empty = run_cli("bench --reps 1");
  CHECK(empty.out == "size,route,millis\n");
}

TEST_CASE("output is byte-identical across runs") {
  const auto k = temp_file("det.txt",
                           "state a p\nstate b q\nstate c\nedge a b\nedge b c\nedge c a\n");
  const std::string cmd = "mc --kripke " + k + " --formula \"E[ p U q ] | AX !p\"";
  const auto first = run_cli(cmd);
  const auto second = run_cli(cmd);
  CHECK(first.out == second.out);
  const auto t1 = run_cli("translate --direction ctl2tds --formula \"A[ p ~U q ]\"");
  const auto t2 = run_cli("translate --direction ctl2tds --formula \"A[ p ~U q ]\"");
  CHECK(t1.out == t2.out);
}

TEST_CASE("usage and parse errors exit with 2") {
  CHECK(run_cli("mc --kripke missing.txt --formula p").exit_code == 2);
  CHECK(run_cli("nonsense").exit_code == 2);
  CHECK(run_cli("normalize --form enf --formula \"p &\"").exit_code == 2);
  const auto k = temp_file("err.txt", "state a\nedge a a\n");
  CHECK(run_cli("mc --kripke " + k + " --formula \"zz\"").exit_code == 2);
}
