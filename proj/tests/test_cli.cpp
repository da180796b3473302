#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cli_support.hpp"

using nlohmann::json;

namespace {

std::string fixture_dimacs() {
    std::string path = "/tmp/aitlab_cli_fixture.cnf";
    std::ofstream out(path);
    out << "c tiny fixture\np cnf 3 2\n1 2 0\n-1 3 0\n";
    return path;
}

}  // namespace

TEST_CASE("sat and count against schemas") {
    json sat = cli::run_validated("sat", "--expr 'x1 & !x1' --no-timestamp");
    CHECK(sat["results"]["satisfiable"] == false);

    json count = cli::run_validated("count", "--dimacs " + fixture_dimacs() + " --no-timestamp");
    CHECK(count["results"]["n"] == 3);
    CHECK(count["results"]["length"] == 8);
}

TEST_CASE("table writes packed bits plus the sidecar") {
    std::string bin = "/tmp/aitlab_cli_table.bin";
    json t = cli::run_validated("table", "--expr 'x1 & x2' --out " + bin + " --no-timestamp");
    CHECK(t["results"]["ones"] == 1);
    std::ifstream in(bin, std::ios::binary);
    char byte = 0;
    in.read(&byte, 1);
    CHECK(static_cast<unsigned char>(byte) == 0x08);  // bits 0,0,0,1 LSB-first
    json sidecar;
    std::ifstream side(bin + ".json");
    side >> sidecar;
    CHECK(sidecar["n"] == 2);
    CHECK(sidecar["k"] == 1);
    CHECK(sidecar["gamma_num"] == 1);
    CHECK(sidecar["gamma_den"] == 4);
}

TEST_CASE("posp sharpsat bd flow") {
    json posp = cli::run_validated("posp", "--expr 'x1 | x2' --threshold 3/8 --no-timestamp");
    CHECK(posp["results"]["exceeds"] == true);

    json ss = cli::run_validated("sharpsat", "--expr 'x1 | x2' --check --no-timestamp");
    CHECK(ss["results"]["k"] == 3);
    CHECK(ss["results"]["check_direct_count"] == 3);
    CHECK(ss["results"]["query_count"].get<int>() <= 3);

    json bd = cli::run_validated("bd", "--expr 'x1 & x2' --g0 1/4 --g1 3/4 --check-promise --no-timestamp");
    CHECK(bd["results"]["answer"] == "g0");
    CHECK(bd["results"]["promise_holds"] == true);
}

TEST_CASE("toy machine subcommands against schemas") {
    json ke = cli::run_validated("kexact", "--x 1 --max-len 6 --budget 1000 --no-timestamp");
    CHECK(ke["results"]["k_upper"] == 4);
    CHECK(ke["results"]["exhaustive"] == true);
    CHECK(ke["instruction_set"] == "toy-1");

    json up = cli::run_validated("uprob", "--x '' --mode exact --max-len 2 --budget 100 --no-timestamp");
    CHECK(up["results"]["pu"]["num"] == 1);
    CHECK(up["results"]["pu"]["den"] == 4);

    json kr = cli::run_validated("kraft", "--max-len 12 --budget 10000 --no-timestamp");
    CHECK(kr["results"]["le_one"] == true);

    json cg = cli::run_validated("codinggap", "--x '' --max-len 2 --budget 100 --no-timestamp");
    CHECK(cg["results"]["gap"].get<double>() == doctest::Approx(0.0));

    json cen = cli::run_validated("census", "--len 8 --max-len 12 --budget 10000 --no-timestamp");
    CHECK(cen["results"]["partial"] == false);

    json pr = cli::run_validated("predict", "--prefix 0000 --max-len 14 --budget 10000 --no-timestamp");
    CHECK(pr["results"]["p0_real"].get<double>() > pr["results"]["p1_real"].get<double>());

    json ss = cli::run_validated("sseries", "--mu dirac0 --horizon 6 --max-len 14 --budget 10000 --no-timestamp");
    CHECK(ss["results"]["entries"].size() == 6);
}

TEST_CASE("distinguishability subcommands against schemas") {
    json sd = cli::run_validated("statdist", "--p1 0.25 --p2 0.75 --m 100 --no-timestamp");
    CHECK(sd["results"]["distance"].get<double>() == doctest::Approx(0.5235987755982988));
    CHECK(sd["results"]["report"]["distinguishable"] == true);

    json th = cli::run_validated("theta", "--theta1 0 --theta2 1.5707963267948966 --m 100 --no-timestamp");
    CHECK(th["results"]["distance_integral"].get<double>() ==
          doctest::Approx(1.5707963267948966).epsilon(1e-9));

    json pk = cli::run_validated("pack", "--p1 0.1 --p2 0.9 --m 10000 --no-timestamp");
    CHECK(pk["results"]["entries"].size() == 1);

    json mt = cli::run_validated("mintrials", "--p2 0.125 --no-timestamp");
    CHECK(mt["results"]["m"] == 7);

    json mc = cli::run_validated("mc", "--p-true 0 --p1 0 --p2 0.25 --m 10 --runs 100 --seed 7 --no-timestamp");
    CHECK(mc["results"]["decided_p1"] == 100);
    CHECK(mc["seed"] == 7);

    json en = cli::run_validated("entropy", "--gamma 1/2 --no-timestamp");
    CHECK(en["results"]["entropy"].get<double>() == doctest::Approx(1.0));

    json cl = cli::run_validated("classify", "--expr 'x1 & x2' --no-timestamp");
    CHECK(cl["results"]["class"] == "Type1");

    json sa = cli::run_validated("sample", "--n 6 --count 50 --density 3.0 --seed 42 --no-timestamp");
    CHECK(sa["results"]["count"] == 50);
}

TEST_CASE("exit codes") {
    CHECK(cli::run("nosuchcommand").exit_code == 1);
    CHECK(cli::run("sat").exit_code == 1);  // missing --expr/--dimacs
    CHECK(cli::run("sat --dimacs /nonexistent.cnf").exit_code == 2);
    CHECK(cli::run("kexact --x 0000 --max-len 4").exit_code == 3);
    CHECK(cli::run("predict --prefix 0101101001 --max-len 8 --budget 1000").exit_code == 3);
    CHECK(cli::run("codinggap --x 0000 --max-len 4").exit_code == 3);
    // parse error in the formula text
    std::string bad = "/tmp/aitlab_cli_bad.cnf";
    std::ofstream(bad) << "p cnf 2 1\n3 0\n";
    CHECK(cli::run("sat --dimacs " + bad).exit_code == 2);
}

TEST_CASE("seeded and enumerative outputs are byte-identical across runs and threads") {
    // max_len 17 exercises the block-parallel enumeration path; --nvars 18
    // exercises the chunked table path.
    for (const std::string& args :
         {std::string("kraft --max-len 17 --budget 10000 --no-timestamp"),
          std::string("kexact --x 0110 --max-len 16 --budget 10000 --no-timestamp"),
          std::string("census --len 8 --max-len 16 --budget 10000 --no-timestamp"),
          std::string("mc --p-true 0.5 --p1 0.25 --p2 0.5 --m 30 --runs 500 --seed 11 --no-timestamp"),
          std::string("sample --n 6 --count 40 --density 3.0 --seed 5 --no-timestamp"),
          std::string("sseries --mu dirac0 --horizon 8 --max-len 16 --budget 10000 --no-timestamp"),
          std::string("table --expr 'x1 | (x2 & !x3)' --nvars 18 --no-timestamp")}) {
        cli::RunOutput a = cli::run(args + " --threads 1");
        cli::RunOutput b = cli::run(args + " --threads 1");
        cli::RunOutput c = cli::run(args + " --threads 4");
        CHECK(a.exit_code == 0);
        CHECK(a.stdout_text == b.stdout_text);  // across runs
        CHECK(a.stdout_text == c.stdout_text);  // across thread counts
    }
}

TEST_CASE("manifest carries the full parameter echo") {
    json ke = cli::run_validated("kexact", "--x 10 --max-len 10 --budget 500 --no-timestamp");
    CHECK(ke["params"]["x"] == "10");
    CHECK(ke["params"]["max_len"] == 10);
    CHECK(ke["params"]["budget"] == 500);
    CHECK(ke["subcommand"] == "kexact");
    CHECK(ke["tool"] == "aitlab");
}
