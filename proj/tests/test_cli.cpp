#include <doctest.h>

#include <fstream>
#include <sstream>

#include "dqsim/circuit_io.hpp"
#include "dqsim/harness.hpp"
#include "dqsim/random_instances.hpp"

using namespace dqsim;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kHadamardDoc = R"({"qubits":1,"sequence":[[{"g":"h","t":0}]]})";

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/dqsim_test_" + name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    return path;
}

}  // namespace

TEST_CASE("circuit documents round-trip through parse and serialize") {
    SplitMix64 rng(401);
    CircuitSequence seq;
    seq.n_qubits = 3;
    seq.circuits.push_back(random_circuit(3, 7, rng));
    seq.circuits.push_back(random_circuit(3, 5, rng));
    Circuit extras;
    extras.n_qubits = 3;
    extras.gates.emplace_back(HadamardLayerGate{{0, 2}});
    extras.gates.emplace_back(XorOracleGate{{1u, 0u, 3u, 2u}, {0, 1}, {2}});
    extras.gates.emplace_back(PermutationGate{{7, 6, 5, 4, 3, 2, 1, 0}});
    extras.gates.emplace_back(PhaseFlipGate{5});
    seq.circuits.push_back(extras);

    const std::string text = serialize_circuit_document(seq);
    const CircuitSequence back = parse_circuit_document(text);
    CHECK(back == seq);
    CHECK(parse_circuit_document(serialize_circuit_document(back)) == seq);
}

TEST_CASE("parser rejects malformed documents with a located diagnostic") {
    CHECK_THROWS_AS(parse_circuit_document("{"), ParseError);
    CHECK_THROWS_AS(parse_circuit_document(R"({"qubits":1})"), ParseError);
    CHECK_THROWS_AS(parse_circuit_document(R"({"qubits":1,"sequence":[]})"), ParseError);

    try {
        parse_circuit_document(R"({"qubits":1,"sequence":[[{"g":"warp","t":0}]]})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("sequence[0][0]") != std::string::npos);
        CHECK(std::string(e.what()).find("warp") != std::string::npos);
    }

    try {
        parse_circuit_document(R"({"qubits":1,"sequence":[[{"g":"h"}]]})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("missing field 't'") != std::string::npos);
    }
}

TEST_CASE("dynamics command prints the fair-coin column for one Hadamard") {
    const std::string path = write_temp("h.json", kHadamardDoc);
    const CliResult r = run({"dynamics", path, "--model", "sd", "--state", "basis:0"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.5 0.5") != std::string::npos);
    CHECK(r.out.find("marginalization_residual") != std::string::npos);

    const CliResult identity = run({"dynamics", path, "--model", "sd", "--state", "plus"});
    CHECK(identity.code == 0);
    CHECK(identity.out.find("1 0") != std::string::npos);  // |+> lands on 0 surely
}

TEST_CASE("dynamics command exit codes") {
    const std::string bad = write_temp("bad.json", R"({"qubits":1,"sequence":[[{"g":"nope"}]]})");
    const CliResult parse_fail = run({"dynamics", bad});
    CHECK(parse_fail.code == 2);
    CHECK(parse_fail.err.find("error:") != std::string::npos);

    const CliResult missing = run({"dynamics", "/tmp/dqsim_no_such_file.json"});
    CHECK(missing.code == 2);

    const CliResult no_file = run({"dynamics"});
    CHECK(no_file.code == 2);
}

TEST_CASE("sample command: JSONL shape and byte determinism") {
    const std::string path = write_temp(
        "hh.json", R"({"qubits":1,"sequence":[[{"g":"h","t":0}],[{"g":"h","t":0}]]})");
    const std::vector<std::string> args{"sample", path, "--shots", "50", "--seed", "5"};
    const CliResult a = run(args);
    const CliResult b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    std::istringstream lines(a.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.find("\"type\":\"header\"") != std::string::npos);
    CHECK(line.find("\"born_marginals\":[[0.5,0.5],[1,0]]") != std::string::npos);
    std::size_t shots = 0;
    while (std::getline(lines, line)) {
        CHECK(line.find("\"history\":[") != std::string::npos);
        // the second value is always zero for separated Hadamards
        CHECK(line.find(",0]}") != std::string::npos);
        ++shots;
    }
    CHECK(shots == 50);

    // 1-thread and 2-thread runs agree byte for byte
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "2"});
    auto single = args;
    single.insert(single.end(), {"--threads", "1"});
    CHECK(run(threaded).out == run(single).out);
}

TEST_CASE("sample command rejects an empty sequence") {
    const std::string path = write_temp("empty.json", R"({"qubits":1,"sequence":[]})");
    CHECK(run({"sample", path}).code == 2);
}

TEST_CASE("check command passes on the built-in corpus") {
    const CliResult r = run({"check", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("property,model,instance,value,threshold,status") != std::string::npos);
    CHECK(r.out.find("expected-fail: pass") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("MISSING") == std::string::npos);

    // deterministic given the seed
    CHECK(run({"check", "--seed", "7"}).out == r.out);
}

TEST_CASE("collision-demo emits a verdict row") {
    const CliResult close =
        run({"collision-demo", "--gen", "identical", "--n", "3", "--seed", "3",
             "--repetitions", "200"});
    CHECK(close.code == 0);
    CHECK(close.out.find("gen,n,model,repetitions,histories,flips,flip_rate,verdict") !=
          std::string::npos);
    CHECK(close.out.find("close") != std::string::npos);

    const CliResult far = run({"collision-demo", "--gen", "disjoint", "--n", "3", "--seed", "3",
                               "--repetitions", "200"});
    CHECK(far.code == 0);
    CHECK(far.out.find(",far") != std::string::npos);
    CHECK(far.out.find(",0,0,") != std::string::npos);  // zero flips, zero rate

    CHECK(run({"collision-demo", "--gen", "bogus"}).code == 2);
}

TEST_CASE("search-demo and bench-search share the CSV contract") {
    const std::vector<std::string> args{"search-demo", "--n-items", "16",  "--grover-iters", "1",
                                        "--shots",     "200",      "--seed", "11"};
    const CliResult r = run(args);
    CHECK(r.code == 0);
    CHECK(r.out.rfind("N,queries,juggle_rounds,shots,success,stderr\n", 0) == 0);
    CHECK(run(args).out == r.out);

    const CliResult bench = run({"bench-search", "--n-items", "16", "--shots", "100", "--seed",
                                 "13", "--juggle-rounds", "2"});
    CHECK(bench.code == 0);
    std::istringstream lines(bench.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "N,queries,juggle_rounds,shots,success,stderr");
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 2);  // full and half budget
}

TEST_CASE("output redirection writes the same bytes to a file") {
    const std::string path = write_temp("h2.json", kHadamardDoc);
    const std::string out_path = "/tmp/dqsim_test_out.txt";
    const CliResult direct = run({"dynamics", path, "--seed", "1"});
    const CliResult redirected = run({"dynamics", path, "--seed", "1", "-o", out_path});
    CHECK(redirected.code == 0);
    CHECK(redirected.out.empty());
    std::ifstream f(out_path, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == direct.out);
}
