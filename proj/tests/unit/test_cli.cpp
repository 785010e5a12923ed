#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "bioace/cli/cli.hpp"
#include "test_support.hpp"

using test_support::TempDir;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bioace::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> with_fixture(std::vector<std::string> args, const std::filesystem::path& out,
                                      const std::filesystem::path& cache) {
    const auto dir = test_support::fixture_dir();
    std::vector<std::string> full{"--corpus", dir.string(), "--config", (dir / "config.json").string(),
                                  "--out",    out.string(), "--cache-dir", cache.string()};
    full.insert(full.end(), args.begin(), args.end());
    return full;
}

}  // namespace

TEST_CASE("validate succeeds on the fixture and fails on a broken corpus") {
    CHECK(cli({"--corpus", test_support::fixture_dir().string(), "validate"}).code == 0);

    TempDir dir;
    for (const auto& e : std::filesystem::directory_iterator(test_support::fixture_dir()))
        std::filesystem::copy_file(e.path(), dir / e.path().filename().string());
    auto runs = test_support::read_file(dir / "runs.jsonl");
    runs += R"({"system_id": "S9", "question_id": "q1", "sentences": [{"id": "z", "position": 0, "text": "x.", "citations": ["777"]}]})"
            "\n";
    test_support::write_file(dir / "runs.jsonl", runs);
    const auto bad = cli({"--corpus", dir.path().string(), "validate"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("777") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(cli({"eval", "correctness", "--mode", "bogus"}).code == 2);
    CHECK(cli({"no-such-command"}).code == 2);
    CHECK(cli({"--corpus", "/nonexistent/dir", "validate"}).code == 2);
}

TEST_CASE("malformed endpoint responses exit with code 3") {
    TempDir dir;
    test_support::write_file(dir / "fixture.json",
                             R"({"raw": [{"capability": "generate", "contains": "", "response": {"unexpected": 1}}]})");
    test_support::write_file(dir / "config.json", R"({"fixture": "fixture.json"})");
    const auto r = cli({"--corpus", test_support::fixture_dir().string(), "--config", (dir / "config.json").string(),
                        "--out", (dir / "out").string(), "eval", "completeness"});
    CHECK(r.code == 3);
    CHECK(r.err.find("MalformedResponse") != std::string::npos);
}

TEST_CASE("evaluations write byte-identical reports on cold and warm caches") {
    TempDir dir;
    const std::vector<std::vector<std::string>> commands{
        {"eval", "nuggets"},
        {"eval", "completeness"},
        {"eval", "correctness", "--mode", "simnli"},
        {"eval", "correctness", "--mode", "classify", "--judge", "nli"},
        {"eval", "citations", "--setting", "nuggets"},
        {"eval", "citations", "--setting", "maxsim", "--scheme", "ternary"}};
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto cold = dir / ("cold" + std::to_string(i));
        const auto warm = dir / ("warm" + std::to_string(i));
        REQUIRE(cli(with_fixture(commands[i], cold, dir / "cache")).code == 0);
        REQUIRE(cli(with_fixture(commands[i], warm, dir / "cache")).code == 0);
        for (const char* f : {"report.json", "summary.csv", "plotdata.csv"})
            CHECK(test_support::read_file(cold / f) == test_support::read_file(warm / f));
    }
}

TEST_CASE("topk plot data lists every k") {
    TempDir dir;
    REQUIRE(cli(with_fixture({"eval", "correctness", "--mode", "topk", "--judge", "nli"}, dir / "out", dir / "cache"))
                .code == 0);
    const auto plot = test_support::read_file(dir / "out" / "plotdata.csv");
    for (int k = 10; k <= 100; k += 10) CHECK(plot.find("," + std::to_string(k) + ",") != std::string::npos);
}

TEST_CASE("rank and report subcommands") {
    TempDir dir;
    REQUIRE(cli(with_fixture({"eval", "completeness"}, dir / "c", dir / "cache")).code == 0);
    const auto ranked = cli({"--out", (dir / "rank").string(), "rank", "--metrics", (dir / "c" / "summary.csv").string(),
                             "--metric", "completeness"});
    CHECK(ranked.code == 0);
    const auto again = cli({"--out", (dir / "again").string(), "report", "--from", (dir / "c" / "report.json").string()});
    CHECK(again.code == 0);
    CHECK(test_support::read_file(dir / "again" / "report.json") == test_support::read_file(dir / "c" / "report.json"));
}

TEST_CASE("the installed binary reports exit codes") {
    const std::string bin = BIOACE_CLI_PATH;
    const auto fixture = test_support::fixture_dir().string();
    const int ok = std::system((bin + " --corpus " + fixture + " validate > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(ok) == 0);
    const int bad = std::system((bin + " --corpus /nonexistent validate > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(bad) == 2);
}
