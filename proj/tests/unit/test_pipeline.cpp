#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "loopback.hpp"
#include "infodensity/error.hpp"
#include "infodensity/report/emit.hpp"
#include "infodensity/util/hash.hpp"
#include "infodensity/util/jsonl.hpp"

using namespace infodensity;
using namespace infodensity::report;

namespace {

int run_cli(const std::string& args) {
    const auto cmd = fmt::format("'{}' {} >/dev/null 2>&1", INFODENSITY_CLI, args);
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t total_calls(const std::vector<std::shared_ptr<fixtures::ScriptedChat>>& seen) {
    std::size_t n = 0;
    for (const auto& c : seen) n += c->calls;
    return n;
}

Providers counting_providers(std::vector<std::shared_ptr<fixtures::ScriptedChat>>& seen) {
    auto p = fixtures::mock_providers();
    p.chat = [&seen](const modeleval::ModelEndpoint& e) -> std::shared_ptr<modeleval::ChatClient> {
        auto c = std::make_shared<fixtures::ScriptedChat>(
            [name = e.name](const modeleval::ChatRequest& r) { return fixtures::mock_reply(name, r); });
        seen.push_back(c);
        return c;
    };
    return p;
}

} // namespace

TEST_CASE("run directory lock is exclusive") {
    fixtures::TempDir dir;
    {
        RunDir a(dir / "run");
        CHECK(std::filesystem::exists(dir / "run" / "run.lock"));
        CHECK_THROWS_AS(RunDir(dir / "run"), ValidationError);
    }
    CHECK_FALSE(std::filesystem::exists(dir / "run" / "run.lock"));
    CHECK_NOTHROW(RunDir(dir / "run"));
}

TEST_CASE("changed manifest is detected") {
    fixtures::TempDir dir;
    const auto manifest = fixtures::write_mock_corpus(dir / "corpus");
    RunDir run(dir / "run");
    ingest(run, fixtures::mock_config(dir / "store.bin"), manifest);
    const auto loaded = load_run(run);
    CHECK(loaded.samples.size() == fixtures::kMockSamples);
    std::ofstream(manifest, std::ios::app) << "\n";
    CHECK_THROWS_AS(load_run(run), ValidationError);

    RunDir fresh(dir / "other");
    CHECK_THROWS_AS(load_run(fresh), ValidationError);
}

TEST_CASE("model evaluation resumes from its record log") {
    fixtures::TempDir dir;
    const auto manifest = fixtures::write_mock_corpus(dir / "corpus");
    RunDir run(dir / "run");
    const auto config = fixtures::mock_config(dir / "store.bin");
    ingest(run, config, manifest);

    std::vector<std::shared_ptr<fixtures::ScriptedChat>> seen;
    const auto providers = counting_providers(seen);
    model_eval_difficulty(run, config, providers);
    const auto first = total_calls(seen);
    CHECK(first >= 3 * 5 * fixtures::kMockSamples);
    const auto before = read_file_bytes((run.records() / "difficulty.json").string());

    seen.clear();
    model_eval_difficulty(run, config, providers);
    CHECK(total_calls(seen) == 0);
    CHECK(read_file_bytes((run.records() / "difficulty.json").string()) == before);
}

TEST_CASE("provider failures still write the artifact") {
    fixtures::TempDir dir;
    const auto manifest = fixtures::write_mock_corpus(dir / "corpus");
    RunDir run(dir / "run");
    const auto config = fixtures::mock_config(dir / "store.bin");
    ingest(run, config, manifest);

    auto providers = fixtures::mock_providers();
    providers.chat = [](const modeleval::ModelEndpoint& e) -> std::shared_ptr<modeleval::ChatClient> {
        return std::make_shared<fixtures::ScriptedChat>([name = e.name](const modeleval::ChatRequest& r) {
            if (name == "m2") throw ProviderError("down");
            return fixtures::mock_reply(name, r);
        });
    };
    CHECK_THROWS_AS(model_eval_difficulty(run, config, providers), ProviderError);
    CHECK(std::filesystem::exists(run.records() / "difficulty.json"));
}

TEST_CASE("mock pipeline produces the scripted report") {
    fixtures::TempDir dir;
    const auto root = fixtures::run_mock_pipeline(dir.path());
    const auto reports = load_reports({root});
    REQUIRE(reports.size() == 1);
    const auto& r = reports[0];

    REQUIRE(r.difficulty);
    CHECK(r.difficulty->jun == doctest::Approx(9.0 / 30));
    CHECK(r.difficulty->ext == doctest::Approx(4.0 / 30));
    CHECK(r.difficulty->amb == doctest::Approx(4.0 / 30));
    CHECK(r.difficulty->overlap == doctest::Approx(1.0 / 30));

    REQUIRE(r.fallacy);
    CHECK(r.fallacy->all == doctest::Approx(4.0 / 9));
    CHECK(r.fallacy->que == doctest::Approx(1.0 / 9));
    CHECK(r.fallacy->ano == doctest::Approx(2.0 / 9));
    CHECK(r.fallacy->amb == doctest::Approx(1.0 / 9));
    CHECK(r.provenance.at("fallacy") == "human");
    CHECK(r.provenance.at("difficulty") == "model");

    REQUIRE(r.redundancy);
    REQUIRE(r.diversity);
    CHECK(r.aligned_samples == fixtures::kMockSamples);
    CHECK(check_identities(r).empty());
    CHECK(std::filesystem::exists(root / "reports" / "report.csv"));
    CHECK(std::filesystem::exists(root / "reports" / "report.md"));
}

TEST_CASE("cli exit codes") {
    fixtures::TempDir dir;
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli(fmt::format("ingest --run '{}' --manifest '{}'", (dir / "run").string(),
                              (dir / "missing.jsonl").string())) == 2);

    fixtures::LoopbackServer srv;
    srv.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("{}", "application/json");
    });
    srv.start();

    const auto manifest = fixtures::write_mock_corpus(dir / "corpus");
    const auto run = (dir / "run").string();
    std::string sets;
    for (int k = 1; k <= 3; ++k)
        sets += fmt::format(" --set model.{0}.name=m{0} --set model.{0}.base_url={1}/v1 --set model.{0}.model_id=x"
                            " --set model.{0}.max_retries=0",
                            k, srv.url());
    CHECK(run_cli(fmt::format("ingest --run '{}' --manifest '{}'", run, manifest.string())) == 0);
    CHECK(run_cli(fmt::format("model-eval difficulty --run '{}' --set modeleval.seeds=1{}", run, sets)) == 3);
    CHECK(std::filesystem::exists(dir / "run" / "records" / "difficulty.json"));
    CHECK(run_cli(fmt::format("report --run '{}' --set bogus", run)) == 2);
}
