#include <doctest.h>

#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "infodensity/corpus/manifest.hpp"
#include "infodensity/error.hpp"

using namespace infodensity;
using namespace infodensity::corpus;

namespace {

const char* kMeta = R"({"__meta__":{"name":"Toy","release_date":"2024-06-01"}})";

std::filesystem::path write_manifest(const fixtures::TempDir& dir, const std::string& body) {
    const auto path = dir / "manifest.jsonl";
    std::ofstream(path) << kMeta << "\n" << body;
    return path;
}

BenchmarkManifest synthetic(std::size_t n, std::size_t options = 4) {
    BenchmarkManifest m;
    m.name = "Synth";
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.id = "q" + std::to_string(i);
        s.image_ref = "img.png";
        s.question = "q?";
        for (std::size_t k = 0; k < options; ++k) s.options.push_back(std::string(1, 'a' + k));
        m.samples.push_back(s);
    }
    return m;
}

} // namespace

TEST_CASE("manifest loads and normalizes answers") {
    fixtures::TempDir dir;
    std::ofstream(dir / "a.png") << "x";
    const auto path = write_manifest(
        dir,
        R"j({"id":"1","image":"a.png","question":"Is there a dog?","options":["yes","no"],"answer":"(b)"})j"
        "\n"
        R"({"id":"2","image":"missing.png","question":"Color?","options":["red","blue","green"],"answer":"C.","category":"color"})"
        "\n");
    const auto m = load_benchmark(path);
    CHECK(m.name == "Toy");
    REQUIRE(m.samples.size() == 2);
    CHECK(m.samples[0].answer == 'B');
    CHECK(m.samples[0].usable);
    CHECK(m.samples[1].answer == 'C');
    CHECK(m.samples[1].category == std::optional<std::string>("color"));
    CHECK_FALSE(m.samples[1].usable);
    CHECK(m.unusable_count() == 1);
    CHECK(m.warnings.size() == 1);

    save_benchmark(m, dir / "copy.jsonl");
    CHECK(load_benchmark(dir / "copy.jsonl", {.check_images = false}) == m);
}

TEST_CASE("manifest rejects contract violations") {
    fixtures::TempDir dir;
    auto rejects = [&](const std::string& line) {
        const auto path = write_manifest(dir, line + "\n");
        CHECK_THROWS_AS(load_benchmark(path, {.check_images = false}), ValidationError);
    };
    rejects(R"({"id":"1","image":"a.png","question":"q","options":["a","b"],"answer":"C"})");
    rejects(R"({"id":"1","image":"a.png","question":"q","options":["a","a"],"answer":"A"})");
    rejects(R"({"id":"1","image":"a.png","question":"q","options":[],"answer":"A"})");
    rejects(R"({"id":"1","image":"a.png","options":["a","b"],"answer":"A"})");
    rejects(R"({"id":"1","image":"a.png","question":"q","options":["a","b"],"answer":"A"}
{"id":"1","image":"b.png","question":"q","options":["a","b"],"answer":"A"})");

    Json many = Json::array();
    for (int i = 0; i < 27; ++i) many.push_back("o" + std::to_string(i));
    rejects(Json{{"id", "1"}, {"image", "a.png"}, {"question", "q"}, {"options", many}, {"answer", "A"}}
                .dump());

    std::ofstream(dir / "nometa.jsonl")
        << R"({"id":"1","image":"a.png","question":"q","options":["a","b"],"answer":"A"})" << "\n";
    CHECK_THROWS_AS(load_benchmark(dir / "nometa.jsonl"), ValidationError);

    const auto path = write_manifest(dir, "{not json}\n");
    try {
        load_benchmark(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("sample_align returns the whole set when small") {
    const auto m = synthetic(10);
    const auto s = sample_align(m, 1000, 0);
    CHECK(s.sample_ids.size() == 10);
    CHECK(s.sample_ids.front() == "q0");
    CHECK(s.sample_ids.back() == "q9");
}

TEST_CASE("sample_align is seeded, ordered and uniform in size") {
    const auto m = synthetic(3000);
    const auto a = sample_align(m, 1000, 5);
    const auto b = sample_align(m, 1000, 5);
    const auto c = sample_align(m, 1000, 6);
    CHECK(a == b);
    CHECK(a.sample_ids.size() == 1000);
    CHECK(std::set<std::string>(a.sample_ids.begin(), a.sample_ids.end()).size() == 1000);
    CHECK(a.sample_ids != c.sample_ids);

    std::vector<std::size_t> positions;
    for (const auto& id : a.sample_ids) positions.push_back(std::stoul(id.substr(1)));
    CHECK(std::is_sorted(positions.begin(), positions.end()));

    CHECK(aligned_subset_from_json(to_json(a)) == a);
    CHECK(resolve(m, a).size() == 1000);
}

TEST_CASE("sample_align drops unusable samples first") {
    auto m = synthetic(5);
    m.samples[1].usable = false;
    const auto s = sample_align(m, 1000, 0);
    CHECK(s.excluded == 1);
    CHECK(s.sample_ids == std::vector<std::string>{"q0", "q2", "q3", "q4"});
    CHECK_THROWS(sample_align(m, 0, 0));
}

TEST_CASE("applicability threshold on mean option count") {
    CHECK_FALSE(applicability(synthetic(4, 2)).text_redundancy_applicable);
    CHECK(applicability(synthetic(4, 4)).text_redundancy_applicable);

    auto mixed = synthetic(4, 3);
    mixed.samples[0].options = {"a", "b"};
    const auto r = applicability(mixed);
    CHECK(r.mean_options == doctest::Approx(2.75));
    CHECK(r.text_redundancy_applicable);
    CHECK(r.is_mcq);
    CHECK(applicability_from_json(to_json(r)).mean_options == r.mean_options);

    auto single = synthetic(2, 2);
    single.samples[0].options = {"only"};
    CHECK_FALSE(applicability(single).is_mcq);
}
