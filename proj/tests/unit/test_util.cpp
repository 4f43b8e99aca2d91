#include <doctest.h>

#include <atomic>
#include <fstream>
#include <stdexcept>

#include "fixtures.hpp"
#include "infodensity/error.hpp"
#include "infodensity/util/dates.hpp"
#include "infodensity/util/hash.hpp"
#include "infodensity/util/jsonl.hpp"
#include "infodensity/util/parallel.hpp"
#include "infodensity/util/rng.hpp"

using namespace infodensity;

TEST_CASE("rng is reproducible and bounded") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng d(42);
    bool differs = false;
    for (int i = 0; i < 10; ++i) differs = differs || d.next() != c.next();
    CHECK(differs);
    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(r.below(13) < 13);
        const double u = r.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("mt19937_64 reference output") {
    // Tenth-thousandth output for the default seed is fixed by the standard.
    std::mt19937_64 e;
    e.discard(9999);
    CHECK(e() == 9981545732273789042ULL);
}

TEST_CASE("seed helpers are pure") {
    static_assert(seed_from_string("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(mix_seed(1) != mix_seed(2));
    CHECK(seed_from_string("annotator-1") != seed_from_string("annotator-2"));
}

TEST_CASE("sha256 and base64 known vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
}

TEST_CASE("iso dates") {
    const auto d = parse_iso_date("2024-07-02");
    REQUIRE(d);
    CHECK(format_iso_date(*d) == "2024-07-02");
    CHECK(fractional_year(*d) == doctest::Approx(2024.5));
    CHECK(fractional_year(*parse_iso_date("2023-01-01")) == 2023.0);
    CHECK_FALSE(parse_iso_date("2024-13-01"));
    CHECK_FALSE(parse_iso_date("2023-02-29"));
    CHECK_FALSE(parse_iso_date("June 2024"));
}

TEST_CASE("json lines round trip and report bad lines") {
    fixtures::TempDir dir;
    const auto path = dir / "x.jsonl";
    write_json_lines(path, {Json{{"a", 1}}, Json{{"b", "two"}}});
    std::vector<Json> back;
    for_each_json_line(path, [&](const Json& j, std::size_t) { back.push_back(j); });
    REQUIRE(back.size() == 2);
    CHECK(back[1]["b"] == "two");

    std::ofstream(dir / "bad.jsonl") << "{\"ok\":1}\n\n{broken\n";
    try {
        for_each_json_line(dir / "bad.jsonl", [](const Json&, std::size_t) {});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("write_text_file creates parents and replaces atomically") {
    fixtures::TempDir dir;
    const auto path = dir / "a/b/c.txt";
    write_text_file(path, "one");
    write_text_file(path, "two");
    CHECK(read_file_bytes(path.string()) == "two");
}

TEST_CASE("parallel_for_bounded covers every index and rethrows") {
    std::vector<int> hits(500, 0);
    parallel_for_bounded(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);

    std::atomic<int> ran{0};
    CHECK_THROWS_AS(parallel_for_bounded(50, 4,
                                         [&](std::size_t i) {
                                             ++ran;
                                             if (i == 17) throw std::runtime_error("boom");
                                         }),
                    std::runtime_error);
    CHECK(ran.load() == 50);
}
