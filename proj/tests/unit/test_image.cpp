#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "infodensity/error.hpp"
#include "infodensity/image/features.hpp"
#include "infodensity/image/raster.hpp"
#include "infodensity/util/rng.hpp"

using namespace infodensity;
using namespace infodensity::image;

namespace {

Raster gray(int w, int h, std::uint8_t v) {
    Raster r(w, h);
    for (auto& b : r.rgb) b = v;
    return r;
}

Raster checkerboard(int n) {
    Raster r(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const std::uint8_t v = (x + y) % 2 ? 255 : 0;
            r.set(x, y, v, v, v);
        }
    return r;
}

Raster noise(int w, int h, std::uint64_t seed) {
    Raster r(w, h);
    Rng rng(seed);
    for (auto& b : r.rgb) b = static_cast<std::uint8_t>(rng.below(256));
    return r;
}

} // namespace

TEST_CASE("flat image has zero texture") {
    const auto f = compute_image_features(gray(16, 12, 128));
    CHECK(f.light == doctest::Approx(128.0 / 255.0));
    CHECK(f.contrast == 0.0);
    CHECK(f.color == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.blur == 0.0);
    CHECK(f.si == 0.0);
    CHECK(f.structure == 0.0);
    CHECK(f.width == 16);
    CHECK(f.height == 12);
}

TEST_CASE("checkerboard maximizes the Laplacian response") {
    const auto board = compute_image_features(checkerboard(9));
    CHECK(board.structure == doctest::Approx(4.0));
    CHECK(board.light == doctest::Approx(40.0 / 81.0));
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        CHECK(compute_image_features(noise(9, 9, seed)).structure < board.structure);
}

TEST_CASE("saturated colors have positive chroma within range") {
    Raster red(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) red.set(x, y, 255, 0, 0);
    const auto f = compute_image_features(red);
    CHECK(f.color > 0.3);
    CHECK(f.color <= 1.0);
    CHECK(max_chroma_magnitude() > 0.0);
}

TEST_CASE("rasters smaller than 3x3 are rejected") {
    CHECK_THROWS_AS(compute_image_features(gray(2, 5, 0)), ValidationError);
}

TEST_CASE("feature_distribution on two points is a quarter of each range") {
    ImageFeatures a, b;
    a.light = 0.2, a.contrast = 0.1, a.color = 0.3, a.blur = 1.0, a.si = 0.5;
    b.light = 0.6, b.contrast = 0.3, b.color = 0.3, b.blur = 3.0, b.si = 0.5;
    const std::vector<ImageFeatures> v{a, b};
    const auto d = feature_distribution(v);
    CHECK(d[0] == doctest::Approx(0.25));
    CHECK(d[1] == doctest::Approx(0.25));
    CHECK(d[2] == 0.0);
    CHECK(d[3] == doctest::Approx(0.25));
    CHECK(d[4] == 0.0);
    CHECK_THROWS(feature_distribution(std::vector<ImageFeatures>{a}));
}

TEST_CASE("feature_distribution matches variance over squared range") {
    std::vector<ImageFeatures> v;
    Rng rng(99);
    for (int i = 0; i < 10; ++i) {
        ImageFeatures f;
        f.light = rng.unit(), f.contrast = rng.unit(), f.color = rng.unit();
        f.blur = rng.unit() * 3, f.si = rng.unit() * 2;
        v.push_back(f);
    }
    const auto d = feature_distribution(v);
    auto oracle = [&](auto get) {
        double lo = 1e9, hi = -1e9, mean = 0;
        for (const auto& f : v) lo = std::min(lo, get(f)), hi = std::max(hi, get(f)), mean += get(f);
        mean /= 10;
        double var = 0;
        for (const auto& f : v) var += (get(f) - mean) * (get(f) - mean);
        return var / 10 / ((hi - lo) * (hi - lo));
    };
    CHECK(d[0] == doctest::Approx(oracle([](const ImageFeatures& f) { return f.light; })));
    CHECK(d[1] == doctest::Approx(oracle([](const ImageFeatures& f) { return f.contrast; })));
    CHECK(d[2] == doctest::Approx(oracle([](const ImageFeatures& f) { return f.color; })));
    CHECK(d[3] == doctest::Approx(oracle([](const ImageFeatures& f) { return f.blur; })));
    CHECK(d[4] == doctest::Approx(oracle([](const ImageFeatures& f) { return f.si; })));
    for (double x : d) {
        CHECK(x >= 0.0);
        CHECK(x <= 0.25 + 1e-12);
    }
}

TEST_CASE("png round trip and crop") {
    const auto r = noise(13, 7, 4);
    const auto back = decode_image(encode_png(r));
    CHECK(back.width == 13);
    CHECK(back.height == 7);
    CHECK(back.rgb == r.rgb);

    fixtures::TempDir dir;
    save_png(r, dir / "x.png");
    CHECK(load_image(dir / "x.png").rgb == r.rgb);

    const auto c = crop(r, 2, 3, 4, 2);
    CHECK(c.width == 4);
    CHECK(c.height == 2);
    CHECK(c.pixel(0, 0)[0] == r.pixel(2, 3)[0]);
    CHECK(c.pixel(3, 1)[2] == r.pixel(5, 4)[2]);
    CHECK_THROWS(crop(r, 10, 0, 4, 2));

    CHECK_THROWS_AS(decode_image("not an image"), ValidationError);
}

TEST_CASE("features csv has a header and one row per image") {
    const std::vector<std::string> ids{"a", "b"};
    const std::vector<ImageFeatures> f{compute_image_features(gray(4, 4, 0)),
                                       compute_image_features(checkerboard(4))};
    const auto csv = image_features_csv(ids, f);
    CHECK(csv.rfind("id,light,contrast,color,blur,si,structure\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
