#include "oracles.hpp"

#include "stroketrace/binarize.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace stroketrace;

namespace {

GrayImage bimodal(std::mt19937_64& rng, int w, int h, int dark, int light, double ink_share, double sigma) {
    std::bernoulli_distribution ink(ink_share);
    std::normal_distribution<double> jitter(0.0, sigma);
    GrayImage img(w, h);
    for (auto& p : img.pixels()) {
        const double v = (ink(rng) ? dark : light) + jitter(rng);
        p = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return img;
}

} // namespace

TEST_CASE("histogram tallies intensities") {
    const GrayImage two(2, 1, std::vector<std::uint8_t>{0, 255});
    const Histogram h = histogram(two);
    CHECK(h[0] == 1);
    CHECK(h[255] == 1);
    CHECK(std::accumulate(h.begin(), h.end(), std::uint64_t{0}) == 2);

    CHECK(histogram(GrayImage(4, 4, 9))[9] == 16);

    std::mt19937_64 rng(21);
    const GrayImage img = oracle::random_gray(rng, 17, 13);
    const Histogram r = histogram(img);
    CHECK(std::accumulate(r.begin(), r.end(), std::uint64_t{0}) == img.size());
    for (int v = 0; v < 256; ++v) {
        CHECK(r[v] == static_cast<std::uint64_t>(std::count(img.pixels().begin(), img.pixels().end(), v)));
    }
}

TEST_CASE("two spikes are the two peaks") {
    Histogram h{};
    h[20] = 500;
    h[230] = 900;
    const auto peaks = find_two_peaks(h);
    REQUIRE(peaks);
    CHECK(peaks->lo == 20);
    CHECK(peaks->hi == 230);
}

TEST_CASE("a constant histogram has no second peak") {
    CHECK_FALSE(find_two_peaks(histogram(GrayImage(5, 5, 100))));
}

TEST_CASE("trimodal histogram keeps the two tallest humps") {
    // Smoothed heights 100, 90, 40 at 10, 200, 120: five equal bins give a
    // smoothed peak equal to the bin height at the centre.
    Histogram h{};
    const auto hump = [&](int centre, std::uint64_t height) {
        for (int d = -2; d <= 2; ++d) {
            h[static_cast<std::size_t>(centre + d)] = height;
        }
        h[static_cast<std::size_t>(centre)] = height + 1;
    };
    hump(10, 100);
    hump(200, 90);
    hump(120, 40);
    const SmoothedHistogram s = smooth_histogram(h);
    CHECK(s[10] == doctest::Approx(100.2));
    CHECK(s[200] == doctest::Approx(90.2));
    CHECK(s[120] == doctest::Approx(40.2));
    const auto peaks = find_two_peaks(h);
    REQUIRE(peaks);
    CHECK(peaks->lo == 10);
    CHECK(peaks->hi == 200);
}

TEST_CASE("peaks closer than the separation are not paired") {
    Histogram h{};
    h[100] = 50;
    h[110] = 40;
    CHECK_FALSE(find_two_peaks(h));
    h[200] = 10;
    const auto peaks = find_two_peaks(h);
    REQUIRE(peaks);
    CHECK(peaks->lo == 100);
    CHECK(peaks->hi == 200);
}

TEST_CASE("peak finder matches the all-pairs oracle") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 300; ++trial) {
        Histogram h{};
        std::uniform_int_distribution<int> bin(0, 255);
        std::uniform_int_distribution<int> n(1, 12);
        std::uniform_int_distribution<int> height(1, 60);
        const int spikes = n(rng);
        for (int i = 0; i < spikes; ++i) {
            h[static_cast<std::size_t>(bin(rng))] += static_cast<std::uint64_t>(height(rng));
        }
        const auto got = find_two_peaks(h);
        const auto want = oracle::two_peaks(h);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            CHECK(got->lo == want->first);
            CHECK(got->hi == want->second);
        }
    }
}

TEST_CASE("threshold is the floored midpoint") {
    GrayImage img(10, 10, 230);
    for (int x = 0; x < 10; ++x) {
        img.at(x, 3) = 20;
    }
    const BinarizeResult r = binarize(img);
    REQUIRE(r.report.peaks);
    CHECK(r.report.threshold == 125);
    CHECK(r.image.count_foreground() == 10);
    CHECK(r.image.at(4, 3));
}

TEST_CASE("constant image is all background") {
    const BinarizeResult r = binarize(GrayImage(8, 8, 77));
    CHECK(r.image.count_foreground() == 0);
    CHECK_FALSE(r.report.peaks);
}

TEST_CASE("single-peak fallback uses the intensity range") {
    // Two adjacent levels: one hump only.
    GrayImage img(4, 1, std::vector<std::uint8_t>{100, 100, 104, 104});
    const BinarizeResult r = binarize(img);
    CHECK_FALSE(r.report.peaks);
    CHECK(r.report.threshold == 102);
    CHECK(r.image.count_foreground() == 2);
}

TEST_CASE("bimodal image splits by nearest peak") {
    std::mt19937_64 rng(23);
    const GrayImage img = bimodal(rng, 64, 64, 30, 220, 0.3, 8.0);
    const BinarizeResult r = binarize(img);
    REQUIRE(r.report.peaks);
    const double mid = (r.report.peaks->lo + r.report.peaks->hi) / 2.0;
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            const int v = img.at(x, y);
            const bool nearer_dark = std::abs(v - r.report.peaks->lo) < std::abs(v - r.report.peaks->hi);
            if (v != mid) {
                CHECK(r.image.at(x, y) == nearer_dark);
            }
        }
    }
}

TEST_CASE("report invariants") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = bimodal(rng, 40, 30, 40 + trial, 200 - trial, 0.25, 8.0);
        const BinarizeResult r = binarize(img);
        CHECK(std::accumulate(r.report.counts.begin(), r.report.counts.end(), std::uint64_t{0}) == img.size());
        REQUIRE(r.report.peaks);
        CHECK(r.report.peaks->lo < r.report.threshold);
        CHECK(r.report.threshold < r.report.peaks->hi);
        CHECK(r.report.threshold == (r.report.peaks->lo + r.report.peaks->hi) / 2);
    }
}

TEST_CASE("inverting the image and the flag gives the same mask") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 40; ++trial) {
        const GrayImage img = trial % 2 == 0 ? bimodal(rng, 30, 20, 30, 220, 0.3, 8.0) : oracle::random_gray(rng, 9, 9);
        GrayImage flipped = img;
        for (auto& v : flipped.pixels()) {
            v = static_cast<std::uint8_t>(255 - v);
        }
        CHECK(binarize(img).image == binarize(flipped, true).image);
        CHECK(binarize(img, true).image == binarize(flipped).image);
    }
}

TEST_CASE("foreground is exactly the pixels at or below the threshold") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = bimodal(rng, 25, 25, 50, 200, 0.4, 20.0);
        const BinarizeResult r = binarize(img);
        std::uint64_t below = 0;
        for (int v = 0; v <= r.report.threshold; ++v) {
            below += r.report.counts[static_cast<std::size_t>(v)];
        }
        CHECK(r.image.count_foreground() == below);
        for (int y = 0; y < 25; ++y) {
            for (int x = 0; x < 25; ++x) {
                CHECK(r.image.at(x, y) == (img.at(x, y) <= r.report.threshold));
            }
        }
    }
}

TEST_CASE("report serializes") {
    GrayImage img(10, 1, 230);
    img.at(0, 0) = 20;
    const nlohmann::json j = binarize(img).report;
    CHECK(j["threshold"] == 125);
    CHECK(j["counts"].size() == 256);
    CHECK(j["smoothed"].size() == 256);
}
