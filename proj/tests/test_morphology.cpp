#include <gtest/gtest.h>

#include <random>
#include <set>
#include <utility>

#include "fovea/morphology.hpp"
#include "oracles.hpp"

using namespace fovea;

namespace {

GrayImage spike(int w, int h, int x, int y, std::uint8_t background, std::uint8_t value)
{
    GrayImage f(w, h, background);
    f(x, y) = value;
    return f;
}

bool leq(const GrayImage& a, const GrayImage& b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.pixels()[i] > b.pixels()[i])
            return false;
    return true;
}

} // namespace

TEST(Disk, Counts)
{
    EXPECT_EQ(make_disk(0).size(), 1u);
    EXPECT_EQ(make_disk(1).size(), 5u);
    // Brute-force count of dx^2 + dy^2 <= 225.
    EXPECT_EQ(oracle::enumerate_disk(15).size(), 709u);
    EXPECT_EQ(make_disk(15).size(), 709u);
    for (int r = 0; r <= 30; ++r)
        EXPECT_EQ(make_disk(r).size(), oracle::enumerate_disk(r).size()) << r;
}

TEST(Disk, CenterAndPointSymmetry)
{
    for (int r : {0, 1, 2, 5, 15}) {
        const auto se = make_disk(r);
        const auto& offs = se.offsets();
        std::set<std::pair<int, int>> members;
        for (const auto& p : offs)
            members.insert({p.x, p.y});
        EXPECT_TRUE(members.count({0, 0}));
        for (const auto& p : offs)
            EXPECT_TRUE(members.count({-p.x, -p.y}));
    }
}

TEST(Disk, NegativeRadiusRejected)
{
    EXPECT_THROW(make_disk(-1), std::invalid_argument);
}

TEST(Dilate, ConstantImage)
{
    const GrayImage f(20, 13, 77);
    EXPECT_EQ(dilate(f, make_disk(4)), f);
    EXPECT_EQ(erode(f, make_disk(4)), f);
}

TEST(Dilate, SpikeSpreadsToCross)
{
    const GrayImage out = dilate(spike(9, 9, 4, 4, 0, 255), make_disk(1));
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            const bool cross = std::abs(x - 4) + std::abs(y - 4) <= 1;
            EXPECT_EQ(out(x, y), cross ? 255 : 0) << x << "," << y;
        }
}

TEST(Dilate, RadiusZeroIsIdentity)
{
    std::mt19937 rng(1);
    const GrayImage f = oracle::random_gray(rng, 17, 9);
    EXPECT_EQ(dilate(f, make_disk(0)), f);
    EXPECT_EQ(erode(f, make_disk(0)), f);
}

TEST(Erode, DarkSpikeSpreadsToCross)
{
    const GrayImage out = erode(spike(9, 9, 4, 4, 255, 0), make_disk(1));
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            const bool cross = std::abs(x - 4) + std::abs(y - 4) <= 1;
            EXPECT_EQ(out(x, y), cross ? 0 : 255);
        }
}

TEST(Erode, DualToDilationOfInverse)
{
    std::mt19937 rng(2);
    for (int r : {1, 3, 6}) {
        const GrayImage f = oracle::random_gray(rng, 31, 27);
        EXPECT_EQ(erode(f, make_disk(r)), invert(dilate(invert(f), make_disk(r))));
    }
}

TEST(Dilate, ClipsWindowAtBorder)
{
    // A bright pixel in the corner must not leak; a dark corner must not
    // pull its neighbours down through phantom padding.
    GrayImage f(6, 6, 100);
    f(0, 0) = 200;
    const GrayImage d = dilate(f, make_disk(2));
    EXPECT_EQ(d(2, 0), 200);
    EXPECT_EQ(d(2, 2), 100); // (2,2) is at distance sqrt(8) > 2
    EXPECT_EQ(erode(GrayImage(6, 6, 100), make_disk(2))(0, 0), 100);
}

TEST(Dilate, SinglePixelWideImages)
{
    std::mt19937 rng(4);
    for (auto [w, h] : {std::pair{1, 19}, std::pair{23, 1}, std::pair{1, 1}, std::pair{2, 3}}) {
        const GrayImage f = oracle::random_gray(rng, w, h);
        for (int r : {1, 3, 15}) {
            EXPECT_EQ(dilate(f, make_disk(r)), oracle::naive_dilate(f, r));
            EXPECT_EQ(erode(f, make_disk(r)), oracle::naive_erode(f, r));
        }
    }
}

TEST(OpenClose, ConstantUnchanged)
{
    const GrayImage f(12, 12, 91);
    EXPECT_EQ(opening(f, make_disk(3)), f);
    EXPECT_EQ(closing(f, make_disk(3)), f);
}

TEST(OpenClose, OpeningRemovesBrightSpike)
{
    EXPECT_EQ(opening(spike(11, 11, 5, 5, 0, 200), make_disk(1)), GrayImage(11, 11, 0));
}

TEST(OpenClose, ClosingFillsDarkSpike)
{
    EXPECT_EQ(closing(spike(11, 11, 5, 5, 255, 0), make_disk(1)), GrayImage(11, 11, 255));
}

TEST(Hats, ConstantGivesZero)
{
    const GrayImage f(10, 8, 42);
    EXPECT_EQ(top_hat(f, make_disk(2)), SignedImage(10, 8, 0));
    EXPECT_EQ(bottom_hat(f, make_disk(2)), SignedImage(10, 8, 0));
}

TEST(Hats, TopHatIsolatesSpike)
{
    const SignedImage t = top_hat(spike(11, 11, 5, 5, 0, 200), make_disk(1));
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x)
            EXPECT_EQ(t(x, y), (x == 5 && y == 5) ? 200 : 0);
}

TEST(Hats, NonNegativeOnRandomImages)
{
    std::mt19937 rng(6);
    for (int i = 0; i < 20; ++i) {
        const GrayImage f = oracle::random_gray(rng, 40, 33);
        const auto se = make_disk(1 + i % 5);
        const SignedImage top = top_hat(f, se);
        const SignedImage bottom = bottom_hat(f, se);
        for (auto v : top.pixels())
            ASSERT_GE(v, 0);
        for (auto v : bottom.pixels())
            ASSERT_GE(v, 0);
    }
}

TEST(EnhanceContrast, ConstantUnchanged)
{
    const GrayImage f(16, 16, 120);
    EXPECT_EQ(enhance_contrast(f, make_disk(15)), f);
}

TEST(EnhanceContrast, BrightSpikeSaturates)
{
    const GrayImage out = enhance_contrast(spike(11, 11, 5, 5, 0, 200), make_disk(1));
    EXPECT_EQ(out(5, 5), 255); // 200 + 200 - 0, clamped
    EXPECT_EQ(out(0, 0), 0);
}

TEST(EnhanceContrast, MatchesBruteForceComposite)
{
    std::mt19937 rng(7);
    const GrayImage f = oracle::random_gray(rng, 64, 64);
    EXPECT_EQ(enhance_contrast(f, make_disk(3)), oracle::naive_enhance(f, 3));
}

TEST(EnhanceContrast, SaturatesBelowZero)
{
    // Dark spike: bottom-hat 200, top-hat 0 -> 0 + 0 - 200 clamps at 0,
    // while the neighbours at 200 stay at 200.
    const GrayImage out = enhance_contrast(spike(11, 11, 5, 5, 200, 0), make_disk(1));
    EXPECT_EQ(out(5, 5), 0);
    EXPECT_EQ(out(0, 0), 200);
}

TEST(MorphologyProperties, OrderingExtensivityIdempotence)
{
    std::mt19937 rng(8);
    for (int i = 0; i < 25; ++i) {
        const GrayImage f = i % 2 ? oracle::random_gray(rng, 30 + i, 20 + i) : oracle::random_natural(rng, 30 + i, 25);
        const auto se = make_disk(i % 4 == 3 ? 6 : i % 4);
        const GrayImage e = erode(f, se);
        const GrayImage d = dilate(f, se);
        const GrayImage o = opening(f, se);
        const GrayImage c = closing(f, se);
        EXPECT_TRUE(leq(e, f));
        EXPECT_TRUE(leq(f, d));
        EXPECT_TRUE(leq(o, f));
        EXPECT_TRUE(leq(f, c));
        EXPECT_EQ(opening(o, se), o);
        EXPECT_EQ(closing(c, se), c);
    }
}

TEST(MorphologyProperties, IncreasingMonotone)
{
    std::mt19937 rng(10);
    std::uniform_int_distribution<int> bump(0, 40);
    for (int i = 0; i < 15; ++i) {
        const GrayImage f = oracle::random_natural(rng, 36, 28);
        GrayImage g = f;
        for (auto& v : g.pixels())
            v = saturate_u8(v + bump(rng));
        const auto se = make_disk(1 + i % 4);
        EXPECT_TRUE(leq(dilate(f, se), dilate(g, se)));
        EXPECT_TRUE(leq(erode(f, se), erode(g, se)));
        EXPECT_TRUE(leq(opening(f, se), opening(g, se)));
        EXPECT_TRUE(leq(closing(f, se), closing(g, se)));
    }
}

TEST(MorphologyProperties, FastPathMatchesNaive)
{
    std::mt19937 rng(12);
    std::uniform_int_distribution<int> side(1, 70);
    for (int i = 0; i < 30; ++i) {
        const GrayImage f = oracle::random_gray(rng, side(rng), side(rng));
        for (int r : {0, 1, 3, 15}) {
            ASSERT_EQ(dilate(f, make_disk(r)), oracle::naive_dilate(f, r)) << "r=" << r;
            ASSERT_EQ(erode(f, make_disk(r)), oracle::naive_erode(f, r)) << "r=" << r;
        }
    }
}
