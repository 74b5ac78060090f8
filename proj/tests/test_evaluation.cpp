#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fovea/evaluation.hpp"
#include "test_util.hpp"

using namespace fovea;

namespace {

DetectionResult result(const std::string& source, std::optional<Point> fovea)
{
    DetectionResult r;
    r.source = source;
    r.detected = fovea.has_value();
    r.fovea = fovea;
    if (fovea)
        r.candidate = CandidateStats{1000, 0.9, 120, 0.27};
    return r;
}

GroundTruthRecord truth(const std::string& source, bool has, std::optional<Point> fovea = std::nullopt)
{
    return {source, has, fovea};
}

/// Builds results and truth realizing the given confusion counts.
void confusion(long long tp, long long fn, long long tn, long long fp, std::vector<DetectionResult>& rs,
               std::vector<GroundTruthRecord>& ts)
{
    int id = 0;
    auto add = [&](bool predicted, bool actual) {
        const std::string name = "img" + std::to_string(id++) + ".png";
        rs.push_back(result(name, predicted ? std::optional<Point>(Point{1, 1}) : std::nullopt));
        ts.push_back(truth(name, actual));
    };
    for (long long i = 0; i < tp; ++i)
        add(true, true);
    for (long long i = 0; i < fn; ++i)
        add(false, true);
    for (long long i = 0; i < tn; ++i)
        add(false, false);
    for (long long i = 0; i < fp; ++i)
        add(true, false);
}

std::vector<GroundTruthRecord> parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_truth(in);
}

} // namespace

TEST(Score, ReferenceConfusionCounts)
{
    std::vector<DetectionResult> rs;
    std::vector<GroundTruthRecord> ts;
    confusion(239, 8, 7, 0, rs, ts);
    const MetricsReport m = score(rs, ts);
    EXPECT_EQ(m.tp, 239);
    EXPECT_EQ(m.fn, 8);
    EXPECT_EQ(m.tn, 7);
    EXPECT_EQ(m.fp, 0);
    EXPECT_EQ(format_rate(m.sensitivity), "0.968");
    EXPECT_EQ(format_rate(m.specificity), "1.000");
    EXPECT_EQ(format_rate(m.false_positive_rate), "0.000");
}

TEST(Score, AllCorrect)
{
    std::vector<DetectionResult> rs;
    std::vector<GroundTruthRecord> ts;
    confusion(5, 0, 4, 0, rs, ts);
    const MetricsReport m = score(rs, ts);
    EXPECT_DOUBLE_EQ(*m.sensitivity, 1.0);
    EXPECT_DOUBLE_EQ(*m.specificity, 1.0);
}

TEST(Score, SingleFalsePositive)
{
    const MetricsReport m = score({result("a.png", Point{3, 3})}, {truth("a.png", false)});
    EXPECT_EQ(m.fp, 1);
    EXPECT_DOUBLE_EQ(*m.specificity, 0.0);
    EXPECT_DOUBLE_EQ(*m.false_positive_rate, 1.0);
    EXPECT_FALSE(m.sensitivity);
    EXPECT_EQ(format_rate(m.sensitivity), "n/a");
}

TEST(Score, ErrorCountsAsNotDetected)
{
    DetectionResult r = result("a.png", std::nullopt);
    r.error = "decode failed";
    const MetricsReport m = score({r}, {truth("a.png", true)});
    EXPECT_EQ(m.fn, 1);
    EXPECT_EQ(m.timing.count, 0u);
}

TEST(Score, MissingAndDuplicateTruth)
{
    try {
        score({result("x.png", std::nullopt)}, {truth("y.png", false)});
        FAIL() << "expected MissingTruth";
    } catch (const MissingTruth& e) {
        EXPECT_EQ(e.source(), "x.png");
    }
    try {
        score({}, {truth("y.png", false), truth("y.png", true)});
        FAIL() << "expected DuplicateTruth";
    } catch (const DuplicateTruth& e) {
        EXPECT_EQ(e.source(), "y.png");
    }
}

TEST(Score, CentroidErrorsOnlyWhereBothExist)
{
    const std::vector<DetectionResult> rs{result("a.png", Point{3, 4}), result("b.png", Point{10, 10}),
                                          result("c.png", Point{0, 0}), result("d.png", std::nullopt)};
    const std::vector<GroundTruthRecord> ts{truth("a.png", true, Point{0, 0}), truth("b.png", true),
                                            truth("c.png", false), truth("d.png", true, Point{5, 5})};
    const MetricsReport m = score(rs, ts);
    ASSERT_EQ(m.centroid_errors.size(), 1u);
    EXPECT_DOUBLE_EQ(m.centroid_errors[0], 5.0);
    EXPECT_EQ(m.tp, 2);
    EXPECT_EQ(m.fp, 1);
    EXPECT_EQ(m.fn, 1);
}

TEST(Score, PermutationInvariant)
{
    std::mt19937 rng(51);
    std::vector<DetectionResult> rs;
    std::vector<GroundTruthRecord> ts;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 60; ++i) {
        const std::string name = "s" + std::to_string(i);
        const bool has = coin(rng);
        rs.push_back(result(name, coin(rng) ? std::optional<Point>(Point{i, 2 * i}) : std::nullopt));
        rs.back().total_ms = i * 1.5;
        ts.push_back(truth(name, has, has ? std::optional<Point>(Point{i + 1, 2 * i}) : std::nullopt));
    }
    const MetricsReport base = score(rs, ts);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(rs.begin(), rs.end(), rng);
        std::shuffle(ts.begin(), ts.end(), rng);
        const MetricsReport m = score(rs, ts);
        EXPECT_EQ(format_report(m), format_report(base));
        EXPECT_EQ(m.centroid_errors, base.centroid_errors);
    }
}

TEST(Score, MatchesHandCount)
{
    std::mt19937 rng(52);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> size(1, 80);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<DetectionResult> rs;
        std::vector<GroundTruthRecord> ts;
        long long tp = 0, fp = 0, tn = 0, fn = 0;
        const int n = size(rng);
        for (int i = 0; i < n; ++i) {
            const bool predicted = coin(rng);
            const bool actual = coin(rng);
            tp += predicted && actual;
            fp += predicted && !actual;
            tn += !predicted && !actual;
            fn += !predicted && actual;
            const std::string name = std::to_string(i);
            rs.push_back(result(name, predicted ? std::optional<Point>(Point{0, 0}) : std::nullopt));
            ts.push_back(truth(name, actual));
        }
        const MetricsReport m = score(rs, ts);
        ASSERT_EQ(m.tp, tp);
        ASSERT_EQ(m.fp, fp);
        ASSERT_EQ(m.tn, tn);
        ASSERT_EQ(m.fn, fn);
        ASSERT_EQ(m.evaluated(), n);
        if (tp + fn > 0)
            ASSERT_DOUBLE_EQ(*m.sensitivity, static_cast<double>(tp) / static_cast<double>(tp + fn));
        else
            ASSERT_FALSE(m.sensitivity);
        if (tn + fp > 0) {
            ASSERT_DOUBLE_EQ(*m.specificity, static_cast<double>(tn) / static_cast<double>(tn + fp));
            ASSERT_DOUBLE_EQ(*m.false_positive_rate, 1.0 - *m.specificity);
        } else {
            ASSERT_FALSE(m.specificity);
        }
    }
}

TEST(Summary, Statistics)
{
    const Summary s = summarize({4.0, 1.0, 3.0, 2.0});
    EXPECT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_DOUBLE_EQ(s.p95, 4.0);
    EXPECT_DOUBLE_EQ(s.max, 4.0);
    std::vector<double> hundred;
    for (int i = 1; i <= 100; ++i)
        hundred.push_back(i);
    EXPECT_DOUBLE_EQ(summarize(hundred).p95, 95.0);
    EXPECT_EQ(summarize({}).count, 0u);
}

TEST(Truth, ParsesRows)
{
    const auto rs = parse("source,has_macula,fovea_x,fovea_y\nimg1.png,1,350,520\nimg2.png,0,,\nimg4.png,1,,\n");
    ASSERT_EQ(rs.size(), 3u);
    EXPECT_EQ(rs[0].source, "img1.png");
    EXPECT_TRUE(rs[0].has_macula);
    EXPECT_EQ(rs[0].fovea, (Point{350, 520}));
    EXPECT_FALSE(rs[1].has_macula);
    EXPECT_FALSE(rs[1].fovea);
    EXPECT_TRUE(rs[2].has_macula);
    EXPECT_FALSE(rs[2].fovea);
}

TEST(Truth, ToleratesBomAndCrlf)
{
    const auto rs = parse("\xEF\xBB\xBFsource,has_macula,fovea_x,fovea_y\r\na.png,1,1,2\r\n\r\n");
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].fovea, (Point{1, 2}));
}

TEST(Truth, FoveaWithoutMaculaIsSemanticError)
{
    try {
        parse("source,has_macula,fovea_x,fovea_y\nimg3.png,0,10,10\n");
        FAIL() << "expected SemanticError";
    } catch (const SemanticError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Truth, MalformedRowsReportLine)
{
    const std::string header = "source,has_macula,fovea_x,fovea_y\n";
    for (const std::string& row : {"a.png,2,,", "a.png,1,3", "a.png,1,3,", "a.png,1,x,4", ",1,3,4", "a.png,1,3,4,5"}) {
        try {
            parse(header + "ok.png,0,,\n" + row + "\n");
            FAIL() << row;
        } catch (const SemanticError&) {
            FAIL() << "wrong error kind for " << row;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 3u) << row;
        }
    }
    EXPECT_THROW(parse("img,1,2,3\n"), ParseError);
    EXPECT_THROW(parse(""), ParseError);
}

TEST(Truth, LoadFromFile)
{
    fovea::testing::TempDir dir;
    EXPECT_THROW(load_truth(dir.file("absent.csv")), FileNotFound);
    std::ofstream(dir.file("t.csv")) << "source,has_macula,fovea_x,fovea_y\nq.png,1,7,8\n";
    const auto rs = load_truth(dir.file("t.csv"));
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].source, "q.png");
}
