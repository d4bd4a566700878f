#include "mabsa/errors.hpp"
#include "mabsa/hcd.hpp"
#include "mabsa/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace mabsa;
using namespace mabsa::hcd;

namespace {

// Embedding pairs whose cosine is exactly `c` (up to rounding).
void pair_with_cosine(double c, std::vector<double>& t, std::vector<double>& i)
{
    t = {1.0, 0.0};
    i = {c, std::sqrt(std::max(0.0, 1.0 - c * c))};
}

std::vector<DifficultyRecord> records_from(const std::vector<double>& d_c)
{
    std::vector<DifficultyRecord> r;
    for (std::size_t i = 0; i < d_c.size(); ++i) {
        r.push_back({"s" + std::to_string(i), 0.0, 0.0, d_c[i]});
    }
    return r;
}

} // namespace

TEST(SimilarityDifficulty, HandArithmetic)
{
    std::vector<std::vector<double>> t(3), im(3);
    pair_with_cosine(0.8, t[0], im[0]);
    pair_with_cosine(0.4, t[1], im[1]);
    pair_with_cosine(0.8, t[2], im[2]);
    const auto d = similarity_difficulty(t, im);
    EXPECT_NEAR(d[0], 0.0, 1e-12);
    EXPECT_NEAR(d[1], 0.5, 1e-12);
    EXPECT_NEAR(d[2], 0.0, 1e-12);
}

TEST(SimilarityDifficulty, EqualAndSingle)
{
    std::vector<std::vector<double>> t(4, {1.0, 2.0}), im(4, {2.0, 1.0});
    for (double v : similarity_difficulty(t, im)) {
        EXPECT_EQ(v, 0.0);
    }
    const std::vector<std::vector<double>> t1{{0.3, -1.0}}, i1{{-2.0, 0.1}};
    EXPECT_EQ(similarity_difficulty(t1, i1), std::vector<double>{0.0});
}

TEST(SimilarityDifficulty, ZeroNormNamesSample)
{
    const std::vector<std::vector<double>> t{{1, 0}, {0, 0}}, im{{1, 1}, {1, 0}};
    const std::vector<std::string> ids{"first", "second"};
    try {
        similarity_difficulty(t, im, ids);
        FAIL();
    } catch (const DegenerateInputError& e) {
        EXPECT_NE(std::string(e.what()).find("second"), std::string::npos) << e.what();
    }
}

TEST(SimilarityDifficulty, NegativeCosinesClampToFloor)
{
    const std::vector<std::vector<double>> t{{1, 0}, {1, 0}}, im{{1, 0}, {-1, 0}};
    const auto d = similarity_difficulty(t, im);
    EXPECT_EQ(d[0], 0.0);
    EXPECT_NEAR(d[1], 1.0 - kSimilarityFloor, 1e-15);
}

TEST(LossDifficulty, Examples)
{
    const std::vector<double> l{2.0, 1.0, 4.0};
    EXPECT_EQ(loss_difficulty(l), (std::vector<double>{0.5, 0.25, 1.0}));
    EXPECT_EQ(loss_difficulty(std::vector<double>{0, 0}), (std::vector<double>{0, 0}));
    EXPECT_EQ(loss_difficulty(std::vector<double>{3.5}), std::vector<double>{1.0});
    EXPECT_THROW(loss_difficulty(std::vector<double>{1.0, -0.1}), ContractError);
}

TEST(CompositeDifficulty, Examples)
{
    const std::vector<double> dl{0.5, 0.1}, ds{0.25, 0.9};
    EXPECT_NEAR(composite_difficulty(dl, ds, 0.8)[0], 0.45, 1e-15);
    EXPECT_EQ(composite_difficulty(dl, ds, 1.0), dl);
    EXPECT_EQ(composite_difficulty(dl, ds, 0.0), ds);
    EXPECT_THROW(composite_difficulty(dl, std::vector<double>{0.1}, 0.5), ContractError);
    EXPECT_THROW(composite_difficulty(dl, ds, 1.5), ContractError);
}

TEST(Competence, EndpointsAndSpotValue)
{
    const CompetenceSchedule s{0.1, 100};
    EXPECT_NEAR(competence(0, s), 0.1, 1e-12);
    EXPECT_NEAR(competence(100, s), 1.0, 1e-12);
    EXPECT_EQ(competence(250, s), 1.0);
    // sqrt(0.505) to 22 digits, evaluated independently
    EXPECT_NEAR(competence(50, s), 0.7106335201775947748485, 1e-12);
}

TEST(Competence, MonotoneAndContinuousAtT)
{
    for (double lambda : {0.01, 0.1, 0.5, 1.0}) {
        for (std::size_t T : {1u, 7u, 20u, 100u}) {
            const CompetenceSchedule s{lambda, T};
            double prev = 0.0;
            for (std::size_t t = 0; t <= 2 * T; ++t) {
                const double p = competence(static_cast<double>(t), s);
                EXPECT_GE(p, prev);
                EXPECT_GT(p, 0.0);
                EXPECT_LE(p, 1.0);
                prev = p;
            }
            EXPECT_GT(competence(static_cast<double>(T) - 1e-9, s), 1.0 - 1e-6);
        }
    }
}

TEST(Competence, InvalidSchedule)
{
    EXPECT_THROW(competence(0, CompetenceSchedule{0.0, 10}), ContractError);
    EXPECT_THROW(competence(0, CompetenceSchedule{0.1, 0}), ContractError);
    EXPECT_THROW(competence(-1, CompetenceSchedule{0.1, 10}), ContractError);
}

TEST(Selection, Examples)
{
    EXPECT_EQ(select_training_subset(records_from({0.1, 0.9, 0.5}), 0.6, 1),
              (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(select_training_subset(records_from({0.1, 0.9, 0.5}), 1.0, 1),
              (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(select_training_subset(records_from({0.5, 0.6}), 0.1, 1), (std::vector<std::size_t>{0}));
}

TEST(Selection, StrictInequality)
{
    EXPECT_EQ(select_training_subset(records_from({0.3, 0.2, 0.3}), 0.3, 1),
              (std::vector<std::size_t>{1}));
}

TEST(Selection, FallbackBreaksTiesBySampleId)
{
    std::vector<DifficultyRecord> r{{"b", 0, 0, 0.7}, {"a", 0, 0, 0.7}, {"c", 0, 0, 0.9}};
    EXPECT_EQ(select_training_subset(r, 0.1, 1), (std::vector<std::size_t>{1}));
    EXPECT_EQ(select_training_subset(r, 0.1, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(Selection, AntiCurriculumMirrors)
{
    const auto r = records_from({0.1, 0.9, 0.5, 0.95});
    EXPECT_EQ(select_anti_curriculum(r, 0.2, 1), (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(select_anti_curriculum(r, 0.01, 1), (std::vector<std::size_t>{3}));
    EXPECT_EQ(select_anti_curriculum(r, 1.0, 1).size(), 4u);
}

// 1000 random cases for every algebraic property of the difficulty measures.
TEST(DifficultyProperties, RandomCases)
{
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 40));
        const auto dim = static_cast<std::size_t>(rng.integer(2, 8));
        std::vector<std::vector<double>> t(n, std::vector<double>(dim)), im(n, std::vector<double>(dim));
        std::vector<double> losses(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < dim; ++k) {
                t[i][k] = rng.normal();
                im[i][k] = rng.normal() + 0.5 * t[i][k];
            }
            losses[i] = rng.uniform(0.0, 30.0);
        }
        const auto ds = similarity_difficulty(t, im);
        const auto dl = loss_difficulty(losses);

        std::vector<double> sim(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = std::inner_product(t[i].begin(), t[i].end(), im[i].begin(), 0.0) /
                             std::sqrt(std::inner_product(t[i].begin(), t[i].end(), t[i].begin(), 0.0) *
                                       std::inner_product(im[i].begin(), im[i].end(), im[i].begin(), 0.0));
            sim[i] = std::clamp(c, kSimilarityFloor, 1.0);
        }
        const auto best = static_cast<std::size_t>(std::max_element(sim.begin(), sim.end()) - sim.begin());
        ASSERT_EQ(ds[best], 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_GE(ds[i], 0.0);
            ASSERT_LT(ds[i], 1.0);
            ASSERT_GE(dl[i], 0.0);
            ASSERT_LE(dl[i], 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (sim[i] > sim[j]) {
                    ASSERT_LT(ds[i], ds[j]);
                }
            }
        }

        const auto c0 = composite_difficulty(dl, ds, 0.0);
        const auto ch = composite_difficulty(dl, ds, 0.5);
        const auto c1 = composite_difficulty(dl, ds, 1.0);
        const double alpha = rng.uniform();
        const auto ca = composite_difficulty(dl, ds, alpha);
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_NEAR(ch[i], 0.5 * (c0[i] + c1[i]), 1e-12);
            ASSERT_NEAR(ca[i], c0[i] + alpha * (c1[i] - c0[i]), 1e-12);
            ASSERT_GE(ca[i], 0.0);
            ASSERT_LE(ca[i], 1.0);
        }

        const auto ids = [n] {
            std::vector<std::string> v;
            for (std::size_t i = 0; i < n; ++i) {
                v.push_back("x" + std::to_string(i));
            }
            return v;
        }();
        const auto recs = make_records(ids, ds, dl, alpha);
        const CompetenceSchedule sched{rng.uniform(0.01, 1.0), static_cast<std::size_t>(rng.integer(1, 50))};
        const std::size_t min_size = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(n)));
        std::vector<std::size_t> prev;
        for (std::size_t e = 0; e <= sched.T + 1; ++e) {
            const auto sel = select_training_subset(recs, competence(static_cast<double>(e), sched), min_size);
            ASSERT_GE(sel.size(), min_size);
            ASSERT_TRUE(std::is_sorted(sel.begin(), sel.end()));
            ASSERT_TRUE(std::includes(sel.begin(), sel.end(), prev.begin(), prev.end()))
                << "selection shrank at epoch " << e;
            prev = sel;
        }
        ASSERT_EQ(prev.size(), n);
    }
}

TEST(Records, CompositeMatchesConfiguredAlpha)
{
    const std::vector<std::string> ids{"a", "b"};
    const std::vector<double> ds{0.2, 0.6}, dl{1.0, 0.5};
    const auto r = make_records(ids, ds, dl, 0.8);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[1].sample_id, "b");
    EXPECT_NEAR(r[0].d_c, 0.8 * 1.0 + 0.2 * 0.2, 1e-12);
    EXPECT_NEAR(r[1].d_c, 0.8 * 0.5 + 0.2 * 0.6, 1e-12);
}
