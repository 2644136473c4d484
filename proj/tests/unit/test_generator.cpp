#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "swarmkit/compose.hpp"
#include "swarmkit/generator.hpp"
#include "swarmkit/subscription.hpp"
#include "swarmkit/wellformed.hpp"

using namespace swarmkit;

namespace {

GenParams params(std::uint64_t seed, std::size_t n) {
  GenParams p;
  p.seed = seed;
  p.n_protocols = n;
  p.max_roles_per_protocol = 4;
  p.max_types_per_role = 3;
  return p;
}

// Event types of g emitted by r, in the order they occur along any path.
std::vector<EventType> emitted_in_order(const SwarmProtocol& g, const Role& r) {
  std::vector<EventType> out;
  for (const auto& e : g.edges()) {
    if (e.role == r && std::find(out.begin(), out.end(), e.type) == out.end()) out.push_back(e.type);
  }
  return out;
}

}  // namespace

TEST(Generator, DeterministicPerSeed) {
  auto a = generate_protocols(params(5, 3));
  auto b = generate_protocols(params(5, 3));
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].transitions(), b[k].transitions());
  auto c = generate_protocols(params(6, 3));
  EXPECT_NE(a[0].transitions(), c[0].transitions());
}

TEST(Generator, OutputsAreComposableAndConfusionFree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto gs = generate_protocols(params(seed, 2 + seed % 4));
    EXPECT_TRUE(check_composable_fast(gs).composable) << seed;
    for (const auto& g : gs) {
      EXPECT_TRUE(check_confusion_free(g).passed()) << seed;
      EXPECT_TRUE(concurrent_pairs(g).empty()) << seed;
    }
  }
}

TEST(Generator, InterfacingTypesShareOrder) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto gs = generate_protocols(params(seed, 3));
    for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
      auto itf = interface(gs[k], gs[k + 1]);
      ASSERT_EQ(itf.interfacing_roles.size(), 1u) << seed;
      const auto& r = *itf.interfacing_roles.begin();
      std::vector<EventType> left, right;
      for (const auto& t : emitted_in_order(gs[k], r)) {
        if (itf.interfacing_event_types.count(t)) left.push_back(t);
      }
      for (const auto& t : emitted_in_order(gs[k + 1], r)) {
        if (itf.interfacing_event_types.count(t)) right.push_back(t);
      }
      EXPECT_EQ(left, right) << seed;
    }
  }
}

TEST(Generator, SingleProtocol) {
  auto gs = generate_protocols(params(3, 1));
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_TRUE(check_confusion_free(gs[0]).passed());
}

TEST(Generator, InvalidParamsRejected) {
  GenParams p;
  p.n_protocols = 0;
  EXPECT_THROW(p.validate(), Error);
  p = GenParams{};
  p.branch_prob = 1.5;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Generator, RandomProtocolIsSequential) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    auto g = random_protocol(rng, 6, 3);
    EXPECT_LE(g.state_count(), 6u);
    EXPECT_LE(g.roles().size(), 3u);
    EXPECT_TRUE(concurrent_pairs(g).empty());
  }
}

TEST(EFrac, Bounds) {
  std::vector<SwarmProtocol> gs{fixtures::warehouse(), fixtures::factory()};
  EXPECT_DOUBLE_EQ(e_frac(total_subscription(gs), gs), 1.0);
  EXPECT_DOUBLE_EQ(e_frac({}, gs), 0.0);
  auto s = fixtures::sub({{"T", {"partReq", "partOK", "pos"}}});
  // 3 of 5 types for one of 4 roles.
  EXPECT_DOUBLE_EQ(e_frac(s, gs), 0.15);
  EXPECT_THROW(e_frac({}, {SwarmProtocol::empty()}), Error);
}

TEST(Bench, SingleProtocolGivesEqualSizes) {
  auto r = bench_compare({fixtures::warehouse()}, {}, 1, 1'000);
  ASSERT_TRUE(r.exact_size.has_value());
  EXPECT_EQ(r.alg1_size, *r.exact_size);
  EXPECT_EQ(r.transitions, std::optional<std::size_t>{4});
}

TEST(Bench, CapSkipsExact) {
  auto r = bench_compare({fixtures::warehouse(), fixtures::factory()}, {}, 1, 2);
  EXPECT_FALSE(r.exact_size.has_value());
  EXPECT_FALSE(r.exact_skipped.empty());
  EXPECT_GT(r.alg1_size, 0u);
}

TEST(Bench, CsvRowsMatchHeader) {
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  auto h = csv_header();
  auto r = bench_compare({fixtures::warehouse(), fixtures::factory()}, {}, 1, 2);
  EXPECT_EQ(count(h), count(to_csv(r)));
  EXPECT_EQ(h.rfind("instance,", 0), 0u);
}

TEST(Bench, SuiteIsDeterministicAndOrdered) {
  SuiteParams p;
  p.sizes = {2, 3};
  p.instances_per_size = 2;
  p.repetitions = 1;
  p.base = params(0, 2);
  auto a = run_suite(p);
  p.parallel = true;
  auto b = run_suite(p);
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(b.size(), 4u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].n_protocols, b[k].n_protocols);
    EXPECT_EQ(a[k].alg1_size, b[k].alg1_size);
    EXPECT_EQ(a[k].exact_size, b[k].exact_size);
    EXPECT_EQ(a[k].total_size, b[k].total_size);
  }
}
