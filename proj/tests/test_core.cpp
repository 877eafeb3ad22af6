#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "dpfdr/core.hpp"
#include "dpfdr/noise.hpp"

using namespace dpfdr;

TEST_CASE("bhq critical values") {
  const CriticalValues cv = bhq_critical_values(0.2, 4);
  REQUIRE(cv.alphas.size() == 4);
  CHECK(cv.alphas[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(cv.alphas[1] == doctest::Approx(0.10).epsilon(1e-14));
  CHECK(cv.alphas[2] == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(cv.alphas[3] == doctest::Approx(0.20).epsilon(1e-14));

  CHECK(bhq_critical_values(0.5, 1).alphas == std::vector<double>{0.5});
  CHECK(bhq_critical_values(0.1, 1000).alphas[99] == doctest::Approx(0.01).epsilon(1e-14));

  CHECK_THROWS_AS(bhq_critical_values(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(bhq_critical_values(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(bhq_critical_values(0.1, 0), std::invalid_argument);
}

TEST_CASE("bhq critical values strictly increase") {
  NoiseStream rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const double q = rng.next_uniform() * 0.98 + 0.01;
    const std::size_t m = 1 + static_cast<std::size_t>(rng.next_uniform() * 200);
    const CriticalValues cv = bhq_critical_values(q, m);
    for (std::size_t j = 1; j < m; ++j) CHECK(cv.alphas[j] > cv.alphas[j - 1]);
  }
}

TEST_CASE("fdp accounting") {
  const std::vector<Label> tn_fn{Label::TrueNull, Label::FalseNull};

  RejectionReport empty;
  FdpCounts c = fdp_accounting(empty, tn_fn);
  CHECK(c.V == 0);
  CHECK(c.R == 0);
  CHECK(c.fdp == 0.0);

  RejectionReport both;
  both.rejected = {0, 1};
  c = fdp_accounting(both, tn_fn);
  CHECK(c.V == 1);
  CHECK(c.R == 2);
  CHECK(c.fdp == 0.5);

  RejectionReport all_nulls;
  all_nulls.rejected = {0, 1, 2};
  c = fdp_accounting(all_nulls, {Label::TrueNull, Label::TrueNull, Label::TrueNull});
  CHECK(c.V == 3);
  CHECK(c.R == 3);
  CHECK(c.fdp == 1.0);

  RejectionReport out_of_range;
  out_of_range.rejected = {5};
  CHECK_THROWS_AS(fdp_accounting(out_of_range, tn_fn), std::out_of_range);
}

TEST_CASE("fdp stays in [0,1] on random reports") {
  NoiseStream rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.next_uniform() * 30);
    std::vector<Label> labels(m);
    RejectionReport report;
    for (std::size_t i = 0; i < m; ++i) {
      labels[i] = rng.next_uniform() < 0.5 ? Label::TrueNull : Label::FalseNull;
      if (rng.next_uniform() < 0.3) report.rejected.push_back(i);
    }
    const FdpCounts c = fdp_accounting(report, labels);
    CHECK(c.fdp >= 0.0);
    CHECK(c.fdp <= 1.0);
    CHECK(c.V <= c.R);
    if (c.R == 0) CHECK(c.fdp == 0.0);
  }
}

TEST_CASE("is_adaptive") {
  PValueVector p;
  p.values = {0.01, 0.04, 0.9};
  const CriticalValues cv = bhq_critical_values(0.2, 3);

  RejectionReport none;
  CHECK(is_adaptive(none, p, cv));

  RejectionReport two;
  two.rejected = {0, 1};
  CHECK(is_adaptive(two, p, cv));  // max rejected p = 0.04 <= alpha_2 = 0.1333...

  PValueVector p2;
  p2.values = {0.01, 0.20, 0.9};
  CHECK_FALSE(is_adaptive(two, p2, cv));  // 0.20 > 0.1333...

  RejectionReport bad;
  bad.rejected = {7};
  CHECK_THROWS_AS(is_adaptive(bad, p, cv), std::out_of_range);
}

TEST_CASE("is_adaptive allows gaps in the sorted order") {
  PValueVector p;
  p.values = {0.001, 0.5, 0.002, 0.003};
  const CriticalValues cv = bhq_critical_values(0.4, 4);
  RejectionReport skip;
  skip.rejected = {0, 3};  // skips the second-smallest p-value
  CHECK(is_adaptive(skip, p, cv));  // max p = 0.003 <= alpha_2 = 0.2
}

TEST_CASE("subsets of adaptive reports stay adaptive when under the smaller cutoff") {
  NoiseStream rng(13);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_uniform() * 12);
    PValueVector p;
    for (std::size_t i = 0; i < m; ++i) p.values.push_back(rng.next_uniform());
    const CriticalValues cv = bhq_critical_values(0.3, m);

    RejectionReport s;
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.next_uniform() < 0.4) s.rejected.push_back(i);
    }
    if (!is_adaptive(s, p, cv)) continue;

    RejectionReport sub;
    for (std::size_t idx : s.rejected) {
      if (rng.next_uniform() < 0.6) sub.rejected.push_back(idx);
    }
    double maxp = 0.0;
    for (std::size_t idx : sub.rejected) maxp = std::max(maxp, p.values[idx]);
    if (sub.rejected.empty() || maxp <= cv.alphas[sub.rejected.size() - 1]) {
      CHECK(is_adaptive(sub, p, cv));
    }
  }
}

TEST_CASE("pvalue vector validation") {
  PValueVector p;
  p.values = {0.0, 1.0, 0.5};
  CHECK_NOTHROW(p.validate());
  p.values.push_back(1.5);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.values.pop_back();
  p.labels.emplace(2, Label::TrueNull);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("privacy params validation") {
  PrivacyParams ok{1.0, 1e-6, 0.01, 1e-6, 5};
  CHECK_NOTHROW(ok.validate(10));
  PrivacyParams bad_eps = ok;
  bad_eps.epsilon = 0.0;
  CHECK_THROWS_AS(bad_eps.validate(10), std::invalid_argument);
  PrivacyParams bad_delta = ok;
  bad_delta.delta = 1.0;
  CHECK_THROWS_AS(bad_delta.validate(10), std::invalid_argument);
  PrivacyParams bad_nu = ok;
  bad_nu.nu = 0.0;
  CHECK_THROWS_AS(bad_nu.validate(10), std::invalid_argument);
  PrivacyParams bad_k = ok;
  bad_k.k = 11;
  CHECK_THROWS_AS(bad_k.validate(10), std::invalid_argument);
}
