#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <vector>

#include "dpfdr/noise.hpp"
#include "dpfdr/private_fdr.hpp"
#include "dpfdr/procedures.hpp"

using namespace dpfdr;

namespace {

PValueVector pv(std::vector<double> values) {
  PValueVector p;
  p.values = std::move(values);
  return p;
}

PrivateFdrConfig config_for(std::size_t k, double q = 0.1, double epsilon = 1.0,
                            double delta = 1e-6, double eta = 1e-3, double nu = 1e-6) {
  PrivateFdrConfig cfg;
  cfg.privacy = {epsilon, delta, eta, nu, k};
  cfg.q = q;
  return cfg;
}

}  // namespace

TEST_CASE("delta_k accuracy bound") {
  // independently computed: 2*sqrt(25*ln(1e6))*ln(1e4)/1
  CHECK(delta_k(25, 10000, 1.0, 1e-6, 2.0) ==
        doctest::Approx(342.34118495457748).epsilon(1e-12));
  // doubling epsilon halves the bound exactly
  CHECK(delta_k(25, 10000, 2.0, 1e-6, 2.0) ==
        doctest::Approx(delta_k(25, 10000, 1.0, 1e-6, 2.0) / 2.0).epsilon(1e-15));
  // monotone in k and m, decreasing in epsilon
  CHECK(delta_k(26, 10000, 1.0, 1e-6) > delta_k(25, 10000, 1.0, 1e-6));
  CHECK(delta_k(25, 20000, 1.0, 1e-6) > delta_k(25, 10000, 1.0, 1e-6));
  CHECK_THROWS_AS(delta_k(25, 10000, 0.0, 1e-6), std::invalid_argument);
}

TEST_CASE("private cutoffs") {
  // eta * Delta_k = 0.5 with eta = 1: ln(0.0011) + 0.5, independently computed
  const auto cut = private_cutoffs(0.1, 100, 1, 1.0, 1e-4, 0.5);
  REQUIRE(cut.size() == 1);
  CHECK(cut[0] == doctest::Approx(-6.3124450991778122).epsilon(1e-12));

  // eta = 0 and vanishing nu: plain ln(q j / m)
  const auto plain = private_cutoffs(0.1, 100, 5, 0.0, 1e-300, 123.0);
  for (std::size_t j = 1; j <= 5; ++j) {
    CHECK(plain[j - 1] ==
          doctest::Approx(std::log(0.1 * static_cast<double>(j) / 100.0)).epsilon(1e-12));
  }

  // strictly increasing in j for nu > 0
  const auto cuts = private_cutoffs(0.2, 50, 10, 0.5, 1e-3, 7.0);
  for (std::size_t j = 1; j < cuts.size(); ++j) CHECK(cuts[j] > cuts[j - 1]);
}

TEST_CASE("degenerate-noise dp_bhq reduces to truncated step-down") {
  const PValueVector p = pv({0.003, 0.04, 0.0007, 0.3, 0.9, 0.012, 0.5, 0.08});
  for (std::size_t k : {std::size_t{2}, std::size_t{4}, std::size_t{8}}) {
    PrivateFdrConfig cfg = config_for(k, 0.2);
    cfg.privacy.eta = 1e-12;  // vanishing sensitivity: cutoff shift ~ 0
    cfg.privacy.nu = 1e-9;    // below every p-value
    const RejectionReport expected = truncated_step_down(p, 0.2, k);

    NoiseStream median = NoiseStream::median();
    CHECK(dp_bhq(p, cfg, median).rejected == expected.rejected);

    cfg.selection_backend = SelectionBackend::OneShot;
    NoiseStream median2 = NoiseStream::median();
    CHECK(fast_dp_bhq(p, cfg, median2).rejected == expected.rejected);
  }
}

TEST_CASE("all-ones input rejects nothing") {
  const PValueVector p = pv(std::vector<double>(6, 1.0));
  PrivateFdrConfig cfg = config_for(3, 0.1, 1.0, 1e-6, 1e-6, 1e-6);
  NoiseStream median = NoiseStream::median();
  CHECK(dp_bhq(p, cfg, median).rejected.empty());
}

TEST_CASE("report invariants under real noise") {
  NoiseStream rng(777111);
  for (int rep = 0; rep < 100; ++rep) {
    NoiseStream trial = rng.child(rep);
    std::vector<double> values(40);
    for (auto& v : values) {
      const double u = trial.next_uniform();
      v = u < 0.4 ? u * 1e-4 : u;
    }
    const PValueVector p = pv(std::move(values));
    PrivateFdrConfig cfg = config_for(10, 0.2, 2.0, 1e-5, 0.05, 1e-8);
    if (rep % 2 == 1) cfg.selection_backend = SelectionBackend::OneShot;
    const RejectionReport report = dp_bhq(p, cfg, trial);

    CHECK(report.R() <= 10);
    std::set<std::size_t> distinct(report.rejected.begin(), report.rejected.end());
    CHECK(distinct.size() == report.rejected.size());
    for (const auto& [idx, value] : report.released_values) {
      CHECK(distinct.count(idx) == 1);
    }
    for (std::size_t idx : report.rejected) CHECK(idx < p.size());
  }
}

TEST_CASE("validation errors") {
  const PValueVector p = pv({0.1, 0.2, 0.3});
  NoiseStream rng(1);
  PrivateFdrConfig cfg = config_for(4);  // k > m
  CHECK_THROWS_AS(dp_bhq(p, cfg, rng), std::invalid_argument);
  cfg = config_for(2, 1.5);
  CHECK_THROWS_AS(dp_bhq(p, cfg, rng), std::invalid_argument);
  cfg = config_for(2);
  cfg.privacy.eta = 0.0;
  CHECK_THROWS_AS(dp_bhq(p, cfg, rng), std::invalid_argument);
}

TEST_CASE("private procedure keeps pace with truncated step-down") {
  // 50 strong signals among uniforms; the private run should reject at least
  // as many as the non-private baseline nearly always (small-scale version of
  // the acceptance check).
  const std::size_t m = 500, signals = 30, k = 40;
  PrivateFdrConfig cfg = config_for(k, 0.1, 2.0, 1e-6, 1e-3, 1e-6);
  NoiseStream base(20240202);
  int wins = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    NoiseStream rng = base.child(t);
    std::vector<double> values(m);
    for (std::size_t i = 0; i < signals; ++i) values[i] = 1e-10;
    for (std::size_t i = signals; i < m; ++i) values[i] = rng.next_uniform();
    const PValueVector p = pv(std::move(values));
    const std::size_t r_private = dp_bhq(p, cfg, rng).R();
    const std::size_t r_baseline = truncated_step_down(p, 0.1, k).R();
    wins += r_private >= r_baseline;
  }
  CHECK(wins >= 90);
}

TEST_CASE("rejections are adaptive to the noise-inflated cutoffs") {
  // Every rejection satisfies y_j <= ln(alpha_j + nu) + eta*Delta_k by
  // construction, so p_{i_j} <= e^{eta(Delta_k - g_j/eta)}(alpha_j + nu) with
  // g_j the release noise. With Delta' = 3*Delta_k the extra 2*Delta_k covers
  // the realized noise at well under the 1% level across a whole run.
  const std::size_t m = 1000, k = 64;
  PrivateFdrConfig cfg = config_for(k, 0.1, 2.0, 1e-6, 1e-3, 1e-6);
  const double dk = delta_k(k, m, cfg.privacy.epsilon, cfg.privacy.delta, 2.0);
  const double inflate = std::exp(3.0 * cfg.privacy.eta * dk);
  NoiseStream base(24681357);
  int adaptive_trials = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    NoiseStream rng = base.child(t);
    std::vector<double> values(m);
    for (std::size_t i = 0; i < 50; ++i) values[i] = 1e-10;
    for (std::size_t i = 50; i < m; ++i) values[i] = rng.next_uniform();
    const PValueVector p = pv(std::move(values));
    const RejectionReport rep = dp_bhq(p, cfg, rng);
    const std::size_t r = rep.R();
    bool ok = true;
    for (std::size_t idx : rep.rejected) {
      const double cutoff =
          inflate * (cfg.q * static_cast<double>(r) / static_cast<double>(m) + cfg.privacy.nu);
      ok = ok && p.values[idx] <= cutoff;
    }
    adaptive_trials += ok;
  }
  CHECK(adaptive_trials >= 196);
}

TEST_CASE("one-shot and peeling backends agree to within 5 rejections on average") {
  const std::size_t m = 1000, k = 64;
  PrivateFdrConfig cfg = config_for(k, 0.1, 2.0, 1e-6, 1e-3, 1e-6);
  NoiseStream base(1029384756);
  double sum_peel = 0.0, sum_shot = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    NoiseStream rng = base.child(t);
    std::vector<double> values(m);
    for (std::size_t i = 0; i < 50; ++i) values[i] = 1e-10;
    for (std::size_t i = 50; i < m; ++i) values[i] = rng.next_uniform();
    const PValueVector p = pv(std::move(values));
    sum_peel += static_cast<double>(dp_bhq(p, cfg, rng).R());
    sum_shot += static_cast<double>(fast_dp_bhq(p, cfg, rng).R());
  }
  CHECK(std::abs(sum_peel - sum_shot) / trials <= 5.0);
}

TEST_CASE("one-shot backend is at least 5x faster than peeling at scale") {
  const std::size_t m = 1000000, k = 1000;
  std::vector<double> values(m);
  NoiseStream setup(99);
  for (auto& v : values) v = setup.next_uniform();
  PValueVector p;
  p.values = std::move(values);
  PrivateFdrConfig cfg = config_for(k, 0.1, 1.0, 1e-6, 1e-3, 1e-9);

  using clock = std::chrono::steady_clock;
  NoiseStream rng1(42);
  const auto t0 = clock::now();
  const RejectionReport slow = dp_bhq(p, cfg, rng1);
  const auto t1 = clock::now();
  cfg.selection_backend = SelectionBackend::OneShot;
  NoiseStream rng2(42);
  const auto t2 = clock::now();
  const RejectionReport fast = fast_dp_bhq(p, cfg, rng2);
  const auto t3 = clock::now();

  const double peeling_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  const double oneshot_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();
  INFO("peeling ", peeling_ms, " ms, one-shot ", oneshot_ms, " ms");
  CHECK(peeling_ms >= 5.0 * oneshot_ms);
  CHECK(slow.R() <= k);
  CHECK(fast.R() <= k);
}
