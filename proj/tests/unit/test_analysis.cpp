#include <doctest.h>

#include <cmath>

#include "momo/analysis.hpp"
#include "momo/errors.hpp"
#include "momo/rng.hpp"
#include "support/oracles.hpp"

using namespace momo;

namespace {

PredLabelSeries series_of(const std::vector<double>& preds, const std::vector<double>& labels) {
  PredLabelSeries s;
  Date d = Date::from_ymd(2021, 3, 1);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    s.dates.push_back(d);
    d = d.next_weekday();
  }
  s.predictions = preds;
  s.labels = labels;
  return s;
}

}  // namespace

TEST_SUITE("analysis.pearson") {
  TEST_CASE("positive affine relation gives 1") {
    const std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    CHECK(*pearson_correlation(x, y) == doctest::Approx(1.0));
  }

  TEST_CASE("negation gives -1") {
    const std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(-v);
    CHECK(*pearson_correlation(x, y) == doctest::Approx(-1.0));
  }

  TEST_CASE("closed-form sqrt(3)/2 example") {
    const std::vector<double> x = {1, 2, 3};
    const std::vector<double> y = {1, 2, 2};
    CHECK(*pearson_correlation(x, y) == doctest::Approx(std::sqrt(3.0) / 2.0));
  }

  TEST_CASE("constant input is undefined, bad shapes throw") {
    CHECK_FALSE(pearson_correlation(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3})
                    .has_value());
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1}, std::vector<double>{1}),
                    DataError);
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1, 2}, std::vector<double>{1}),
                    DataError);
  }

  TEST_CASE("affine invariance and sign flip") {
    SplitMix64 stream(3);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
      x.push_back(stream.next_uniform(-1, 1));
      y.push_back(stream.next_uniform(-1, 1));
    }
    const double base = *pearson_correlation(x, y);
    std::vector<double> ax;
    for (double v : x) ax.push_back(3.0 * v + 0.7);
    CHECK(*pearson_correlation(ax, y) == doctest::Approx(base).epsilon(1e-12));
    std::vector<double> nx;
    for (double v : x) nx.push_back(-2.0 * v);
    CHECK(*pearson_correlation(nx, y) == doctest::Approx(-base).epsilon(1e-12));
  }
}

TEST_SUITE("analysis.groups") {
  TEST_CASE("168-day span makes two 84-day groups per ticker") {
    SplitMix64 stream(5);
    std::vector<double> preds, labels;
    for (int i = 0; i < 168; ++i) {
      preds.push_back(stream.next_uniform(-1, 1));
      labels.push_back(stream.next_uniform(-1, 1));
    }
    std::map<std::string, PredLabelSeries> input;
    input["A"] = series_of(preds, labels);
    const std::vector<GroupStats> stats = group_correlations(input);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].group_index == 0);
    CHECK(stats[1].group_index == 1);
    CHECK(stats[0].n_days == 84);
    CHECK(stats[1].n_days == 84);
    CHECK(stats[1].start > stats[0].end);
  }

  TEST_CASE("perfect predictions give correlation 1 in every group") {
    SplitMix64 stream(6);
    std::vector<double> labels;
    for (int i = 0; i < 120; ++i) labels.push_back(stream.next_uniform(-1, 1));
    std::map<std::string, PredLabelSeries> input;
    input["A"] = series_of(labels, labels);
    for (const GroupStats& g : group_correlations(input)) {
      REQUIRE(g.correlation.has_value());
      CHECK(*g.correlation == doctest::Approx(1.0));
    }
  }

  TEST_CASE("constant predictions are flagged undefined") {
    SplitMix64 stream(7);
    std::vector<double> labels;
    for (int i = 0; i < 90; ++i) labels.push_back(stream.next_uniform(-1, 1));
    std::map<std::string, PredLabelSeries> input;
    input["A"] = series_of(std::vector<double>(90, 0.5), labels);
    const std::vector<GroupStats> stats = group_correlations(input);
    REQUIRE(!stats.empty());
    for (const GroupStats& g : stats) CHECK_FALSE(g.correlation.has_value());
  }

  TEST_CASE("short tails are kept at >= 20 days and dropped below") {
    SplitMix64 stream(8);
    auto make = [&](int n) {
      std::vector<double> p, l;
      for (int i = 0; i < n; ++i) {
        p.push_back(stream.next_uniform(-1, 1));
        l.push_back(stream.next_uniform(-1, 1));
      }
      std::map<std::string, PredLabelSeries> input;
      input["A"] = series_of(p, l);
      return group_correlations(input);
    };
    CHECK(make(84 + 20).size() == 2);
    CHECK(make(84 + 19).size() == 1);
    CHECK(make(84 + 84).size() == 2);
  }

  TEST_CASE("group partition covers the span disjointly") {
    SplitMix64 stream(9);
    std::vector<double> p, l;
    for (int i = 0; i < 215; ++i) {
      p.push_back(stream.next_uniform(-1, 1));
      l.push_back(stream.next_uniform(-1, 1));
    }
    std::map<std::string, PredLabelSeries> input;
    input["A"] = series_of(p, l);
    const auto stats = group_correlations(input);
    int covered = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      covered += stats[i].n_days;
      if (i > 0) CHECK(stats[i].start > stats[i - 1].end);
    }
    CHECK(covered == 215);  // 84 + 84 + 47-day tail
  }
}

TEST_SUITE("analysis.selection") {
  TEST_CASE("threshold rules: strict inequality, undefined excluded") {
    std::vector<GroupStats> stats;
    GroupStats a;
    a.ticker = "A";
    a.group_index = 0;
    a.correlation = 0.71;
    stats.push_back(a);
    GroupStats b;
    b.ticker = "B";
    b.group_index = 0;
    b.correlation = 0.70;
    stats.push_back(b);
    GroupStats c;
    c.ticker = "C";
    c.group_index = 0;
    stats.push_back(c);  // undefined correlation
    const auto selection = select_high_correlation(stats, 0.7);
    REQUIRE(selection.count(0) == 1);
    CHECK(selection.at(0) == std::set<std::string>{"A"});
  }

  TEST_CASE("all high or all low") {
    std::vector<GroupStats> stats;
    for (const char* t : {"A", "B", "C"}) {
      GroupStats g;
      g.ticker = t;
      g.group_index = 0;
      g.correlation = 0.9;
      stats.push_back(g);
    }
    CHECK(select_high_correlation(stats).at(0).size() == 3);
    for (GroupStats& g : stats) g.correlation = 0.1;
    CHECK(select_high_correlation(stats).at(0).empty());
  }

  TEST_CASE("raising the threshold never adds a ticker") {
    SplitMix64 stream(10);
    std::vector<GroupStats> stats;
    for (int g = 0; g < 4; ++g) {
      for (int t = 0; t < 6; ++t) {
        GroupStats s;
        s.ticker = "T" + std::to_string(t);
        s.group_index = g;
        s.correlation = stream.next_uniform(-1.0, 1.0);
        stats.push_back(s);
      }
    }
    const auto loose = select_high_correlation(stats, 0.2);
    const auto tight = select_high_correlation(stats, 0.6);
    for (const auto& [group, tickers] : tight) {
      for (const std::string& t : tickers) {
        CHECK(loose.at(group).count(t) == 1);
      }
    }
  }

  TEST_CASE("restriction keeps dates and filters tickers by group period") {
    Panel predictions;
    Date d = Date::from_ymd(2021, 3, 1);
    std::vector<Date> dates;
    for (int i = 0; i < 40; ++i) {
      predictions[d] = {{"A", 0.01}, {"B", -0.01}};
      dates.push_back(d);
      d = d.next_weekday();
    }
    std::vector<GroupStats> stats;
    GroupStats ga;
    ga.ticker = "A";
    ga.group_index = 0;
    ga.start = dates[0];
    ga.end = dates[19];
    ga.correlation = 0.9;
    GroupStats gb;
    gb.ticker = "B";
    gb.group_index = 0;
    gb.start = dates[0];
    gb.end = dates[19];
    gb.correlation = 0.1;
    GroupStats ga2;
    ga2.ticker = "A";
    ga2.group_index = 1;
    ga2.start = dates[20];
    ga2.end = dates[39];
    ga2.correlation = 0.2;
    stats = {ga, gb, ga2};
    const auto selection = select_high_correlation(stats, 0.7);
    const Panel restricted = restrict_predictions(predictions, stats, selection);
    CHECK(restricted.size() == predictions.size());
    CHECK(restricted.at(dates[5]).size() == 1);
    CHECK(restricted.at(dates[5]).count("A") == 1);
    CHECK(restricted.at(dates[25]).empty());  // nothing selected in group 1
  }
}

TEST_SUITE("analysis.dispersion") {
  TEST_CASE("two increasing points have rank correlation 1") {
    std::vector<GroupStats> stats(2);
    stats[0].label_std = 0.01;
    stats[0].correlation = 0.2;
    stats[1].label_std = 0.03;
    stats[1].correlation = 0.8;
    const DispersionTable table = dispersion_correlation_table(stats);
    REQUIRE(table.rank_correlation.has_value());
    CHECK(*table.rank_correlation == doctest::Approx(1.0));
    CHECK(table.points.size() == 2);
  }

  TEST_CASE("identical groups are flagged undefined") {
    std::vector<GroupStats> stats(3);
    for (GroupStats& g : stats) {
      g.label_std = 0.02;
      g.correlation = 0.5;
    }
    const DispersionTable table = dispersion_correlation_table(stats);
    CHECK_FALSE(table.rank_correlation.has_value());
  }

  TEST_CASE("fewer than two usable groups is an error") {
    std::vector<GroupStats> stats(2);
    stats[0].correlation = 0.5;
    stats[0].label_std = 0.01;
    // stats[1] undefined correlation
    CHECK_THROWS_AS(dispersion_correlation_table(stats), DataError);
  }

  TEST_CASE("spearman is monotone-invariant") {
    const std::vector<double> x = {0.01, 0.02, 0.05, 0.11};
    const std::vector<double> y = {0.1, 0.3, 0.5, 0.9};
    CHECK(*spearman_rank_correlation(x, y) == doctest::Approx(1.0));
    std::vector<double> cubed;
    for (double v : x) cubed.push_back(v * v * v);
    CHECK(*spearman_rank_correlation(cubed, y) == doctest::Approx(1.0));
  }

  TEST_CASE("signal-to-noise rising with group index gives positive rank correlation") {
    // Labels are signal + fixed noise; the known signal's scale grows per
    // group, so both the label dispersion and the achievable correlation rise.
    const int group_len = 30;
    const int n_groups = 4;
    std::vector<double> preds, labels;
    for (int g = 0; g < n_groups; ++g) {
      const double signal_scale = 0.005 * static_cast<double>(g + 1);
      const double noise_scale = 0.008;
      for (int i = 0; i < group_len; ++i) {
        const auto key = static_cast<std::uint64_t>(g * group_len + i);
        const double signal = signal_scale * keyed_normal(123, key, 0, 0);
        const double noise = noise_scale * keyed_normal(123, key, 1, 0);
        preds.push_back(signal);
        labels.push_back(signal + noise);
      }
    }
    std::map<std::string, PredLabelSeries> input;
    input["A"] = series_of(preds, labels);
    const std::vector<GroupStats> stats = group_correlations(input, group_len);
    REQUIRE(stats.size() == static_cast<std::size_t>(n_groups));
    const DispersionTable table = dispersion_correlation_table(stats);
    REQUIRE(table.rank_correlation.has_value());
    CHECK(*table.rank_correlation > 0.0);
  }
}

TEST_SUITE("analysis.horizon_decay") {
  TEST_CASE("insufficient history is an error") {
    momo::testing::ArScheduleSpec spec;
    spec.n_days = 200;  // fewer than 240 + 40 usable days
    const Universe u = momo::testing::universe_from_schedules(spec, 1);
    HorizonDecayConfig config;
    config.train.epochs = 1;
    CHECK_THROWS_AS(horizon_decay_experiment(u, config), DataError);
  }

  TEST_CASE("tiny configuration produces defined correlations deterministically") {
    momo::testing::ArScheduleSpec spec;
    spec.seed = 4242;
    spec.n_days = 150;
    const Universe u = momo::testing::universe_from_schedules(spec, 2);
    HorizonDecayConfig config;
    config.train_size = 60;
    config.horizon_days = 40;
    config.split = 20;
    config.train.epochs = 12;
    config.train.hidden_dim = 8;
    config.train.seed = 1;
    const HorizonDecayResult a = horizon_decay_experiment(u, config);
    const HorizonDecayResult b = horizon_decay_experiment(u, config);
    CHECK(a.n_first == 40);  // 20 days x 2 tickers
    CHECK(a.n_last == 40);
    REQUIRE(a.corr_first.has_value());
    REQUIRE(a.corr_last.has_value());
    CHECK(*a.corr_first == *b.corr_first);
    CHECK(*a.corr_last == *b.corr_last);
  }

  TEST_CASE("zero predictor flags both halves undefined") {
    momo::testing::ArScheduleSpec spec;
    spec.seed = 17;
    spec.n_days = 150;
    const Universe u = momo::testing::universe_from_schedules(spec, 1);
    HorizonDecayConfig config;
    config.train_size = 60;
    config.kind = PredictorKind::zero;
    const HorizonDecayResult r = horizon_decay_experiment(u, config);
    CHECK_FALSE(r.corr_first.has_value());
    CHECK_FALSE(r.corr_last.has_value());
  }
}
