#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "momo/backtest.hpp"
#include "momo/errors.hpp"
#include "momo/rng.hpp"
#include "support/oracles.hpp"

using namespace momo;

namespace {

Date day(int offset) {
  Date d = Date::from_ymd(2020, 1, 6);
  for (int i = 0; i < offset; ++i) d = d.next_weekday();
  return d;
}

}  // namespace

TEST_SUITE("backtest.filter") {
  TEST_CASE("inside the band maps to zero") {
    CHECK(filter_and_shrink(0.003, FilterConfig{}) == 0.0);
    CHECK(filter_and_shrink(-0.005, FilterConfig{}) == 0.0);
    CHECK(filter_and_shrink(0.0, FilterConfig{}) == 0.0);
  }

  TEST_CASE("positive scores shrink by c, negative grow by c") {
    CHECK(filter_and_shrink(0.02, FilterConfig{}) == doctest::Approx(0.015));
    CHECK(filter_and_shrink(-0.02, FilterConfig{}) == doctest::Approx(-0.015));
  }

  TEST_CASE("grid properties: sign, magnitude, monotonicity at tau = c") {
    const FilterConfig cfg{0.005, 0.005};
    double prev = filter_and_shrink(-0.05, cfg);
    for (int i = 0; i <= 10000; ++i) {
      const double score = -0.05 + 0.1 * static_cast<double>(i) / 10000.0;
      const double out = filter_and_shrink(score, cfg);
      if (std::abs(score) <= cfg.no_trade_band) {
        CHECK(out == 0.0);
      } else {
        CHECK(((out > 0) == (score > 0)));
        CHECK(std::abs(out) == doctest::Approx(std::abs(score) - cfg.shrink_constant));
      }
      CHECK(out >= prev);  // monotone when tau == c
      prev = out;
    }
  }

  TEST_CASE("band wider than shrink keeps a jump but stays sign-correct") {
    const FilterConfig cfg{0.01, 0.002};
    CHECK(filter_and_shrink(0.009, cfg) == 0.0);
    CHECK(filter_and_shrink(0.011, cfg) == doctest::Approx(0.009));
  }

  TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS(validate_filter(FilterConfig{-0.1, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate_filter(FilterConfig{0.001, 0.002}), ConfigError);
    CHECK_NOTHROW(validate_filter(FilterConfig{0.0, 0.0}));
  }
}

TEST_SUITE("backtest.allocate") {
  TEST_CASE("hand-computed two-ticker split") {
    const PositionMap scores = {{"A", 0.015}, {"B", -0.005}};
    const PositionMap book = allocate_positions(scores, 1'000'000.0);
    CHECK(book.at("A") == doctest::Approx(750'000.0));
    CHECK(book.at("B") == doctest::Approx(-250'000.0));
  }

  TEST_CASE("all zero scores mean an empty book") {
    CHECK(allocate_positions({{"A", 0.0}, {"B", 0.0}}, 100.0).empty());
    CHECK(allocate_positions({}, 100.0).empty());
  }

  TEST_CASE("single score takes the full equity") {
    const PositionMap book = allocate_positions({{"A", 0.01}}, 5000.0);
    CHECK(book.at("A") == doctest::Approx(5000.0));
  }

  TEST_CASE("gross exposure equals equity and scaling scores changes nothing") {
    SplitMix64 stream(31);
    for (int trial = 0; trial < 50; ++trial) {
      PositionMap scores;
      const int n = 1 + static_cast<int>(stream.next() % 6);
      for (int k = 0; k < n; ++k) {
        scores["T" + std::to_string(k)] = stream.next_uniform(-0.03, 0.03);
      }
      const double equity = stream.next_uniform(1000.0, 2'000'000.0);
      const PositionMap book = allocate_positions(scores, equity);
      double gross = 0.0;
      for (const auto& [ticker, pos] : book) gross += std::abs(pos);
      if (!book.empty()) CHECK(gross == doctest::Approx(equity).epsilon(1e-12));

      PositionMap scaled;
      for (const auto& [ticker, s] : scores) scaled[ticker] = 3.7 * s;
      const PositionMap book2 = allocate_positions(scaled, equity);
      REQUIRE(book2.size() == book.size());
      for (const auto& [ticker, pos] : book) {
        CHECK(book2.at(ticker) == doctest::Approx(pos).epsilon(1e-12));
      }
    }
  }
}

TEST_SUITE("backtest.step_day") {
  TEST_CASE("pnl from a long position") {
    const DayResult r = step_day({{"A", 500'000.0}}, {{"A", 0.02}}, {}, 0.0);
    CHECK(r.pnl == doctest::Approx(10'000.0));
    CHECK(r.costs == 0.0);
  }

  TEST_CASE("empty book does nothing") {
    const DayResult r = step_day({}, {}, {}, 0.01);
    CHECK(r.pnl == 0.0);
    CHECK(r.costs == 0.0);
  }

  TEST_CASE("opening turnover is charged at the commission rate") {
    const DayResult r = step_day({{"A", 500'000.0}}, {{"A", 0.0}}, {}, 0.0001);
    CHECK(r.costs == doctest::Approx(50.0));
  }

  TEST_CASE("closing a position also pays turnover") {
    const DayResult r = step_day({}, {}, {{"A", 500'000.0}}, 0.0001);
    CHECK(r.costs == doctest::Approx(50.0));
  }

  TEST_CASE("missing realized return for a held ticker halts") {
    CHECK_THROWS_WITH_AS(step_day({{"A", 1.0}}, {}, {}, 0.0), doctest::Contains("A"), DataError);
  }
}

TEST_SUITE("backtest.run") {
  TEST_CASE("zero predictions keep equity flat") {
    Panel predictions;
    Panel realized;
    for (int i = 0; i < 5; ++i) {
      predictions[day(i)] = {{"A", 0.0}};
      realized[day(i)] = {{"A", 0.01}};
    }
    const BacktestResult result =
        run_backtest(predictions, realized, FilterConfig{}, 1'000'000.0, 0.0001);
    for (const double e : result.curve.equity) CHECK(e == 1'000'000.0);
    CHECK(result.trades.empty());
    const BacktestReport report = compute_metrics(result, 1);
    CHECK(report.total_return == 0.0);
    CHECK_FALSE(report.win_rate.has_value());
    CHECK(report.in_market_days_ratio == 0.0);
  }

  TEST_CASE("constant score compounds daily returns") {
    Panel predictions;
    Panel realized;
    for (int i = 0; i < 3; ++i) {
      predictions[day(i)] = {{"A", 0.02}};
      realized[day(i)] = {{"A", 0.01}};
    }
    const BacktestResult result =
        run_backtest(predictions, realized, FilterConfig{}, 1'000'000.0, 0.0);
    REQUIRE(result.curve.equity.size() == 3);
    CHECK(result.curve.equity[2] == doctest::Approx(1'030'301.0));
    REQUIRE(result.trades.size() == 1);
    CHECK(result.trades[0].win);
    CHECK(result.trades[0].open_date == day(0));
    CHECK(result.trades[0].close_date == day(2));
  }

  TEST_CASE("bankruptcy halts with the offending date") {
    Panel predictions;
    Panel realized;
    predictions[day(0)] = {{"A", 0.02}};
    realized[day(0)] = {{"A", -1.5}};
    CHECK_THROWS_AS(run_backtest(predictions, realized, FilterConfig{}, 1000.0, 0.0),
                    NumericError);
  }

  TEST_CASE("episodes split on flat days and pay their closing costs") {
    Panel predictions;
    Panel realized;
    const double scores[6] = {0.02, 0.02, 0.0, 0.0, -0.03, 0.0};
    for (int i = 0; i < 6; ++i) {
      predictions[day(i)] = {{"A", scores[i]}};
      realized[day(i)] = {{"A", 0.0}};
    }
    const double rate = 0.0001;
    const BacktestResult result =
        run_backtest(predictions, realized, FilterConfig{}, 1'000'000.0, rate);
    REQUIRE(result.trades.size() == 2);
    // First episode: open cost + close cost on zero pnl days -> a loss.
    CHECK(result.trades[0].open_date == day(0));
    CHECK(result.trades[0].close_date == day(1));
    CHECK(result.trades[0].net_pnl < 0.0);
    CHECK_FALSE(result.trades[0].win);
    CHECK(result.trades[1].open_date == day(4));
    CHECK(result.trades[1].close_date == day(4));
  }

  TEST_CASE("engine matches the naive oracle on random instances") {
    SplitMix64 stream(41);
    for (int trial = 0; trial < 25; ++trial) {
      Panel predictions;
      Panel realized;
      const int n_tickers = 1 + static_cast<int>(stream.next() % 5);
      const int n_days = 5 + static_cast<int>(stream.next() % 46);
      for (int i = 0; i < n_days; ++i) {
        const Date date = day(i);
        predictions[date];
        for (int k = 0; k < n_tickers; ++k) {
          const std::string ticker = "T" + std::to_string(k);
          predictions[date][ticker] = stream.next_uniform(-0.02, 0.02);
          realized[date][ticker] = stream.next_uniform(-0.03, 0.03);
        }
      }
      const double equity0 = 1'000'000.0;
      const double rate = 0.0001;
      const BacktestResult engine =
          run_backtest(predictions, realized, FilterConfig{}, equity0, rate);
      const momo::testing::NaiveBacktestOutput oracle =
          momo::testing::naive_backtest(predictions, realized, 0.005, 0.005, equity0, rate);
      REQUIRE(engine.curve.equity.size() == oracle.equity.size());
      for (std::size_t i = 0; i < oracle.equity.size(); ++i) {
        CHECK(engine.curve.equity[i] ==
              doctest::Approx(oracle.equity[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_SUITE("backtest.metrics") {
  TEST_CASE("drawdown of the textbook path is 25%") {
    const std::vector<double> path = {100, 120, 90, 130};
    CHECK(max_drawdown(path) == doctest::Approx(0.25));
  }

  TEST_CASE("drawdown is zero iff the curve never declines") {
    CHECK(max_drawdown(std::vector<double>{1, 2, 3}) == 0.0);
    CHECK(max_drawdown(std::vector<double>{1, 1, 1}) == 0.0);
    CHECK(max_drawdown(std::vector<double>{2, 1, 3}) > 0.0);
  }

  TEST_CASE("drawdown matches the quadratic oracle on random curves") {
    SplitMix64 stream(43);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> path;
      double e = 1000.0;
      const int n = 2 + static_cast<int>(stream.next() % 60);
      for (int i = 0; i < n; ++i) {
        e *= 1.0 + stream.next_uniform(-0.05, 0.05);
        path.push_back(e);
      }
      CHECK(max_drawdown(path) ==
            doctest::Approx(momo::testing::max_drawdown_quadratic(path)).epsilon(1e-12));
    }
  }

  TEST_CASE("report identities reproduce the published strategy table") {
    EquityCurve curve;
    curve.start_equity = 1'000'000.0;
    Date d = Date::from_ymd(2018, 10, 4);
    for (int i = 0; i < 1140; ++i) {
      curve.dates.push_back(d);
      d = d.next_weekday();
      curve.equity.push_back(1'000'000.0);
    }
    curve.equity.back() = 4'253'800.0;
    std::vector<PositionMap> books(1140);
    for (int i = 0; i < 473; ++i) books[static_cast<std::size_t>(i)]["A"] = 1.0;
    const BacktestReport report =
        compute_metrics(curve, books, std::vector<TradeEpisode>{}, 1, 0.0001);
    CHECK(report.market_days == 1140);
    CHECK(report.total_return == doctest::Approx(3.2538).epsilon(1e-12));
    CHECK(report.annual_return == doctest::Approx(0.37718672).epsilon(3e-4));
    CHECK(std::abs(report.annual_return - 0.37718672) < 1e-4);
    CHECK(report.in_market_days_ratio == 473.0 / 1140.0);
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.6f", report.in_market_days_ratio * 100.0);
    CHECK(std::string(pct) == "41.491228");
    CHECK(report.equity_final / report.equity_initial - 1.0 == report.total_return);
    CHECK(std::pow(1.0 + report.total_return, 252.0 / 1140.0) - 1.0 == report.annual_return);
  }

  TEST_CASE("position-day win rate differs from the episode win rate") {
    Panel predictions;
    Panel realized;
    const double rets[4] = {0.02, -0.005, 0.01, 0.03};
    for (int i = 0; i < 4; ++i) {
      predictions[day(i)] = {{"A", 0.02}};
      realized[day(i)] = {{"A", rets[i]}};
    }
    const BacktestResult result =
        run_backtest(predictions, realized, FilterConfig{}, 1'000'000.0, 0.0);
    const BacktestReport report = compute_metrics(result, 1);
    REQUIRE(report.win_rate.has_value());
    CHECK(*report.win_rate == 1.0);  // single overall-profitable episode
    REQUIRE(report.win_rate_position_days.has_value());
    CHECK(*report.win_rate_position_days == doctest::Approx(0.75));
  }

  TEST_CASE("zero universe size is rejected") {
    EquityCurve curve;
    curve.start_equity = 1.0;
    curve.dates.push_back(day(0));
    curve.equity.push_back(1.0);
    std::vector<PositionMap> books(1);
    CHECK_THROWS_AS(compute_metrics(curve, books, std::vector<TradeEpisode>{}, 0, 0.0),
                    ConfigError);
  }
}
