#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "momo/config.hpp"
#include "momo/errors.hpp"
#include "momo/pipeline.hpp"

using namespace momo;
namespace fs = std::filesystem;

namespace {

std::string small_synthetic_config(const std::string& out_dir, int epochs = 6,
                                   const std::string& predictor = "lstm") {
  std::ostringstream os;
  os << "{\n"
     << "  \"data_source\": {\"synthetic\": {\"n_tickers\": 2, \"n_days\": 290, \"seed\": 31}},\n"
     << "  \"lstm\": {\"epochs\": " << epochs << ", \"hidden_dim\": 8},\n"
     << "  \"group_len\": 10,\n"
     << "  \"output_dir\": \"" << out_dir << "\",\n"
     << "  \"seed\": 7,\n"
     << "  \"predictor\": \"" << predictor << "\"\n"
     << "}\n";
  return os.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults are the documented ones") {
    const RunConfig c = parse_run_config(R"({"data_source":{"synthetic":{}}})");
    CHECK(c.train_size == 240);
    CHECK(c.horizon == 10);
    CHECK(c.window_len == 10);
    CHECK(c.lstm.epochs == 200);
    CHECK(c.lstm.batch == 0);
    CHECK(c.lstm.learning_rate == 1e-3);
    CHECK(c.lstm.optimizer == "adam");
    CHECK(c.lstm.init_scale == 0.08);
    CHECK(c.lstm.forget_bias_offset == 1.0);
    CHECK(c.lstm.grad_clip_norm == 5.0);
    CHECK(c.lstm.hidden_dim == 32);
    CHECK(c.filter.no_trade_band == 0.005);
    CHECK(c.filter.shrink_constant == 0.005);
    CHECK(c.equity_initial == 1'000'000.0);
    CHECK(c.commission_rate == 0.0001);
    CHECK(c.group_len == 84);
    CHECK(c.seed == 1);
    CHECK(c.predictor == "lstm");
  }

  TEST_CASE("unknown keys are hard errors at every level") {
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"data_source":{"synthetic":{}},"trainsize":1})"),
                         doctest::Contains("trainsize"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_run_config(R"({"data_source":{"synthetic":{"ndays":5}}})"),
        doctest::Contains("ndays"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_run_config(R"({"data_source":{"synthetic":{}},"lstm":{"epoch":3}})"),
        doctest::Contains("epoch"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_run_config(R"({"data_source":{"synthetic":{}},"filter":{"band":1}})"),
        doctest::Contains("band"), ConfigError);
  }

  TEST_CASE("data_source must be exactly one of csv_dir or synthetic") {
    CHECK_THROWS_AS(parse_run_config(R"({"data_source":{}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"data_source":{"csv_dir":"x","synthetic":{}}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({})"), ConfigError);
    CHECK_NOTHROW(parse_run_config(R"({"data_source":{"csv_dir":"somewhere"}})"));
  }

  TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(
        parse_run_config(R"({"data_source":{"synthetic":{}},"lstm":{"epochs":0}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"data_source":{"synthetic":{}},"commission_rate":-0.1})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"data_source":{"synthetic":{}},"predictor":"magic"})"), ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"data_source":{"synthetic":{}},"lstm":{"optimizer":"sgd"}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"data_source":{"synthetic":{"phi1":0.9,"phi2":0.3}}})"), ConfigError);
  }

  TEST_CASE("echo parses back to the same config") {
    const RunConfig c = parse_run_config(small_synthetic_config("/tmp/x"));
    const RunConfig back = parse_run_config(run_config_to_json(c));
    CHECK(back.train_size == c.train_size);
    CHECK(back.lstm.epochs == c.lstm.epochs);
    CHECK(back.seed == c.seed);
    CHECK(back.output_dir == c.output_dir);
    CHECK(back.data_source.synthetic->n_days == c.data_source.synthetic->n_days);
    CHECK(run_config_to_json(back) == run_config_to_json(c));
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("small walk-forward run has the expected shape and is deterministic") {
    const RunConfig config = parse_run_config(small_synthetic_config("/tmp/unused"));
    const RunArtifacts a = run_pipeline(config);
    // 290 days -> 260 samples -> 20 predict days per ticker in 2 folds.
    CHECK(a.folds.size() == 4);
    CHECK(a.predictions.size() == 20);
    CHECK(a.per_ticker.size() == 2);
    for (const auto& [ticker, series] : a.per_ticker) {
      CHECK(series.dates.size() == 20);
    }
    CHECK(a.report.market_days == 20);
    CHECK(a.analysis.groups.size() == 4);  // two 10-day groups per ticker
    CHECK(a.analysis.pooled_correlation.has_value());
    CHECK(a.analysis.persistence_correlation.has_value());
    CHECK(a.analysis.high_correlation_report.has_value());

    const RunArtifacts b = run_pipeline(config);
    CHECK(b.report.equity_final == a.report.equity_final);
    CHECK(b.report.total_return == a.report.total_return);
    REQUIRE(b.folds.size() == a.folds.size());
    for (std::size_t i = 0; i < a.folds.size(); ++i) {
      CHECK(a.folds[i].scores == b.folds[i].scores);
    }
  }

  TEST_CASE("worker count does not change results") {
    RunConfig config = parse_run_config(small_synthetic_config("/tmp/unused", 3));
    config.workers = 1;
    const RunArtifacts serial = run_pipeline(config);
    config.workers = 3;
    const RunArtifacts parallel = run_pipeline(config);
    CHECK(serial.report.equity_final == parallel.report.equity_final);
    for (std::size_t i = 0; i < serial.folds.size(); ++i) {
      CHECK(serial.folds[i].scores == parallel.folds[i].scores);
    }
  }

  TEST_CASE("zero predictor stays in cash with exactly zero return") {
    const RunConfig config =
        parse_run_config(small_synthetic_config("/tmp/unused", 1, "zero"));
    const RunArtifacts a = run_pipeline(config);
    CHECK(a.report.total_return == 0.0);
    CHECK(a.report.in_market_days_ratio == 0.0);
    CHECK_FALSE(a.report.win_rate.has_value());
    CHECK(a.report.equity_final == config.equity_initial);
  }

  TEST_CASE("persistence predictor runs without training") {
    const RunConfig config =
        parse_run_config(small_synthetic_config("/tmp/unused", 1, "persistence"));
    const RunArtifacts a = run_pipeline(config);
    CHECK(a.analysis.pooled_correlation.has_value());
    // Persistence predictions equal the recorded baseline stream.
    CHECK(*a.analysis.pooled_correlation ==
          doctest::Approx(*a.analysis.persistence_correlation).epsilon(1e-12));
  }

  TEST_CASE("too-short histories fail with a data error") {
    RunConfig config = parse_run_config(R"({"data_source":{"synthetic":{"n_days":100}}})");
    CHECK_THROWS_AS(run_pipeline(config), DataError);
  }
}

TEST_SUITE("commands") {
  TEST_CASE("generate writes one deterministic csv per ticker") {
    TempDir tmp("momo_test_generate");
    RunConfig config = parse_run_config(
        R"({"data_source":{"synthetic":{"n_tickers":3,"n_days":40,"seed":2}}})");
    config.output_dir = tmp.path;
    std::ostringstream diag;
    cmd_generate(config, diag);
    const fs::path data = tmp.path / "data";
    REQUIRE(fs::exists(data / "SYN000.csv"));
    REQUIRE(fs::exists(data / "SYN001.csv"));
    REQUIRE(fs::exists(data / "SYN002.csv"));
    const std::string first = slurp(data / "SYN000.csv");
    CHECK(std::count(first.begin(), first.end(), '\n') == 41);  // header + 40 rows

    cmd_generate(config, diag);
    CHECK(slurp(data / "SYN000.csv") == first);
  }

  TEST_CASE("generate warns when no samples will be constructible") {
    TempDir tmp("momo_test_generate_warn");
    RunConfig config = parse_run_config(
        R"({"data_source":{"synthetic":{"n_tickers":1,"n_days":30,"seed":2}}})");
    config.output_dir = tmp.path;
    std::ostringstream diag;
    cmd_generate(config, diag);
    CHECK(diag.str().find("no samples") != std::string::npos);
    CHECK(fs::exists(tmp.path / "data" / "SYN000.csv"));
  }

  TEST_CASE("generate requires a synthetic source") {
    RunConfig config = parse_run_config(R"({"data_source":{"csv_dir":"nowhere"}})");
    std::ostringstream diag;
    CHECK_THROWS_AS(cmd_generate(config, diag), ConfigError);
  }

  TEST_CASE("run writes the full artifact set and csv ingestion round-trips") {
    TempDir gen("momo_test_cmd_gen");
    TempDir out("momo_test_cmd_run");
    RunConfig gen_config = parse_run_config(
        R"({"data_source":{"synthetic":{"n_tickers":2,"n_days":290,"seed":31}}})");
    gen_config.output_dir = gen.path;
    std::ostringstream diag;
    cmd_generate(gen_config, diag);

    // Ingest the generated files instead of regenerating in memory.
    std::string cfg = small_synthetic_config(out.path.string(), 2);
    RunConfig run_config = parse_run_config(cfg);
    run_config.data_source.csv_dir = gen.path / "data";
    run_config.data_source.synthetic.reset();
    cmd_run(run_config, diag, /*dump_features=*/true, /*dump_datasets=*/true);

    for (const char* file :
         {"manifest.json", "report.json", "equity.csv", "trades.csv", "predictions.csv",
          "analysis/groups.csv", "analysis/summary.json"}) {
      CHECK(fs::exists(out.path / file));
    }
    CHECK(fs::exists(out.path / "checkpoints" / "SYN000_fold000.json"));
    CHECK(fs::exists(out.path / "features" / "SYN000.csv"));
    CHECK(fs::exists(out.path / "datasets" / "SYN001_fold001.json"));

    // The synthetic-source run on the same seed matches the csv-ingested run.
    TempDir out2("momo_test_cmd_run_synth");
    RunConfig synth_config = parse_run_config(small_synthetic_config(out2.path.string(), 2));
    cmd_run(synth_config, diag);
    CHECK(slurp(out.path / "equity.csv") == slurp(out2.path / "equity.csv"));
  }

  TEST_CASE("report renders the table in published row order") {
    TempDir out("momo_test_cmd_report");
    RunConfig config = parse_run_config(small_synthetic_config(out.path.string(), 2));
    std::ostringstream diag;
    cmd_run(config, diag);

    std::ostringstream table;
    cmd_report(out.path, /*emit_svg=*/true, table);
    const std::string text = table.str();
    const char* expected_rows[] = {"Start Date",      "End Date",       "Market Days",
                                   "In the Market Days", "Position Qualified", "Commision",
                                   "Equity Initial",  "Equity Final",   "Return",
                                   "Ann. Return",     "Win Rate",       "Max. Drawdown"};
    std::size_t pos = 0;
    for (const char* row : expected_rows) {
      const std::size_t found = text.find(row, pos);
      REQUIRE(found != std::string::npos);
      pos = found;
    }
    CHECK(text.find("Commision           0.01 %") != std::string::npos);
    CHECK(fs::exists(out.path / "equity.svg"));
    const std::string svg = slurp(out.path / "equity.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
  }

  TEST_CASE("report renders n/a win rate for a tradeless run") {
    TempDir out("momo_test_cmd_report_zero");
    RunConfig config = parse_run_config(small_synthetic_config(out.path.string(), 1, "zero"));
    std::ostringstream diag;
    cmd_run(config, diag);
    std::ostringstream table;
    cmd_report(out.path, false, table);
    CHECK(table.str().find("Win Rate            n/a") != std::string::npos);
  }

  TEST_CASE("report on an empty directory names the missing manifest") {
    TempDir out("momo_test_cmd_report_empty");
    std::ostringstream table;
    CHECK_THROWS_WITH_AS(cmd_report(out.path, false, table), doctest::Contains("manifest"),
                         DataError);
  }
}
