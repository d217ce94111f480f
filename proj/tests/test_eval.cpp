#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ppgbp/eval.hpp"
#include "test_util.hpp"

using namespace ppgbp;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

EvalReport report_with(const std::string& id, std::size_t n, double mae, double rmsd, double r) {
  EvalReport rep;
  rep.subject_id = id;
  rep.n_beats = n;
  for (auto& m : rep.metrics) m = {mae, rmsd, 0.5 * mae, 0.25 * rmsd, r};
  rep.aami = aami_check(rep.metrics);
  return rep;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("compute_metrics examples") {
  const std::vector<double> p{1, 3}, r{0, 2};
  const auto m = compute_metrics(p, r);
  CHECK(m.mae == 1.0);
  CHECK(m.rmsd == 1.0);
  CHECK(m.me == 1.0);

  // pred [1,3] vs ref [0,0]: MAE 2, RMSD sqrt(5), ME 2; r is undefined for the constant reference.
  CHECK_ERRC(compute_metrics(std::vector<double>{1, 3}, std::vector<double>{0, 0}), Errc::constant_sequence);
  const std::vector<double> q{1, 3, 1, 3}, z{0, 0, 0.0000001, 0};
  const auto k = compute_metrics(q, z);
  CHECK(k.mae == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(k.rmsd == doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
  CHECK(k.me == doctest::Approx(2.0).epsilon(1e-6));

  const std::vector<double> same{100, 120, 110};
  const auto s = compute_metrics(same, same);
  CHECK(s.mae == 0.0);
  CHECK(s.rmsd == 0.0);
  CHECK(s.me == 0.0);
  CHECK(s.pearson_r == doctest::Approx(1.0));

  CHECK_ERRC(compute_metrics(std::vector<double>{1, 2}, std::vector<double>{1}), Errc::length_mismatch);
  CHECK_ERRC(compute_metrics(std::vector<double>{}, std::vector<double>{}), Errc::empty_input);
}

TEST_CASE("metrics match the streaming oracle on random pairs") {
  std::mt19937_64 gen(101);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p(1000), r(1000);
    for (std::size_t i = 0; i < p.size(); ++i) {
      r[i] = 120 + 15 * n(gen);
      p[i] = 0.8 * r[i] + 25 + 6 * n(gen);
    }
    const auto m = compute_metrics(p, r);
    const auto o = oracle::metrics(p, r);
    CHECK(rel_close(m.mae, o.mae, 1e-9));
    CHECK(rel_close(m.rmsd, o.rmsd, 1e-9));
    CHECK(rel_close(m.me, o.me, 1e-9, 1e-12));
    CHECK(rel_close(m.std_abs_err, o.std_abs, 1e-9));
    CHECK(rel_close(m.pearson_r, o.r, 1e-9));
    CHECK(m.mae <= m.rmsd);
    CHECK(std::abs(m.me) <= m.mae);
    CHECK(std::abs(m.pearson_r) <= 1.0);
  }
}

TEST_CASE("mae <= rmsd on heavy-tailed fixtures") {
  std::mt19937_64 gen(7);
  std::cauchy_distribution<double> c(0, 3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(2 + gen() % 300), r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      r[i] = static_cast<double>(i);
      p[i] = r[i] + c(gen);
    }
    const auto m = compute_metrics(p, r);
    CHECK(m.mae <= m.rmsd * (1 + 1e-15));
  }
}

TEST_CASE("pearson r is invariant under positive affine maps") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> p(500), r(500);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i] = n(gen);
    p[i] = r[i] + 0.5 * n(gen);
  }
  const double base = compute_metrics(p, r).pearson_r;
  for (auto [a, b] : {std::pair{2.0, 3.0}, {0.01, -50.0}, {1000.0, 120.0}}) {
    std::vector<double> pa(p.size()), ra(r.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      pa[i] = a * p[i] + b;
      ra[i] = a * r[i] - b;
    }
    CHECK(std::abs(compute_metrics(pa, r).pearson_r - base) <= 1e-9);
    CHECK(std::abs(compute_metrics(p, ra).pearson_r - base) <= 1e-9);
  }
}

TEST_CASE("aami threshold is strict") {
  CHECK(aami_pass(7.99));
  CHECK_FALSE(aami_pass(8.0));
  // reference average RMSD for SBP, DBP and MAP
  CHECK(aami_pass(5.42));
  CHECK(aami_pass(3.29));
  CHECK(aami_pass(3.50));
}

TEST_CASE("bland_altman") {
  const std::vector<double> r{100, 110, 120, 130};
  auto s = bland_altman(r, r);
  CHECK(s.bias == 0.0);
  CHECK(s.loa_high - s.loa_low == 0.0);

  std::vector<double> p = r;
  for (auto& v : p) v += 5;
  s = bland_altman(p, r);
  CHECK(s.bias == 5.0);
  CHECK(s.sd == 0.0);
  CHECK(s.loa_low == 5.0);
  CHECK(s.points[0] == std::pair{102.5, 5.0});

  CHECK_ERRC(bland_altman(std::vector<double>{1}, std::vector<double>{1}), Errc::empty_input);
  CHECK_ERRC(bland_altman(std::vector<double>{1, 2}, std::vector<double>{1}), Errc::length_mismatch);

  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(50 + gen() % 500), b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i] = 70 + 10 * n(gen);
      a[i] = b[i] + 2 + 3 * n(gen);
    }
    const auto ba = bland_altman(a, b);
    CHECK(ba.bias == compute_metrics(a, b).me);
    CHECK(ba.loa_low <= ba.bias);
    CHECK(ba.bias <= ba.loa_high);
    CHECK(ba.loa_high - ba.bias == doctest::Approx(1.96 * ba.sd));
  }
}

TEST_CASE("average row is the unweighted subject mean") {
  const std::vector<EvalReport> one{report_with("a", 10, 2.0, 3.0, 0.9)};
  const auto avg1 = average_metrics(one);
  CHECK(avg1[0].mae == 2.0);
  CHECK(avg1[2].pearson_r == 0.9);

  const std::vector<EvalReport> two{report_with("a", 10, 2.0, 3.0, 0.9), report_with("b", 1000, 4.0, 9.0, 0.5)};
  const auto avg = average_metrics(two);
  CHECK(avg[1].mae == 3.0);
  CHECK(avg[1].rmsd == 6.0);
  CHECK(avg[1].pearson_r == doctest::Approx(0.7));
}

TEST_CASE("report csv parses back") {
  const std::vector<EvalReport> reps{report_with("3505162", 900, 3.1, 4.2, 0.81),
                                     report_with("3011085", 1200, 2.5, 7.7, 0.66)};
  const auto rows = parse_csv(report_csv(reps));
  REQUIRE(rows.size() == 4);
  REQUIRE(rows[0].size() == 17);
  CHECK(rows[0][0] == "subject");
  CHECK(rows[0][2] == "sbp_mae");
  CHECK(rows[0][16] == "map_std");
  CHECK(rows[1][0] == "3505162");
  CHECK(std::stoul(rows[2][1]) == 1200);
  CHECK(std::stod(rows[1][2]) == 3.1);
  CHECK(std::stod(rows[2][3]) == 7.7);
  CHECK(rows[3][0] == "Average");
  CHECK(std::stod(rows[3][2]) == doctest::Approx(2.8));
  CHECK(std::stod(rows[3][4]) == doctest::Approx(0.735));

  const auto j = report_json(reps);
  CHECK(j.at("subjects").size() == 2);
  CHECK(j.at("subjects")[1].at("sbp").at("aami_pass").get<bool>() == true);
  CHECK(j.at("average").at("dbp").at("mae").get<double>() == doctest::Approx(2.8));
  CHECK(report_table(reps).find("Average") != std::string::npos);
}

TEST_CASE("write_report emits the four artifacts") {
  const auto dir = scratch_dir("eval_report");
  const std::vector<double> p{100, 112, 118, 131}, r{101, 110, 121, 129};
  const auto ba = bland_altman(p, r);
  const std::vector<EvalReport> reps{report_with("s", 4, 1.0, 1.2, 0.99)};
  const auto files = write_report(dir, reps, ba, ba);
  for (const auto& f : {files.json, files.csv, files.ba_sbp, files.ba_dbp}) CHECK(std::filesystem::exists(f));
  std::ifstream in(files.ba_sbp);
  std::string header, cols;
  std::getline(in, header);
  std::getline(in, cols);
  CHECK(header.rfind("# bias=", 0) == 0);
  CHECK(header.find("n=4") != std::string::npos);
  CHECK(cols == "mean,diff");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[0][0]) == 100.5);
  CHECK(std::stod(rows[0][1]) == -1.0);
}

TEST_CASE("evaluate fills per-output metrics and flags") {
  std::vector<std::array<double, 3>> pred, ref;
  for (int i = 0; i < 30; ++i) {
    ref.push_back({110.0 + i, 70.0 + 0.5 * i, 85.0 + 0.6 * i});
    pred.push_back({110.0 + i + (i % 2 ? 9.0 : -9.0), 70.0 + 0.5 * i + 1, 85.0 + 0.6 * i});
  }
  const auto rep = evaluate("x", pred, ref);
  CHECK(rep.n_beats == 30);
  CHECK(rep.metrics[0].rmsd == doctest::Approx(9.0));
  CHECK_FALSE(rep.aami[0]);
  CHECK(rep.aami[1]);
  CHECK(rep.metrics[2].mae == 0.0);
}

}  // TEST_SUITE
