#include <algorithm>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "ppgbp/record.hpp"
#include "test_util.hpp"

using namespace ppgbp;

TEST_SUITE("record") {

TEST_CASE("csv with ppg and abp columns") {
  const RawRecord r = parse_csv_record("# fs=100\n0.1,80.0\n0.2,90.0\n0.3,85.0\n");
  CHECK(r.size() == 3);
  CHECK(r.fs == 100.0);
  REQUIRE(r.has_abp());
  CHECK(r.ppg == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(*r.abp == std::vector<double>{80.0, 90.0, 85.0});
}

TEST_CASE("csv defaults and optional column header") {
  const RawRecord a = parse_csv_record("0.5\n0.6\n0.7\n");
  CHECK(a.fs == 125.0);
  CHECK_FALSE(a.has_abp());
  CHECK(a.size() == 3);

  const RawRecord b = parse_csv_record("ppg,abp\r\n1,70\r\n2,71\r\n");
  CHECK(b.has_abp());
  CHECK(b.ppg == std::vector<double>{1, 2});
}

TEST_CASE("csv errors") {
  CHECK_ERRC(parse_csv_record("1,80\n2,81\n3,82\n4,83\n5\n"), Errc::length_mismatch);
  CHECK_ERRC(parse_csv_record("1,80\n,81\n"), Errc::missing_column);
  CHECK_ERRC(parse_csv_record("ppg,abp\n1,80\n2\n"), Errc::missing_column);
  CHECK_ERRC(parse_csv_record("1\nabc\n"), Errc::parse_error);
  CHECK_ERRC(parse_csv_record("# fs=-3\n1\n"), Errc::parse_error);
  CHECK_ERRC(parse_csv_record("1,2,3\n"), Errc::parse_error);
  CHECK_ERRC(parse_csv_record("1\nnan\n"), Errc::non_finite_sample);

  try {
    parse_csv_record("1\n2\nxyz\n", "rec.csv");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("rec.csv:3") != std::string::npos);
  }
}

TEST_CASE("binary round trip at f32 precision") {
  const auto dir = scratch_dir("record_bin");
  RawRecord r;
  r.fs = 125.0;
  r.ppg = {0.25, -1.5, 3.0};
  r.abp = std::vector<double>{80.0, 120.5, 60.25};
  save_record(r, dir / "s.bin", RecordFormat::binary);
  const RawRecord back = load_record(dir / "s.bin");
  CHECK(back.subject_id == "s");
  CHECK(back.ppg == r.ppg);
  CHECK(*back.abp == *r.abp);

  r.abp.reset();
  save_record(r, dir / "t.csv", RecordFormat::csv);
  const RawRecord csv = load_record(dir / "t.csv");
  CHECK(csv.ppg == r.ppg);
  CHECK_FALSE(csv.has_abp());
}

TEST_CASE("binary corruption") {
  const auto dir = scratch_dir("record_bad");
  {
    std::ofstream f(dir / "bad.bin", std::ios::binary);
    f << "XXXX\x01\x00\x00\x00";
  }
  CHECK_ERRC(load_record(dir / "bad.bin"), Errc::parse_error);
  RawRecord r;
  r.ppg = {1, 2, 3};
  save_record(r, dir / "ok.bin", RecordFormat::binary);
  std::filesystem::resize_file(dir / "ok.bin", std::filesystem::file_size(dir / "ok.bin") - 2);
  CHECK_ERRC(load_record(dir / "ok.bin"), Errc::parse_error);
}

TEST_CASE("extract_bp_label") {
  const std::vector<double> beat{60, 80, 120, 90, 60};
  const BpLabel l = extract_bp_label(beat);
  CHECK(l.sbp == 120);
  CHECK(l.dbp == 60);
  CHECK(l.map == 80);

  const BpLabel c = extract_bp_label(std::vector<double>{100, 100, 100});
  CHECK(c.sbp == 100);
  CHECK(c.dbp == 100);
  CHECK(c.map == 100);

  CHECK_ERRC(extract_bp_label(std::vector<double>{}), Errc::empty_input);
}

TEST_CASE("map formula on reference subject means") {
  // (SBP, DBP) -> MAP rows for subjects 3505162 and 3011085.
  CHECK(std::abs(extract_bp_label(std::vector<double>{150.9, 100.0, 76.1}).map - 101.0) <= 0.05);
  CHECK(std::abs(extract_bp_label(std::vector<double>{78.5, 118.4, 90.0}).map - 91.8) <= 0.05);
}

TEST_CASE("extract_bp_label is permutation invariant and formula-consistent") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(40.0, 200.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> beat(1 + gen() % 150);
    for (auto& v : beat) v = u(gen);
    const BpLabel a = extract_bp_label(beat);
    std::shuffle(beat.begin(), beat.end(), gen);
    const BpLabel b = extract_bp_label(beat);
    CHECK(a.sbp == b.sbp);
    CHECK(a.dbp == b.dbp);
    CHECK(a.sbp >= a.dbp);
    CHECK(rel_close(a.map, (2 * a.dbp + a.sbp) / 3, 1e-9));
  }
}

TEST_CASE("label_stats") {
  std::vector<BpLabel> same{{120, 60, 80}, {120, 60, 80}};
  LabelStats s = label_stats(same);
  CHECK(s.mean_sbp == 120);
  CHECK(s.mean_dbp == 60);
  CHECK(s.mean_map == 80);
  CHECK(s.std_sbp == 0);
  CHECK(s.std_dbp == 0);
  CHECK(s.std_map == 0);

  std::vector<BpLabel> two{{110, 50, 70}, {130, 70, 90}};
  s = label_stats(two);
  CHECK(s.mean_sbp == doctest::Approx(120));
  CHECK(s.std_sbp == doctest::Approx(10));

  CHECK_ERRC(label_stats(std::vector<BpLabel>{}), Errc::empty_input);
}

TEST_CASE("label_stats matches two-pass oracle on random inputs") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> sbp(120, 12), dbp(65, 6);
  for (int t = 0; t < 50; ++t) {
    std::vector<BpLabel> labels(2 + gen() % 500);
    std::vector<double> xs, xd, xm;
    for (auto& l : labels) {
      l.sbp = sbp(gen);
      l.dbp = dbp(gen);
      l.map = mean_arterial(l.sbp, l.dbp);
      xs.push_back(l.sbp);
      xd.push_back(l.dbp);
      xm.push_back(l.map);
    }
    const LabelStats s = label_stats(labels);
    const auto [ms, ss] = oracle::mean_std(xs);
    const auto [md, sd] = oracle::mean_std(xd);
    const auto [mm, sm] = oracle::mean_std(xm);
    CHECK(rel_close(s.mean_sbp, ms, 1e-9));
    CHECK(rel_close(s.std_sbp, ss, 1e-9));
    CHECK(rel_close(s.mean_dbp, md, 1e-9));
    CHECK(rel_close(s.std_dbp, sd, 1e-9));
    CHECK(rel_close(s.mean_map, mm, 1e-9));
    CHECK(rel_close(s.std_map, sm, 1e-9));
  }
}

TEST_CASE("discard_label_outliers removes a 10-std spike") {
  // 99 labels spread around 120 plus one far above; the spike is placed at
  // 10 std of the other 99 above their mean.
  std::vector<BpLabel> labels;
  std::vector<double> rest;
  for (int i = 0; i < 99; ++i) {
    const double sbp = 120.0 + ((i % 7) - 3) * 1.5;
    labels.push_back({sbp, 60.0, mean_arterial(sbp, 60.0)});
    rest.push_back(sbp);
  }
  const auto [m_rest, s_rest] = oracle::mean_std(rest);
  const double spike = m_rest + 10.0 * s_rest;
  labels.push_back({spike, 60.0, mean_arterial(spike, 60.0)});

  std::vector<double> all = rest;
  all.push_back(spike);
  const auto [m_all, s_all] = oracle::mean_std(all);
  REQUIRE(spike > m_all + 5.0 * s_all);  // oracle confirms it is outside the screen

  const LabelScreen out = discard_label_outliers(labels, 5.0);
  CHECK(out.removed_count == 1);
  CHECK(out.kept.size() == 99);
  CHECK(out.kept_indices.back() == 98);
}

TEST_CASE("discard_label_outliers edge cases") {
  std::vector<BpLabel> same(20, BpLabel{0.1 * 3, 0.1, mean_arterial(0.3, 0.1)});
  CHECK(discard_label_outliers(same).removed_count == 0);
  CHECK_ERRC(discard_label_outliers(std::vector<BpLabel>{{120, 60, 80}}), Errc::degenerate_input);

  // Every value within one std of its mean survives k = 5.
  std::vector<BpLabel> tight;
  for (int i = 0; i < 40; ++i) {
    const double s = 120 + (i % 2 ? 1 : -1), d = 60 + (i % 2 ? 0.5 : -0.5);
    tight.push_back({s, d, mean_arterial(s, d)});
  }
  const auto st = label_stats(tight);
  for (const auto& l : tight) REQUIRE(std::abs(l.sbp - st.mean_sbp) <= st.std_sbp + 1e-12);
  CHECK(discard_label_outliers(tight).removed_count == 0);
}

TEST_CASE("discard_label_outliers uses OR semantics") {
  std::vector<BpLabel> labels(50, BpLabel{120, 60, 80});
  for (int i = 0; i < 50; ++i) labels[i].sbp += (i % 5) - 2;
  labels[10].dbp = 200;  // only DBP is off
  const auto out = discard_label_outliers(labels, 5.0);
  CHECK(out.removed_count == 1);
  CHECK(std::find(out.kept_indices.begin(), out.kept_indices.end(), 10u) == out.kept_indices.end());
}

TEST_CASE("discard_label_outliers is idempotent with frozen statistics") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n(0, 1);
  std::vector<BpLabel> labels;
  for (int i = 0; i < 2000; ++i) {
    const double s = 120 + 10 * n(gen) * (i % 97 == 0 ? 8 : 1);
    const double d = 65 + 5 * n(gen);
    labels.push_back({s, d, mean_arterial(s, d)});
  }
  const auto first = discard_label_outliers(labels, 5.0);
  CHECK(first.removed_count > 0);
  const auto second = discard_label_outliers(first.kept, first.stats, 5.0);
  CHECK(second.removed_count == 0);
  CHECK(second.kept.size() == first.kept.size());
}

}  // TEST_SUITE
