#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rationlog/annotation.hpp"
#include "rationlog/error.hpp"
#include "test_util.hpp"

using namespace rationlog;
using rationlog::testing::TempDir;

namespace {

// Fleiss' kappa straight from its definition: per-item agreement is the share
// of agreeing ordered rater pairs, enumerated explicitly.
double kappa_by_pairs(const std::vector<std::vector<Label>>& ratings) {
  const std::size_t n = ratings.front().size();
  double p_bar = 0.0, share_normal = 0.0;
  for (const auto& item : ratings) {
    std::size_t agree = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && item[a] == item[b]) ++agree;
    p_bar += static_cast<double>(agree) / static_cast<double>(n * (n - 1));
    share_normal += static_cast<double>(std::count(item.begin(), item.end(), Label::kNormal));
  }
  p_bar /= static_cast<double>(ratings.size());
  share_normal /= static_cast<double>(ratings.size() * n);
  const double pe = share_normal * share_normal + (1 - share_normal) * (1 - share_normal);
  return (p_bar - pe) / (1 - pe);
}

AgreementMatrix matrix_of(const std::vector<std::vector<Label>>& ratings) {
  AgreementMatrix m;
  m.n_annotators = static_cast<int>(ratings.front().size());
  for (const auto& item : ratings) {
    AgreementItem it;
    for (auto l : item) (l == Label::kNormal ? it.n_normal : it.n_anomalous)++;
    m.items.push_back(it);
  }
  return m;
}

CorrectionEntry to_anomalous(TemplateId id, ErrorCategory c) {
  return {id, Label::kNormal, Label::kAnomalous, c, "", ResolvedBy::kUnanimous};
}
CorrectionEntry to_normal(TemplateId id) {
  return {id, Label::kAnomalous, Label::kNormal, ErrorCategory::kOther, "", ResolvedBy::kPanelConsensus};
}

TemplateIndex small_index() {
  TemplateIndex index;
  for (TemplateId id = 0; id < 4; ++id)
    index.templates.push_back({id, "t" + std::to_string(id), id == 3 ? Label::kAnomalous : Label::kNormal, 1,
                               "t" + std::to_string(id)});
  return index;
}

constexpr Label N = Label::kNormal;
constexpr Label A = Label::kAnomalous;

}  // namespace

TEST_SUITE("annotation") {
  TEST_CASE("resolve") {
    CHECK(resolve({{0, "a", A}, {0, "b", A}, {0, "c", A}}).label == A);
    CHECK(resolve({{0, "a", A}, {0, "b", A}, {0, "c", A}}).resolved_by == ResolvedBy::kUnanimous);
    const auto majority = resolve({{0, "a", A}, {0, "b", A}, {0, "c", N}});
    CHECK(majority.label == A);
    CHECK(majority.resolved_by == ResolvedBy::kPanelConsensus);
    const auto tie = resolve({{0, "a", A}, {0, "b", N}}, N);
    CHECK(tie.label == N);
    CHECK(tie.resolved_by == ResolvedBy::kSeniorOverride);
    try {
      resolve({{0, "a", A}, {0, "b", N}});
      FAIL("tie without senior label must throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kMissingSeniorLabel);
    }
    CHECK_THROWS_AS(resolve({}), Error);
    CHECK_THROWS_AS(resolve({{0, "a", A}, {0, "a", N}, {0, "b", N}}), Error);
  }

  TEST_CASE("fleiss kappa hand cases") {
    // Item 1 {A,A}: P1 = 1. Item 2 {A,N}: P2 = 0. Pbar = 0.5.
    // Category shares 3/4 and 1/4: Pe = 9/16 + 1/16 = 0.625.
    // kappa = (0.5 - 0.625) / 0.375 = -1/3.
    const std::vector<std::vector<Label>> r{{A, A}, {A, N}};
    CHECK(fleiss_kappa(matrix_of(r)) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(kappa_by_pairs(r) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

    CHECK(fleiss_kappa(matrix_of({{A, A, A}, {N, N, N}})) == doctest::Approx(1.0));
    CHECK(fleiss_kappa(matrix_of({{A, A, A}, {A, A, A}})) == 1.0);
  }

  TEST_CASE("fleiss kappa matches the pairwise definition") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t items = 2 + rng.uniform_index(30);
      const std::size_t raters = 2 + rng.uniform_index(6);
      std::vector<std::vector<Label>> r(items, std::vector<Label>(raters));
      for (auto& item : r)
        for (auto& l : item) l = rng.bernoulli(0.4) ? A : N;
      const auto m = matrix_of(r);
      const bool single_category = std::all_of(m.items.begin(), m.items.end(),
                                               [](const AgreementItem& i) { return i.n_anomalous == 0; }) ||
                                   std::all_of(m.items.begin(), m.items.end(),
                                               [](const AgreementItem& i) { return i.n_normal == 0; });
      const double k = fleiss_kappa(m);
      if (single_category) {
        CHECK(k == 1.0);
        continue;
      }
      CHECK(k == doctest::Approx(kappa_by_pairs(r)).epsilon(1e-9));
      CHECK(k <= 1.0 + 1e-12);
      CHECK(k >= -1.0 - 1e-12);

      // Permuting items and relabelling annotators leaves kappa unchanged.
      auto shuffled = r;
      rng.shuffle(shuffled);
      for (auto& item : shuffled) rng.shuffle(item);
      CHECK(fleiss_kappa(matrix_of(shuffled)) == doctest::Approx(k).epsilon(1e-12));
    }
  }

  TEST_CASE("agreement matrix validation") {
    const auto m = agreement_matrix({{0, "a", A}, {0, "b", N}, {1, "a", N}, {1, "b", N}});
    REQUIRE(m.items.size() == 2);
    CHECK(m.n_annotators == 2);
    CHECK(m.items[0].n_anomalous == 1);
    CHECK(m.items[1].n_normal == 2);
    CHECK_THROWS_AS(agreement_matrix({{0, "a", A}, {0, "b", N}, {1, "a", N}}), Error);
    CHECK_THROWS_AS(agreement_matrix({{0, "a", A}, {0, "a", N}}), Error);
    CHECK_THROWS_AS(fleiss_kappa(AgreementMatrix{{{1, 0}}, 1}), Error);
  }

  TEST_CASE("correction entries") {
    CHECK_NOTHROW(to_anomalous(0, ErrorCategory::kSystemError).validate());
    CHECK_NOTHROW(to_normal(0).validate());
    CHECK_THROWS_AS(to_anomalous(0, ErrorCategory::kOther).validate(), Error);
    CorrectionEntry same = to_normal(0);
    same.new_label = A;
    CHECK_THROWS_AS(same.validate(), Error);
  }

  TEST_CASE("apply_corrections") {
    const auto index = small_index();
    const auto corrected =
        apply_corrections(index, {to_anomalous(1, ErrorCategory::kNetworkIssue), to_normal(3)});
    CHECK(corrected.templates[1].label == A);
    CHECK(corrected.templates[3].label == N);
    CHECK(corrected.templates[0].label == N);
    CHECK(index.templates[1].label == N);  // input untouched

    try {
      apply_corrections(index, {to_anomalous(9, ErrorCategory::kSystemError)});
      FAIL("unknown template");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnknownTemplate);
    }
    try {
      apply_corrections(index, {to_normal(0)});
      FAIL("stale entry");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kStaleEntry);
    }
    // A second entry on the same template sees the first one applied.
    CHECK_NOTHROW(apply_corrections(index, {to_anomalous(0, ErrorCategory::kSystemError), to_normal(0)}));
  }

  TEST_CASE("correction report category percentages") {
    std::vector<CorrectionEntry> ledger;
    TemplateId id = 0;
    const std::pair<ErrorCategory, int> counts[] = {{ErrorCategory::kSystemError, 78},
                                                    {ErrorCategory::kNetworkIssue, 47},
                                                    {ErrorCategory::kHardwareFailure, 40},
                                                    {ErrorCategory::kSoftwareException, 56}};
    for (auto [c, n] : counts)
      for (int i = 0; i < n; ++i) ledger.push_back(to_anomalous(id++, c));
    for (int i = 0; i < 4; ++i) ledger.push_back(to_normal(id++));

    const auto report = correction_report(ledger);
    CHECK(report.total == 225);
    CHECK(report.total_percentage == 100.0);
    REQUIRE(report.rows.size() == 5);
    const double expected[] = {34.7, 20.9, 17.8, 24.9, 1.8};
    for (std::size_t i = 0; i < 5; ++i) CHECK(report.rows[i].percentage == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(report.rows[4].direction == "anomalous->normal");
    CHECK_FALSE(report.rows[4].category.has_value());
    CHECK(report.rows[0].count == 78);

    std::size_t sum = 0;
    for (const auto& r : report.rows) sum += r.count;
    CHECK(sum == report.total);

    const auto text = render_report_text(report);
    CHECK(text.find("34.7%") != std::string::npos);
    CHECK(text.find("225") != std::string::npos);
    CHECK(report_to_json(report)["rows"][4]["category"].is_null());
  }

  TEST_CASE("report omits empty groups and rejects empty ledgers") {
    const auto report = correction_report({to_anomalous(0, ErrorCategory::kHardwareFailure)});
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].percentage == 100.0);
    CHECK_THROWS_AS(correction_report({}), Error);
  }

  TEST_CASE("ledger round trip") {
    TempDir dir;
    std::vector<CorrectionEntry> ledger{to_anomalous(2, ErrorCategory::kNetworkIssue), to_normal(3)};
    ledger[0].rationale = "refused connections precede job loss";
    write_ledger_jsonl(dir / "l.jsonl", ledger);
    const auto back = read_ledger_jsonl(dir / "l.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].rationale == ledger[0].rationale);
    CHECK(back[0].category == ErrorCategory::kNetworkIssue);
    CHECK(back[1].resolved_by == ResolvedBy::kPanelConsensus);
    CHECK(back[1].new_label == N);
  }
}
