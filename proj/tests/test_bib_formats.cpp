#include <gtest/gtest.h>

#include <random>

#include "citeaudit/bib_formats.hpp"
#include "citeaudit/error.hpp"
#include "support/fixtures.hpp"

using namespace citeaudit;
using citeaudit::testing::fixture;

namespace {

std::string ris_lines(std::initializer_list<std::string> tags) {
  std::string out;
  for (const auto& t : tags) out += t + "\n";
  return out;
}

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return errc::io_error;
}

}  // namespace

// --- RIS -------------------------------------------------------------------

TEST(ParseRis, ArticleNumberInStartPageBecomesCandidate) {
  auto r = parse_ris(ris_lines({"TY  - JOUR", "TI  - Fascinating article title", "JO  - Nature Communications",
                                "VL  - 777", "IS  - 1", "SP  - 999", "PY  - 2100", "DO  - 10.5555/x.999",
                                "ER  - "}));
  EXPECT_EQ(r.volume, "777");
  EXPECT_EQ(r.issue, "1");
  EXPECT_EQ(r.start_page, "999");
  EXPECT_FALSE(r.end_page.has_value());
  EXPECT_EQ(r.article_number, "999");
  EXPECT_TRUE(r.article_number_is_candidate());
  EXPECT_EQ(r.source_format, SourceFormat::ris);
}

TEST(ParseRis, PageRangeHasNoArticleNumber) {
  auto r = parse_ris(ris_lines({"TY  - JOUR", "JO  - Nature", "VL  - 777", "SP  - 8888", "EP  - 8898",
                                "PY  - 2100", "DO  - 10.5555/x.8888", "ER  - "}));
  EXPECT_EQ(r.start_page, "8888");
  EXPECT_EQ(r.end_page, "8898");
  EXPECT_FALSE(r.article_number.has_value());
}

TEST(ParseRis, NoPromotionForPagedIssue) {
  auto r = parse_ris(ris_lines({"TY  - JOUR", "VL  - 12", "IS  - 4", "SP  - 233", "PY  - 2001",
                                "DO  - 10.5555/x.233", "ER  - "}));
  EXPECT_FALSE(r.article_number.has_value());
}

TEST(ParseRis, Errors) {
  EXPECT_EQ(code_of([] { parse_ris(""); }), errc::malformed_ris);
  EXPECT_EQ(code_of([] { parse_ris("TY  - JOUR\nDO  - 10.1/x\n"); }), errc::malformed_ris);
  EXPECT_EQ(code_of([] { parse_ris("TY  - JOUR\nVL  - 1\nER  - \n"); }), errc::missing_doi);
}

TEST(ParseRis, WorkedExampleFixture) {
  auto r = parse_ris(fixture("records/natcomm_2193.ris"));
  EXPECT_EQ(r.doi, "10.5555/ncomms-frenkel-mos2");
  EXPECT_EQ(r.article_number, "2193");
  ASSERT_TRUE(r.publication_date);
  EXPECT_EQ(r.publication_date->iso(), "2022-04-22");
  EXPECT_EQ(r.authors.size(), 4u);
}

// Round trip through a RIS writer that lives only in this test.
TEST(ParseRis, RoundTripRandomRecords) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::string volume = std::to_string(rng() % 400 + 1);
    std::string issue = std::to_string(rng() % 12 + 1);
    std::string sp = std::to_string(rng() % 9000 + 1);
    bool paged = rng() % 2;
    std::string ep = std::to_string(std::stoi(sp) + static_cast<int>(rng() % 30));
    int year = 1950 + static_cast<int>(rng() % 150);
    std::string doi = "10.5555/rt." + std::to_string(i);
    std::string text = "TY  - JOUR\nVL  - " + volume + "\nIS  - " + issue + "\nSP  - " + sp + "\n" +
                       (paged ? "EP  - " + ep + "\n" : "") + "PY  - " + std::to_string(year) + "\nDO  - " +
                       doi + "\nER  - \n";
    auto r = parse_ris(text);
    EXPECT_EQ(r.volume, volume);
    EXPECT_EQ(r.issue, issue);
    EXPECT_EQ(r.start_page, sp);
    EXPECT_EQ(r.end_page, paged ? std::optional(ep) : std::nullopt);
    EXPECT_EQ(r.doi, doi);
    ASSERT_TRUE(r.publication_date);
    EXPECT_EQ(r.publication_date->year, year);
  }
}

// --- Publisher JSON ----------------------------------------------------------

TEST(ParsePublisherJson, StartOneEndLength) {
  auto res = parse_publisher_json(
      R"({"doi":"10.5555/a","publicationName":"Nature Communications","volume":"13","number":"1",)"
      R"("startingPage":"1","endingPage":"8","publicationDate":"2022-04-22"})");
  EXPECT_EQ(res.record.start_page, "1");
  EXPECT_EQ(res.record.end_page, "8");
  EXPECT_EQ(res.record.page_count, 8);
  EXPECT_EQ(res.record.issue, "1");
  EXPECT_FALSE(res.record.article_number.has_value());
}

TEST(ParsePublisherJson, FixtureLacksArticleNumber) {
  auto res = parse_publisher_json(fixture("records/natcomm_2193.json"));
  EXPECT_FALSE(res.raw_contains("2193"));
  EXPECT_FALSE(res.record.article_number.has_value());
  EXPECT_EQ(res.record.doi, "10.5555/ncomms-frenkel-mos2");
}

TEST(ParsePublisherJson, Errors) {
  EXPECT_EQ(code_of([] { parse_publisher_json(R"({"volume":"1"})"); }), errc::missing_doi);
  EXPECT_EQ(code_of([] { parse_publisher_json("{not json"); }), errc::malformed_payload);
}

// --- JATS ----------------------------------------------------------------------

namespace {
std::string jats_doc(const std::string& inner) {
  return "<article><front><article-meta><article-id pub-id-type=\"doi\">10.5555/j</article-id>"
         "<pub-date pub-type=\"epub\"><day>02</day><month>01</month><year>2025</year></pub-date>" +
         inner + "</article-meta></front></article>";
}
}  // namespace

TEST(ParseJats, ElocationId) {
  auto r = parse_jats(jats_doc("<volume>777</volume><issue>1</issue><elocation-id>999</elocation-id>"));
  EXPECT_EQ(r.article_number, "999");
}

TEST(ParseJats, IssueSeqFallback) {
  auto r = parse_jats(jats_doc("<volume>777</volume><issue seq=\"999\">1</issue>"));
  EXPECT_EQ(r.article_number, "999");
  EXPECT_EQ(r.issue, "1");
}

TEST(ParseJats, NeitherTag) {
  auto r = parse_jats(jats_doc("<volume>777</volume><issue>1</issue><fpage>12</fpage>"));
  EXPECT_FALSE(r.article_number.has_value());
}

TEST(ParseJats, CustomMetaConfigurable) {
  std::string doc = jats_doc(
      "<issue>1</issue><custom-meta-group><custom-meta><meta-name>article-number</meta-name>"
      "<meta-value>42</meta-value></custom-meta></custom-meta-group>");
  EXPECT_FALSE(parse_jats(doc).article_number.has_value());
  JatsOptions opt;
  opt.article_number_meta_names = {"article-number"};
  EXPECT_EQ(parse_jats(doc, opt).article_number, "42");
}

TEST(ParseJats, Malformed) {
  EXPECT_EQ(code_of([] { parse_jats("<article><front>"); }), errc::malformed_payload);
}

TEST(ParseJats, WorkedExampleFixture) {
  auto r = parse_jats(fixture("records/natcomm_2193.xml"));
  EXPECT_EQ(r.article_number, "2193");
  EXPECT_EQ(r.page_count, 8);
  EXPECT_EQ(r.issn, "2041-1723");
}

// --- Crossref -----------------------------------------------------------------

TEST(ParseCrossrefWork, ArticleNumberField) {
  auto w = parse_crossref_work(std::string_view(R"({"DOI":"10.5555/c","volume":"777","article-number":"999"})"));
  EXPECT_EQ(w.record.article_number, "999");
  EXPECT_EQ(w.record.volume, "777");
}

TEST(ParseCrossrefWork, ReferencedByCountSurfaced) {
  auto w = parse_crossref_work(std::string_view(fixture("counts/crossref_work.json")));
  ASSERT_TRUE(w.is_referenced_by_count);
  EXPECT_EQ(*w.is_referenced_by_count, 6476);
  EXPECT_EQ(w.record.doi, "10.1038/s41467-017-02088-w");
}

TEST(ParseCrossrefWork, PageRange) {
  auto w = parse_crossref_work(std::string_view(R"({"DOI":"10.5555/c","page":"8888-8898"})"));
  EXPECT_EQ(w.record.start_page, "8888");
  EXPECT_EQ(w.record.end_page, "8898");
}

TEST(ParseCrossrefWork, Errors) {
  EXPECT_EQ(code_of([] { parse_crossref_work(std::string_view(R"({"volume":"1"})")); }), errc::missing_doi);
  EXPECT_EQ(code_of([] { parse_crossref_work(std::string_view("[")); }), errc::malformed_payload);
}

// --- Reference strings -----------------------------------------------------------

TEST(ParseReference, IssueColonLocator) {
  auto r = parse_reference_string("Nat Commun 13(1):8");
  EXPECT_EQ(r.locator_kind, LocatorKind::issue_colon_locator);
  EXPECT_EQ(r.journal_hint, "Nat Commun");
  EXPECT_EQ(r.volume, "13");
  EXPECT_EQ(r.issue, "1");
  EXPECT_EQ(r.locator, "8");
}

TEST(ParseReference, ColonWithoutIssue) {
  auto r = parse_reference_string("Catal Commun 179:8");
  EXPECT_EQ(r.locator_kind, LocatorKind::issue_colon_locator);
  EXPECT_EQ(r.volume, "179");
  EXPECT_FALSE(r.issue.has_value());
  EXPECT_EQ(r.locator, "8");
}

TEST(ParseReference, ArticleNumber) {
  auto r = parse_reference_string("Nature Communications 777, 999 (2100)");
  EXPECT_EQ(r.locator_kind, LocatorKind::article_number);
  EXPECT_EQ(r.volume, "777");
  EXPECT_EQ(r.locator, "999");
  EXPECT_EQ(r.year, 2100);
}

TEST(ParseReference, PageRangeEnDash) {
  auto r = parse_reference_string("Nature 777, 8888\xE2\x80\x93" "8898 (2100)");
  EXPECT_EQ(r.locator_kind, LocatorKind::page_range);
  EXPECT_EQ(r.locator, "8888-8898");
}

TEST(ParseReference, FullReferenceLineWithTitle) {
  auto r = parse_reference_string(
      "18. Xu J, Shao GL, Tang X (2022) Frenkel-defected monolayer MoS2 catalysts for efficient hydrogen "
      "evolution. Nat Commun 13(1):8");
  EXPECT_EQ(r.locator_kind, LocatorKind::issue_colon_locator);
  EXPECT_EQ(r.journal_hint, "Nat Commun");
  EXPECT_EQ(r.year, 2022);
  EXPECT_NE(r.title_hint.find("Frenkel-defected"), std::string::npos);
}

TEST(ParseReference, UnknownAndEmpty) {
  EXPECT_EQ(parse_reference_string("See the supplementary material").locator_kind, LocatorKind::unknown);
  EXPECT_EQ(code_of([] { parse_reference_string("   "); }), errc::empty_reference);
}

TEST(ParseReference, RenderParseRoundTrip) {
  std::mt19937 rng(11);
  const char* journals[] = {"Nat Commun", "Nature Communications", "Sci Rep", "BMC Public Health", "Light Sci Appl"};
  for (int i = 0; i < 2000; ++i) {
    ParsedReference ref;
    ref.journal_hint = journals[rng() % 5];
    ref.volume = std::to_string(rng() % 900 + 1);
    int kind = static_cast<int>(rng() % 4);
    if (kind == 0) {
      ref.locator_kind = LocatorKind::issue_colon_locator;
      ref.issue = std::to_string(rng() % 12 + 1);
      ref.locator = std::to_string(rng() % 40 + 1);
    } else if (kind == 1) {
      ref.locator_kind = LocatorKind::issue_colon_locator;
      ref.locator = std::to_string(rng() % 40 + 1);
    } else if (kind == 2) {
      ref.locator_kind = LocatorKind::article_number;
      ref.locator = std::to_string(rng() % 9000 + 1);
      ref.year = 1990 + static_cast<int>(rng() % 40);
    } else {
      ref.locator_kind = LocatorKind::page_range;
      int a = static_cast<int>(rng() % 9000 + 1);
      ref.locator = std::to_string(a) + "-" + std::to_string(a + static_cast<int>(rng() % 20));
      ref.year = 1990 + static_cast<int>(rng() % 40);
    }
    std::string text = render_reference(ref);
    ParsedReference back = parse_reference_string(text);
    ref.raw = text;
    EXPECT_EQ(back, ref) << text;
  }
}

// --- Misc ---------------------------------------------------------------------------

TEST(Doi, Normalization) {
  EXPECT_EQ(normalize_doi("https://doi.org/10.1038/S41467-017-02088-W"), "10.1038/s41467-017-02088-w");
  EXPECT_EQ(normalize_doi("doi:10.1/ABC"), "10.1/abc");
  EXPECT_TRUE(is_plausible_doi("10.1038/s41467-017-02088-w"));
  EXPECT_FALSE(is_plausible_doi("10.1038"));
}

TEST(PartialDate, PrecisionAndOrdering) {
  auto y = PartialDate::parse("2025");
  auto d = PartialDate::parse("2025/01/02/");
  ASSERT_TRUE(y && d);
  EXPECT_FALSE(y->has_day_precision());
  EXPECT_TRUE(d->has_day_precision());
  EXPECT_EQ(d->iso(), "2025-01-02");
  EXPECT_LT(d->ordering_key(), y->ordering_key());  // year-only orders at July 1
}

TEST(Sniff, RecognizesFixtures) {
  EXPECT_EQ(sniff_format(fixture("records/natcomm_2193.ris")), SourceFormat::ris);
  EXPECT_EQ(sniff_format(fixture("records/natcomm_2193.json")), SourceFormat::publisher_json);
  EXPECT_EQ(sniff_format(fixture("records/natcomm_2193.xml")), SourceFormat::jats);
  EXPECT_EQ(sniff_format(fixture("records/natcomm_2193.crossref.json")), SourceFormat::crossref_work);
}

TEST(Parsers, Pure) {
  std::string text = fixture("records/natcomm_2193.xml");
  EXPECT_EQ(parse_jats(text), parse_jats(text));
  std::string ris = fixture("records/natcomm_2193.ris");
  EXPECT_EQ(parse_ris(ris), parse_ris(ris));
}
