#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "../support/mapping_oracle.hpp"
#include "tabsynth/validator.hpp"

using namespace tabsynth;

namespace {

const MatchOptions kDefault{};

ExecOutput ok_output(Table t) {
  ExecOutput o;
  o.status = ExecStatus::ok;
  o.value = std::move(t);
  return o;
}

}  // namespace

TEST(Valid, ShapeRules) {
  Table input(std::vector<Column>{{"a", {"1", "2"}}});
  EXPECT_TRUE(is_valid(ok_output(Table(std::vector<Column>{{"z", {"x", "y"}}})), input));
  EXPECT_FALSE(is_valid(ok_output(Table(std::vector<Column>{{"z", {"x", "y", "w"}}})), input));
  ExecOutput err;
  err.status = ExecStatus::runtime_error;
  EXPECT_FALSE(is_valid(err, input));
  EXPECT_FALSE(is_valid(ok_output(Table()), Table()));
}

TEST(Cells, NumericTolerance) {
  EXPECT_TRUE(cells_match("5", "5.002", kDefault));
  EXPECT_FALSE(cells_match("5", "5.05", kDefault));
  EXPECT_TRUE(cells_match("5", "5.049", kDefault));
  EXPECT_TRUE(cells_match("5", "4.951", kDefault));
  EXPECT_FALSE(cells_match("5", "4.95", kDefault));
  // Anchored on the expected value.
  EXPECT_TRUE(cells_match("100", "100.99", kDefault));
  EXPECT_FALSE(cells_match("100", "101", kDefault));
  EXPECT_TRUE(cells_match("0", "0.0000000000001", kDefault));
  EXPECT_FALSE(cells_match("0", "0.001", kDefault));
}

TEST(Cells, ParsedNumbers) {
  EXPECT_TRUE(cells_match("3", " 3.0 ", kDefault));
  EXPECT_TRUE(cells_match("1200", "1.2e3", kDefault));
  EXPECT_TRUE(cells_match("-2.5", "-2.50", kDefault));
  EXPECT_FALSE(cells_match("1200", "1,200", kDefault));
  EXPECT_TRUE(looks_numeric("+1.5E-3"));
  EXPECT_FALSE(looks_numeric("nan"));
  EXPECT_FALSE(looks_numeric("1,000"));
  EXPECT_FALSE(looks_numeric("."));
}

TEST(Cells, BooleanZeroOne) {
  EXPECT_TRUE(cells_match("TRUE", "1", kDefault));
  EXPECT_TRUE(cells_match("False", "0", kDefault));
  EXPECT_TRUE(cells_match("true", "1.0", kDefault));
  EXPECT_FALSE(cells_match("TRUE", "0", kDefault));
  EXPECT_FALSE(cells_match("TRUE", "2", kDefault));
}

TEST(Cells, TruthStrings) {
  EXPECT_TRUE(cells_match("yes", "True", kDefault));
  EXPECT_TRUE(cells_match("N", "false", kDefault));
  EXPECT_FALSE(cells_match("yes", "no", kDefault));
  MatchOptions custom;
  custom.true_strings = {"oui"};
  EXPECT_TRUE(cells_match("oui", "1", custom));
  EXPECT_FALSE(cells_match("yes", "1", custom));
}

TEST(Cells, CaseRule) {
  EXPECT_TRUE(cells_match("Smith", "smith", kDefault));
  MatchOptions strict;
  strict.case_sensitive = true;
  EXPECT_FALSE(cells_match("Smith", "smith", strict));
  EXPECT_TRUE(cells_match("Smith", "Smith", strict));
}

TEST(Cells, Reflexive) {
  for (const char* s : {"", "x", "1.5", "TRUE", "a b", "1e400"}) EXPECT_TRUE(cells_match(s, s, kDefault));
}

TEST(Cells, ExtremeExponents) {
  EXPECT_TRUE(cells_match("1e5000", "1.001e5000", kDefault));
  EXPECT_FALSE(cells_match("1e-5000", "1", kDefault));
}

TEST(Outputs, ExtraColumnsAndHeaders) {
  Table expected(std::vector<Column>{{"out", {"jsmith"}}});
  Table actual(std::vector<Column>{{"Names", {"John Smith"}}, {"username", {"jsmith"}}});
  MatchResult r = outputs_match(expected, actual, kDefault);
  ASSERT_TRUE(r.matched);
  EXPECT_EQ(r.column_mapping->at("out"), "username");
}

TEST(Outputs, ColumnOrderIgnored) {
  Table expected(std::vector<Column>{{"a", {"1", "2"}}, {"b", {"x", "y"}}});
  Table actual(std::vector<Column>{{"q", {"x", "y"}}, {"p", {"1", "2"}}});
  EXPECT_TRUE(outputs_match(expected, actual, kDefault).matched);
}

TEST(Outputs, Identity) {
  Table t(std::vector<Column>{{"a", {"1"}}, {"b", {"2"}}});
  MatchResult r = outputs_match(t, t, kDefault);
  ASSERT_TRUE(r.matched);
  EXPECT_EQ(r.column_mapping->at("a"), "a");
  EXPECT_EQ(r.column_mapping->at("b"), "b");
}

TEST(Outputs, Injective) {
  Table expected(std::vector<Column>{{"a", {"1"}}, {"b", {"1"}}});
  Table actual(std::vector<Column>{{"z", {"1"}}});
  MatchResult r = outputs_match(expected, actual, kDefault);
  EXPECT_FALSE(r.matched);
}

TEST(Outputs, GreedyTrapNeedsBacktracking) {
  // e0 fits a0 or a1, e1 fits only a0; taking a0 for e0 first dead-ends.
  Table expected(std::vector<Column>{{"e0", {"1"}}, {"e1", {"1.015"}}});
  Table actual(std::vector<Column>{{"a0", {"1.009"}}, {"a1", {"0.995"}}});
  MatchResult r = outputs_match(expected, actual, kDefault);
  ASSERT_TRUE(r.matched);
  EXPECT_EQ(r.column_mapping->at("e0"), "a1");
  EXPECT_EQ(r.column_mapping->at("e1"), "a0");
}

TEST(Outputs, ReportsFirstMismatch) {
  Table expected(std::vector<Column>{{"a", {"1", "2", "3"}}});
  Table actual(std::vector<Column>{{"z", {"1", "2", "4"}}});
  MatchResult r = outputs_match(expected, actual, kDefault);
  ASSERT_FALSE(r.matched);
  ASSERT_TRUE(r.first_mismatch);
  EXPECT_EQ(r.first_mismatch->row, 2u);
  EXPECT_EQ(r.first_mismatch->actual, "4");
}

TEST(Outputs, RowCountMismatchThrows) {
  EXPECT_THROW(outputs_match(Table(std::vector<Column>{{"a", {"1"}}}), Table(std::vector<Column>{{"a", {"1", "2"}}}), kDefault),
               InvalidArgument);
}

TEST(Outputs, AgreesWithExhaustiveOracle) {
  std::mt19937 gen(97);
  for (int i = 0; i < 2000; ++i) {
    auto [expected, actual] = random_match_case(gen);
    MatchResult r = outputs_match(expected, actual, kDefault);
    ASSERT_EQ(r.matched, exhaustive_match(expected, actual, kDefault));
    if (r.matched) {
      std::set<std::string> targets;
      for (const auto& [e, a] : *r.column_mapping) targets.insert(a);
      EXPECT_EQ(targets.size(), expected.column_count());
    }
  }
}

TEST(Outputs, InvariantUnderPermutationAndRenaming) {
  std::mt19937 gen(101);
  for (int i = 0; i < 300; ++i) {
    auto [expected, actual] = random_match_case(gen);
    std::vector<Column> cols = actual.columns();
    std::shuffle(cols.begin(), cols.end(), gen);
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].name = "renamed" + std::to_string(c);
    Table permuted(cols);
    EXPECT_EQ(outputs_match(expected, actual, kDefault).matched,
              outputs_match(expected, permuted, kDefault).matched);
  }
}

TEST(Options, Validation) {
  MatchOptions o;
  o.relative_error = -1;
  EXPECT_THROW(o.validate(), InvalidArgument);
}
