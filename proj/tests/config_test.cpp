#include "pitboss/config.hpp"

#include <gtest/gtest.h>

namespace pitboss {
namespace {

TEST(KeyValue, ParsesPairsCommentsAndBlanks) {
  auto kv = KeyValueFile::parse_string(
      "# session config\n"
      "\n"
      "hands = 500\n"
      "  label =  table three  \n"
      "rate = 0.25  # trailing comment\n");
  EXPECT_EQ(kv.get_int("hands", 0), 500);
  EXPECT_EQ(kv.get("label", ""), "table three");
  EXPECT_DOUBLE_EQ(kv.get_double("rate", 0), 0.25);
  EXPECT_FALSE(kv.has("missing"));
  EXPECT_EQ(kv.get_int("missing", 7), 7);
}

TEST(KeyValue, LastAssignmentWins) {
  auto kv = KeyValueFile::parse_string("x = 1\nx = 2\n");
  EXPECT_EQ(kv.get_int("x", 0), 2);
}

TEST(KeyValue, BooleanSpellings) {
  auto kv = KeyValueFile::parse_string("a = true\nb = 0\nc = yes\nd = off\n");
  EXPECT_TRUE(kv.get_bool("a", false));
  EXPECT_FALSE(kv.get_bool("b", true));
  EXPECT_TRUE(kv.get_bool("c", false));
  EXPECT_FALSE(kv.get_bool("d", true));
  EXPECT_TRUE(kv.get_bool("missing", true));
}

TEST(KeyValue, RejectsMalformedInput) {
  EXPECT_THROW(KeyValueFile::parse_string("just words\n"), std::runtime_error);
  EXPECT_THROW(KeyValueFile::parse_string("= 3\n"), std::runtime_error);
  auto kv = KeyValueFile::parse_string("n = 12x\nf = 1.2.3\nb = maybe\n");
  EXPECT_THROW(kv.get_int("n", 0), std::runtime_error);
  EXPECT_THROW(kv.get_double("f", 0), std::runtime_error);
  EXPECT_THROW(kv.get_bool("b", false), std::runtime_error);
}

TEST(KeyValue, LoadReportsMissingFile) {
  EXPECT_THROW(KeyValueFile::load("/nonexistent/path.cfg"), std::runtime_error);
}

}  // namespace
}  // namespace pitboss
