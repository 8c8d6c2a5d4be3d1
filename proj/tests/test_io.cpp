#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "ratecraft/io.hpp"
#include "ratecraft/optimizer.hpp"

using namespace ratecraft;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ratecraft_test_" + name)).string();
}

io::CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_csv(in, "mem.csv");
}

}  // namespace

TEST(Csv, QuotedFieldsAndCrlf) {
  const auto t = parse("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n2,3\n");
  ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x,1");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
}

TEST(Csv, FieldCountMismatch) {
  try {
    parse("a,b\n1,2\n3\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse(""), ValidationError);
}

TEST(Design, RoundTripIsBitExact) {
  const auto sol = nested_bisection(37, MatchProfile::linear(equispaced_breakpoints(37)));
  io::DesignFile d{sol.beta, MatchProfile::linear(sol.beta.breakpoints()), WeightKind::top, sol.rate,
                   sol.residual_spread};
  const auto path = temp_path("design.json");
  io::write_design(path, d);
  const auto back = io::read_design(path);
  EXPECT_EQ(back.beta.levels(), d.beta.levels());
  EXPECT_EQ(back.beta.breakpoints(), d.beta.breakpoints());
  EXPECT_EQ(back.g.values(), d.g.values());
  EXPECT_EQ(back.g.kind(), MatchKind::linear);
  EXPECT_EQ(back.w, WeightKind::top);
  EXPECT_EQ(back.rate, d.rate);
  std::remove(path.c_str());
}

TEST(Design, DegenerateRateIsNull) {
  io::DesignFile d{StepBeta({0, 0.5, 1}, {0, 1}), MatchProfile::uniform(2), WeightKind::kendall,
                   std::numeric_limits<double>::infinity(), std::nullopt};
  const auto text = io::design_to_json(d);
  EXPECT_NE(text.find("\"rate\": null"), std::string::npos) << text;
  EXPECT_FALSE(io::design_from_json(text).rate.has_value());
}

TEST(Design, SchemaErrors) {
  EXPECT_THROW(io::design_from_json("{\"M\":2,\"s\":[0,0.5,1]}"), ValidationError);
  EXPECT_THROW(io::design_from_json("{\"M\":3,\"s\":[0,0.5,1],\"t\":[0,1]}"), ValidationError);
  EXPECT_THROW(io::design_from_json("{\"M\":2,\"s\":[0,0.5,1],\"t\":[1,0]}"), ValidationError);
  EXPECT_THROW(io::design_from_json("not json"), ValidationError);
}

TEST(Distribution, RoundTrip) {
  QuestionDistribution h{{"a", "b", "c"}, {0.1, 0.2, 0.7}, 0.125};
  h.probabilities[2] = 1.0 - 0.1 - 0.2;
  const auto back = io::distribution_from_json(io::distribution_to_json(h));
  EXPECT_EQ(back.questions, h.questions);
  EXPECT_EQ(back.probabilities, h.probabilities);
  EXPECT_EQ(back.objective, h.objective);
  EXPECT_THROW(io::distribution_from_json("{\"questions\":[\"a\"],\"probabilities\":[0.5]}"),
               ValidationError);
}

TEST(Bank, PsiAndCountForms) {
  const auto a = io::bank_from_csv(parse("theta,question,psi\n0.7,x,0.5\n0.3,x,0.25\n0.3,y,0\n0.7,y,1\n"));
  EXPECT_EQ(a.qualities(), (std::vector<double>{0.3, 0.7}));
  EXPECT_EQ(a.questions(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(a.psi(0, 0), 0.25);
  EXPECT_EQ(a.psi(1, 1), 1.0);

  const auto b = io::bank_from_csv(
      parse("theta,question,positives,total\n0.3,x,1,4\n0.3,y,0,2\n0.7,x,3,4\n0.7,y,2,2\n"));
  EXPECT_EQ(b.psi(0, 0), 0.25);
  ASSERT_TRUE(b.counts().has_value());

  std::ostringstream out;
  io::write_bank(out, b);
  std::istringstream in(out.str());
  const auto c = io::bank_from_csv(io::parse_csv(in));
  EXPECT_EQ(c.data(), b.data());
  EXPECT_EQ(c.counts()->totals, b.counts()->totals);
}

TEST(Bank, ErrorsNameRowAndField) {
  try {
    io::bank_from_csv(parse("theta,question,psi\n0.3,x,0.5\n0.7,x,abc\n"), "bank.csv");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("psi"), std::string::npos) << msg;
  }
  EXPECT_THROW(io::bank_from_csv(parse("theta,question,psi\n0.3,x,0.5\n0.7,y,0.5\n")),
               ValidationError);  // missing cells
  EXPECT_THROW(io::bank_from_csv(parse("theta,question\n0.3,x\n")), ValidationError);
  EXPECT_THROW(io::bank_from_csv(parse("theta,question,psi\n0.3,x,1.5\n")), ValidationError);
  EXPECT_THROW(io::bank_from_csv(parse("theta,question,psi\n0.3,x,0.5\n0.3,x,0.5\n")),
               ValidationError);
}

TEST(Bank, BundledFixtureLoads) {
  const auto bank = io::read_bank(std::string(RATECRAFT_DATA_DIR) + "/psi_fixture.csv");
  EXPECT_EQ(bank.rows(), 5u);
  EXPECT_EQ(bank.cols(), 9u);
  for (std::size_t y = 0; y < bank.cols(); ++y) {
    for (std::size_t r = 1; r < bank.rows(); ++r) EXPECT_GT(bank.psi(r, y), bank.psi(r - 1, y));
  }
}

TEST(Ratings, ParseAndValidate) {
  const auto r = io::ratings_from_csv(parse("item_id,question,response\na,q,1\nb,q,0\n"), "r.csv");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].item, "a");
  EXPECT_EQ(r[1].response, 0);
  EXPECT_THROW(io::ratings_from_csv(parse("item_id,question,response\na,q,2\n"), "r.csv"),
               ValidationError);
  EXPECT_THROW(io::ratings_from_csv(parse("item,question,response\na,q,1\n"), "r.csv"),
               ValidationError);
}

TEST(Output, SeriesAndSummary) {
  SimResult res;
  res.series.push_back({0, 1, WeightKind::kendall, 0.5});
  res.summary.push_back({1, WeightKind::kendall, 0.5, 0.0, 1});
  std::ostringstream a, b;
  io::write_series(a, res);
  io::write_summary(b, res);
  EXPECT_EQ(a.str(), "replicate,k,metric,value\n0,1,kendall,0.5\n");
  EXPECT_EQ(b.str(), "k,metric,mean,std_error,replicates\n1,kendall,0.5,0,1\n");
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 0.27639320225002106}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}
