#include <gtest/gtest.h>

#include <string>

#include "amfg/error.hpp"
#include "amfg/model.hpp"
#include "instances.hpp"

namespace amfg {
namespace {

const char* kScalarDoc = R"({
  "dims": {"z": 1, "u": 1, "v": 1}, "horizon": 2,
  "dynamics": {"A": 1, "B": 1, "C": 1},
  "noise": {"Sigma_w": 0, "mu_0": [1], "Sigma_0": 0},
  "costs": {"Q": 1, "Qbar": 0, "Qtilde": 0, "R": 1, "S": 3},
  "neighborhood_size": 1
})";

std::string replace(std::string doc, const std::string& from, const std::string& to) {
  const auto pos = doc.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return doc.replace(pos, from.size(), to);
}

template <class E>
std::string field_of(const std::string& doc) {
  try {
    validate_spec(load_spec(doc));
  } catch (const E& e) {
    return e.field();
  }
  return "<no error>";
}

TEST(LoadSpec, ScalarsBecomeFullSequences) {
  const GameSpec s = load_spec(kScalarDoc);
  EXPECT_EQ(s.T(), 2);
  ASSERT_EQ(s.Q.size(), 3u);
  ASSERT_EQ(s.R.size(), 2u);
  EXPECT_EQ(s.S[1](0, 0), 3.0);
  EXPECT_EQ(s.Qbar[2](0, 0), 0.0);
}

TEST(LoadSpec, BroadcastAndPerStepSequences) {
  std::string doc = replace(kScalarDoc, R"("Q": 1)", R"("Q": [[2]])");
  doc = replace(doc, R"("R": 1)", R"("R": [[[1]], [[4]]])");
  doc = replace(doc, R"("S": 3)", R"("S": [3, 5])");
  const GameSpec s = load_spec(doc);
  EXPECT_EQ(s.Q[0](0, 0), 2.0);
  EXPECT_EQ(s.Q[2](0, 0), 2.0);
  EXPECT_EQ(s.R[1](0, 0), 4.0);
  EXPECT_EQ(s.S[1](0, 0), 5.0);
}

TEST(LoadSpec, MissingFieldNamesPath) {
  const std::string doc = replace(kScalarDoc, R"("R": 1, )", "");
  EXPECT_EQ(field_of<SpecError>(doc), "costs.R");
}

TEST(LoadSpec, ShapeMismatchNamesField) {
  const std::string doc = replace(kScalarDoc, R"("B": 1)", R"("B": [[1, 2]])");
  EXPECT_EQ(field_of<SpecError>(doc).rfind("dynamics.B", 0), 0u);
}

TEST(LoadSpec, WrongSequenceLength) {
  const std::string doc = replace(kScalarDoc, R"("S": 3)", R"("S": [3, 3, 3])");
  EXPECT_EQ(field_of<SpecError>(doc).rfind("costs.S", 0), 0u);
}

TEST(ValidateSpec, RejectsNonPositiveR) {
  const std::string doc = replace(kScalarDoc, R"("R": 1)", R"("R": [1, 0])");
  EXPECT_EQ(field_of<ValidationError>(doc), "costs.R[1]");
  try {
    validate_spec(load_spec(doc));
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("not positive definite at t=1"),
              std::string::npos);
  }
}

TEST(ValidateSpec, RejectsIndefiniteQ) {
  const std::string doc = replace(kScalarDoc, R"("Q": 1)", R"("Q": -1)");
  EXPECT_EQ(field_of<ValidationError>(doc), "costs.Q[0]");
}

TEST(ValidateSpec, AsymmetryBeyondToleranceRejected) {
  std::string doc = replace(kScalarDoc, R"("z": 1)", R"("z": 2)");
  doc = replace(doc, R"("A": 1)", R"("A": [[1, 0], [0, 1]])");
  doc = replace(doc, R"("B": 1)", R"("B": [[1], [0]])");
  doc = replace(doc, R"("C": 1)", R"("C": [[1], [1]])");
  doc = replace(doc, R"("mu_0": [1])", R"("mu_0": [1, 0])");
  doc = replace(doc, R"("Q": 1)", R"("Q": [[1, 0.5], [0.4, 1]])");
  EXPECT_EQ(field_of<ValidationError>(doc), "costs.Q[0]");
}

TEST(ValidateSpec, TinyAsymmetryIsRemoved) {
  std::string doc = replace(kScalarDoc, R"("z": 1)", R"("z": 2)");
  doc = replace(doc, R"("A": 1)", R"("A": [[1, 0], [0, 1]])");
  doc = replace(doc, R"("B": 1)", R"("B": [[1], [0]])");
  doc = replace(doc, R"("C": 1)", R"("C": [[1], [1]])");
  doc = replace(doc, R"("mu_0": [1])", R"("mu_0": [1, 0])");
  doc = replace(doc, R"("Q": 1)", R"("Q": [[1, 0.5], [0.5000000000000001, 1]])");
  const GameSpec s = validate_spec(load_spec(doc));
  EXPECT_EQ(s.Q[0](0, 1), s.Q[0](1, 0));
}

TEST(ValidateSpec, NeighborhoodSizeMustBePositive) {
  const std::string doc =
      replace(kScalarDoc, R"("neighborhood_size": 1)", R"("neighborhood_size": 0)");
  EXPECT_THROW(validate_spec(load_spec(doc)), SpecError);
}

TEST(SerializeSpec, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GameSpec s = testing::random_valid_spec(seed);
    const GameSpec back = validate_spec(load_spec(serialize_spec(s)));
    EXPECT_TRUE(identical(s, back)) << "seed " << seed;
  }
}

TEST(LoadSpec, InvalidJson) { EXPECT_THROW(load_spec("{not json"), SpecError); }

}  // namespace
}  // namespace amfg
