#include "mono3d/kitti_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mono3d/error.hpp"

namespace mono3d {
namespace {

constexpr const char* kCarLine =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 "
    "46.70 -1.59";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

TEST(ParseLabelLine, GroundTruthCar) {
  const Object3D o = parse_label_line(kCarLine);
  EXPECT_EQ(o.cls, ClassId::car());
  EXPECT_EQ(o.occluded, 0);
  EXPECT_DOUBLE_EQ(o.alpha, -1.58);
  EXPECT_EQ(o.bbox, (Box2D{587.01, 173.33, 614.12, 200.12}));
  EXPECT_EQ(o.dims, (Dimensions{1.65, 1.67, 3.64}));
  EXPECT_EQ(o.location, (Vec3{-0.65, 1.71, 46.70}));
  EXPECT_DOUBLE_EQ(o.rotation_y, -1.59);
  EXPECT_FALSE(o.score.has_value());
}

TEST(ParseLabelLine, SixteenthFieldIsScore) {
  const Object3D o = parse_label_line(std::string(kCarLine) + " 0.97");
  ASSERT_TRUE(o.score.has_value());
  EXPECT_DOUBLE_EQ(*o.score, 0.97);
  EXPECT_EQ(o.location, (Vec3{-0.65, 1.71, 46.70}));
}

TEST(ParseLabelLine, WrongFieldCount) {
  try {
    parse_label_line("Car 0 0", 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFieldCount);
    EXPECT_NE(std::string(e.what()).find("FieldCount(3)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(ParseLabelLine, NonNumericFieldIsNamed) {
  std::string line = kCarLine;
  line.replace(line.find("46.70"), 5, "far");
  try {
    parse_label_line(line);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("location_z"), std::string::npos);
  }
}

TEST(ParseLabelLine, UnknownTypeKeptAsOther) {
  std::string line = kCarLine;
  line.replace(0, 3, "Tram");
  const Object3D o = parse_label_line(line);
  EXPECT_EQ(o.cls.kind(), ObjectClass::kOther);
  EXPECT_EQ(o.cls.name(), "Tram");
  EXPECT_FALSE(o.cls.is_evaluation_class());
  EXPECT_EQ(serialize_object(o).substr(0, 5), "Tram ");
}

TEST(ParseLabelFile, EmptyText) { EXPECT_TRUE(parse_label_file("").empty()); }

TEST(ParseLabelFile, KeepsOrderAndSkipsBlankLines) {
  const std::string text = std::string(kCarLine) +
                           "\n\n  \r\nPedestrian 0.00 1 0.2 10 20 30 80 1.7 0.6 "
                           "0.8 2.0 1.6 12.0 0.1\n";
  const auto objs = parse_label_file(text);
  ASSERT_EQ(objs.size(), 2u);
  EXPECT_EQ(objs[0].cls, ClassId::car());
  EXPECT_EQ(objs[1].cls, ClassId::pedestrian());
  EXPECT_EQ(objs[1].occluded, 1);
}

TEST(ParseLabelFile, ErrorCarriesLineNumber) {
  const std::string text = std::string(kCarLine) + "\nCar 1 2 3\n";
  try {
    parse_label_file(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFieldCount);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(SerializeObject, CanonicalKittiFormatting) {
  EXPECT_EQ(serialize_object(parse_label_line(kCarLine)), kCarLine);
}

TEST(SerializeObject, DontCareSentinelsSurvive) {
  const std::string line =
      "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 "
      "-1000 -10";
  const Object3D o = parse_label_line(line);
  EXPECT_EQ(o.cls.kind(), ObjectClass::kDontCare);
  EXPECT_EQ(serialize_object(o),
            "DontCare -1.00 -1 -10.00 503.89 169.71 590.61 190.13 -1.00 -1.00 "
            "-1.00 -1000.00 -1000.00 -1000.00 -10.00");
  EXPECT_EQ(parse_label_line(serialize_object(o)), o);
}

TEST(SerializeObject, DetectionHasSixteenFields) {
  Object3D o = parse_label_line(kCarLine);
  o.score = 0.9731;
  const std::string s = serialize_object(o);
  EXPECT_EQ(std::count(s.begin(), s.end(), ' '), 15);
  EXPECT_EQ(s.substr(s.rfind(' ') + 1), "0.9731");
}

TEST(FormatKittiNumber, ExtendsPrecisionOnlyWhenNeeded) {
  EXPECT_EQ(format_kitti_number(1.5), "1.50");
  EXPECT_EQ(format_kitti_number(-0.0), "0.00");
  EXPECT_EQ(format_kitti_number(0.123456), "0.123456");
  EXPECT_EQ(format_kitti_number(-1000), "-1000.00");
  EXPECT_EQ(format_kitti_number(101.7647059), "101.7647059");
}

TEST(SerializeObject, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 200; ++i) {
    Object3D o;
    o.cls = i % 2 ? ClassId::cyclist() : ClassId::from_name("Van");
    o.truncated = std::abs(u(rng)) / 100;
    o.occluded = i % 4;
    o.alpha = u(rng) / 40;
    o.bbox = {std::abs(u(rng)), std::abs(u(rng)), 100 + std::abs(u(rng)), 100 + std::abs(u(rng))};
    o.dims = {std::abs(u(rng)) / 10, std::abs(u(rng)) / 10, std::abs(u(rng)) / 10};
    o.location = {u(rng), u(rng) / 10, std::abs(u(rng))};
    o.rotation_y = u(rng) / 40;
    if (i % 3 == 0) o.score = std::abs(u(rng)) / 100;
    const Object3D back = parse_label_line(serialize_object(o));
    EXPECT_EQ(back.cls, o.cls);
    EXPECT_NEAR(back.truncated, o.truncated, 1e-6);
    EXPECT_NEAR(back.bbox.right, o.bbox.right, 1e-6);
    EXPECT_NEAR(back.location.z, o.location.z, 1e-6);
    EXPECT_NEAR(back.rotation_y, o.rotation_y, 1e-6);
    EXPECT_EQ(back.score.has_value(), o.score.has_value());
    EXPECT_EQ(serialize_object(back), serialize_object(o));
  }
}

TEST(ParseCalib, IdentityLikeP2) {
  const Calibration c = parse_calib("P2: 1 0 0 0 0 1 0 0 0 0 1 0");
  EXPECT_EQ(c.at(0, 0), 1);
  EXPECT_EQ(c.at(1, 1), 1);
  EXPECT_EQ(c.at(2, 2), 1);
  EXPECT_EQ(c.at(2, 3), 0);
}

TEST(ParseCalib, OnlyP2IsConsumed) {
  const std::string text =
      "P0: 7 0 6 0 0 7 1 0 0 0 1 0\n"
      "P1: 7 0 6 -3 0 7 1 0 0 0 1 0\n"
      "P2: 721.5377 0 609.5593 44.85728 0 721.5377 172.854 0.2163791 0 0 1 "
      "0.002745884\n"
      "P3: 7 0 6 -3 0 7 1 0 0 0 1 0\n"
      "R0_rect: 1 0 0 0 1 0 0 0 1\n";
  const Calibration c = parse_calib(text);
  EXPECT_DOUBLE_EQ(c.at(0, 0), 721.5377);
  EXPECT_DOUBLE_EQ(c.at(0, 3), 44.85728);
  EXPECT_DOUBLE_EQ(c.at(2, 3), 0.002745884);
  EXPECT_EQ(parse_calib(serialize_calib(c)), c);
}

TEST(ParseCalib, Errors) {
  EXPECT_EQ(code_of([] { parse_calib("P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"); }),
            ErrorCode::kMissingP2);
  EXPECT_EQ(code_of([] { parse_calib("P2: 1 0 0 0 0 1 0 0 0 0 1\n"); }),
            ErrorCode::kFieldCount);
  EXPECT_EQ(code_of([] { parse_calib("P2: 0 0 0 0 0 1 0 0 0 0 1 0\n"); }),
            ErrorCode::kParse);
}

TEST(LoadSplit, Basics) {
  EXPECT_EQ(load_split("000000\n000003\n"),
            (std::vector<std::string>{"000000", "000003"}));
  EXPECT_TRUE(load_split("").empty());
  EXPECT_EQ(code_of([] { load_split("000001\n000001"); }), ErrorCode::kDuplicate);
}

TEST(ClampBoxes, ClampsIntoImage) {
  std::vector<Object3D> objs(1);
  objs[0].bbox = {-5, -2, 1300, 400};
  clamp_boxes(objs, {1242, 375});
  EXPECT_EQ(objs[0].bbox, (Box2D{0, 0, 1242, 375}));
}

}  // namespace
}  // namespace mono3d
