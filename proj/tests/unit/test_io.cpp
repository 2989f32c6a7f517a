#include <doctest.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "gsr/io.hpp"
#include "gsr/rng.hpp"
#include "tmpdir.hpp"

using namespace gsr;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}
}  // namespace

TEST_SUITE("io") {

TEST_CASE("gsrm layout and roundtrip") {
  TempDir tmp;
  Mat a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  write_gsrm(tmp.path / "a.gsrm", a);
  const std::string raw = slurp(tmp.path / "a.gsrm");
  REQUIRE(raw.size() == 4 + 4 + 4 + 1 + 6 * 8);
  CHECK(raw.substr(0, 4) == "GSRM");
  CHECK(static_cast<unsigned char>(raw[4]) == 2);
  CHECK(static_cast<unsigned char>(raw[8]) == 3);
  CHECK(static_cast<unsigned char>(raw[12]) == 1);
  double second;
  std::memcpy(&second, raw.data() + 13 + 8, 8);
  CHECK(second == 2.0);  // row-major payload
  const Mat back = read_gsrm(tmp.path / "a.gsrm");
  CHECK((back.array() == a.array()).all());

  Rng rng(1);
  Mat r(17, 9);
  for (Index j = 0; j < 9; ++j) r.col(j) = rng.normal_vector(17);
  write_gsrm(tmp.path / "r.gsrm", r);
  CHECK((read_gsrm(tmp.path / "r.gsrm").array() == r.array()).all());
}

TEST_CASE("gsrm errors") {
  TempDir tmp;
  CHECK_THROWS_AS(read_gsrm(tmp.path / "missing.gsrm"), IoError);
  write_text(tmp.path / "bad.gsrm", "GSRX0000000000000");
  CHECK_THROWS_AS(read_gsrm(tmp.path / "bad.gsrm"), IoError);
  Mat a = Mat::Ones(3, 3);
  write_gsrm(tmp.path / "t.gsrm", a);
  std::string raw = slurp(tmp.path / "t.gsrm");
  write_text(tmp.path / "t.gsrm", raw.substr(0, raw.size() - 5));
  CHECK_THROWS_AS(read_gsrm(tmp.path / "t.gsrm"), IoError);
  raw[12] = 2;  // unknown dtype
  write_text(tmp.path / "d.gsrm", raw);
  CHECK_THROWS_AS(read_gsrm(tmp.path / "d.gsrm"), IoError);
  try {
    read_gsrm(tmp.path / "missing.gsrm");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing.gsrm") != std::string::npos);
  }
}

TEST_CASE("f64 vectors") {
  TempDir tmp;
  Rng rng(2);
  const Vec v = rng.normal_vector(11);
  write_f64(tmp.path / "v.f64", v);
  CHECK((read_f64(tmp.path / "v.f64").array() == v.array()).all());
  write_text(tmp.path / "odd.f64", "1234567");
  CHECK_THROWS_AS(read_f64(tmp.path / "odd.f64"), IoError);
}

TEST_CASE("csv") {
  const Mat a = parse_csv_matrix("# comment\nc1,c2\n1,2\n\n3.5, -4e2\n");
  REQUIRE(a.rows() == 2);
  REQUIRE(a.cols() == 2);
  CHECK(a(1, 1) == -400.0);
  CHECK(a(1, 0) == 3.5);
  CHECK_THROWS_AS(parse_csv_matrix("1,2\n3\n"), IoError);
  CHECK_THROWS_AS(parse_csv_matrix("1,2\n3,x\n"), IoError);
  TempDir tmp;
  write_text(tmp.path / "m.csv", "1,2,3\n4,5,6\n");
  CHECK(read_csv_matrix(tmp.path / "m.csv")(1, 2) == 6.0);
  CHECK_THROWS_AS(read_csv_matrix(tmp.path / "nope.csv"), IoError);
}

TEST_CASE("instance directory") {
  TempDir tmp;
  InstanceSpec sp;
  sp.n = 12;
  sp.p = 16;
  sp.m = 4;
  sp.r_bar = 2;
  sp.seed = 3;
  sp.theta1 = 0.1;
  const Instance inst = make_instance(sp);
  save_instance(tmp.path / "inst", inst);
  for (const char* f : {"A.gsrm", "b.f64", "x_true.f64", "groups.json", "meta.json"})
    CHECK(fs::exists(tmp.path / "inst" / f));
  const Instance back = load_instance(tmp.path / "inst");
  CHECK((back.A.array() == inst.A.array()).all());
  CHECK((back.b.array() == inst.b.array()).all());
  CHECK((back.x_true->array() == inst.x_true->array()).all());
  CHECK(back.groups == inst.groups);
  CHECK(back.support_true == inst.support_true);
  CHECK(back.radius == inst.radius);
  CHECK(back.seed == inst.seed);
  CHECK_THROWS_AS(load_instance(tmp.path / "nope"), IoError);
}

TEST_CASE("multitask csv") {
  const auto d = parse_multitask_csv("task,f1,f2,y\nb,1,2,3\na,4,5,6\nb,7,8,9\n");
  REQUIRE(d.task_ids.size() == 2);
  CHECK(d.task_ids[0] == "b");
  CHECK(d.tasks[0].X.rows() == 2);
  CHECK(d.tasks[0].X(1, 0) == 7.0);
  CHECK(d.tasks[0].y[1] == 9.0);
  CHECK(d.tasks[1].y[0] == 6.0);
  const auto inst = assemble_multitask(d.tasks);
  CHECK(inst.A.rows() == 3);
  CHECK(inst.A.cols() == 4);
  CHECK_THROWS_AS(parse_multitask_csv("a,1,2\nb,1\n"), IoError);
}

TEST_CASE("json files") {
  TempDir tmp;
  write_json(tmp.path / "x.json", {{"a", 1}});
  CHECK(read_json(tmp.path / "x.json")["a"] == 1);
  write_text(tmp.path / "bad.json", "{");
  CHECK_THROWS_AS(read_json(tmp.path / "bad.json"), IoError);
}

}
