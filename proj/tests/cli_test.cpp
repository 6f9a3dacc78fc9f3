#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "radiso/cli.hpp"
#include "radiso/error.hpp"
#include "support/instances.hpp"

using namespace radiso;
using namespace radiso::cli;
using nlohmann::json;
namespace fs = std::filesystem;
namespace rt = radiso::testing;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("radiso_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string instance_file(const std::string& name, const VectorSet& x, std::string c = "\"uniform\"") {
  json vecs = json::array();
  for (int i = 0; i < x.count(); ++i) {
    json v = json::array();
    for (int k = 0; k < x.dim(); ++k) v.push_back(x.column(i)[k]);
    vecs.push_back(v);
  }
  json doc = {{"d", x.dim()}, {"n", x.count()}, {"vectors", vecs}, {"c", json::parse(c)}};
  return write(name, doc.dump());
}

Options opts_for(const std::string& path) {
  Options o;
  o.in = path;
  return o;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "radiso");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("solve: worked example") {
  auto o = opts_for(instance_file("triple.json", rt::planar_triple(15.0)));
  o.c = "uniform";
  o.eps = 1e-6;
  o.method = "smooth";
  const auto r = cmd_solve(o);
  CHECK(r.exit_code == ExitCode::ok);
  const auto doc = json::parse(r.body);
  CHECK(doc["status"] == "converged");
  const auto t = doc["solver"]["t"];
  CHECK(t[0].get<double>() == doctest::Approx(1.3170).epsilon(1e-4));
  CHECK(t[1].get<double>() == doctest::Approx(1.3170).epsilon(1e-4));
  CHECK(t[2].get<double>() == 0.0);
  CHECK(doc["solver"]["isotropy_residual"].get<double>() <= 1e-6);
  CHECK(doc["transform"]["data"].size() == 4);
  CHECK(!doc["solver"].contains("wall_time_s"));
  CHECK(doc["verdicts"]["membership"] == "interior");
}

TEST_CASE("solve: outside input exits 2 with the witness") {
  const auto r = cmd_solve(opts_for(instance_file("dup.json", rt::from_rows({{1, 0}, {1, 0}, {0, 1}}))));
  CHECK(r.exit_code == ExitCode::infeasible);
  const auto doc = json::parse(r.body);
  CHECK(doc["status"] == "infeasible");
  CHECK(doc["verdicts"]["witness"]["indices"] == json::array({1, 2}));
}

TEST_CASE("solve: strongly convex with alpha from the bounds") {
  std::mt19937_64 rng(5);
  auto o = opts_for(instance_file("gp.json", rt::random_vectors(7, 3, rng)));
  o.method = "strongly_convex";
  o.alpha = "auto";
  const auto r = cmd_solve(o);
  CHECK(r.exit_code == ExitCode::ok);
  const auto doc = json::parse(r.body);
  CHECK(doc["provenance"]["config"]["alpha"] == "auto");
  CHECK(doc["bounds"]["alpha"]["alpha_general"].get<double>() > 0.0);
  CHECK(doc["solver"]["method"] == "strongly_convex");
}

TEST_CASE("solve: non-convergence exits 3 with the best iterate") {
  auto o = opts_for(instance_file("triple_10.json", rt::planar_triple(10.0)));
  o.eps = 1e-10;
  o.max_iters = 3;
  const auto r = cmd_solve(o);
  CHECK(r.exit_code == ExitCode::not_converged);
  const auto doc = json::parse(r.body);
  CHECK(doc["status"] == "non_convergence");
  CHECK(doc["solver"]["t"].size() == 3);
}

TEST_CASE("solve: validation errors exit 1") {
  const auto path = instance_file("tripleb.json", rt::planar_triple(15.0));
  CHECK(run_cli({"solve", "--in", path, "--method", "strongly_convex"}).code == 1);
  CHECK(run_cli({"solve", "--in", path, "--method", "nope"}).code == 1);
  CHECK(run_cli({"solve", "--in", path, "--alpha", "abc", "--method", "strongly_convex"}).code == 1);
  CHECK(run_cli({"solve", "--in", (scratch() / "missing.json").string()}).code == 1);
  CHECK(run_cli({"solve"}).code == 1);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
  const auto bad = write("bad.json", "{\"d\": 2, \"n\": 1, \"vectors\": [[1, 0]]}");
  const auto r = run_cli({"solve", "--in", bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("check: interior, boundary, outside") {
  std::mt19937_64 rng(6);
  CHECK(cmd_check(opts_for(instance_file("gp2.json", rt::random_vectors(6, 3, rng)))).exit_code == ExitCode::ok);

  auto vertex = opts_for(instance_file("v.json", rt::planar_triple(15.0), "[1, 1, 0]"));
  const auto rv = cmd_check(vertex);
  CHECK(rv.exit_code == 2);
  CHECK(json::parse(rv.body)["verdicts"]["membership"] == "boundary");

  const auto ro = cmd_check(opts_for(instance_file("dup2.json", rt::from_rows({{1, 0}, {1, 0}, {0, 1}}))));
  CHECK(ro.exit_code == 3);
  const auto doc = json::parse(ro.body);
  CHECK(doc["verdicts"]["membership"] == "outside");
  CHECK(doc["verdicts"]["classes"] == json::array({json::array({1, 2}), json::array({3})}));

  const auto rr = cmd_check(opts_for(instance_file("e1122.json", rt::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}}))));
  CHECK(rr.exit_code == 0);
  CHECK(json::parse(rr.body)["verdicts"]["reducible"] == true);
}

TEST_CASE("bounds: worked example numbers") {
  const auto r = cmd_bounds(opts_for(instance_file("triplec.json", rt::planar_triple(15.0))));
  CHECK(r.exit_code == 0);
  const auto b = json::parse(r.body)["bounds"];
  CHECK(b["deepness"]["delta"].get<double>() == doctest::Approx(0.25));
  CHECK(b["deepness"]["eta"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(b["deepness"]["t_inf"].get<double>() == doctest::Approx(std::log(1.5) + std::log(384.0)));
  CHECK(b["deepness"]["certified"] == false);
  CHECK(b["inputs"]["c_min"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(b["inputs"]["gamma"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(b["t_inf_hm"]["certified"] == true);
  CHECK(b["alpha"]["alpha_general"].get<double>() > 0.0);
}

TEST_CASE("verify: identity, round trip and rotation") {
  const auto id_path = write("id.json", R"({"rows": 3, "cols": 3, "data": [1,0,0,0,1,0,0,0,1]})");
  auto o = opts_for(instance_file("std.json", rt::standard_basis(3)));
  o.transform = id_path;
  CHECK(json::parse(cmd_verify(o).body)["residual"].get<double>() == 0.0);

  std::mt19937_64 rng(8);
  const auto x = rt::random_vectors(6, 3, rng);
  auto so = opts_for(instance_file("rt.json", x));
  const auto solved = cmd_solve(so);
  REQUIRE(solved.exit_code == 0);
  const auto sdoc = json::parse(solved.body);
  auto vo = so;
  vo.transform = write("rt_report.json", solved.body);
  const double back = json::parse(cmd_verify(vo).body)["residual"].get<double>();
  CHECK(back <= so.eps);
  CHECK(std::abs(back - sdoc["solver"]["isotropy_residual"].get<double>()) <= 1e-10);

  const Matrix t = report::parse_transform(sdoc);
  const double a = 0.7;
  Matrix rot = Matrix::Identity(3, 3);
  rot(0, 0) = std::cos(a);
  rot(0, 1) = -std::sin(a);
  rot(1, 0) = std::sin(a);
  rot(1, 1) = std::cos(a);
  const Matrix u = 2.5 * rot * t;
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({u(i, 0), u(i, 1), u(i, 2)});
  vo.transform = write("rot.json", rows.dump());
  const double rotated = json::parse(cmd_verify(vo).body)["residual"].get<double>();
  CHECK(std::abs(rotated - back) <= 1e-10);
}

TEST_CASE("trace: JSON rows and CSV plot") {
  auto o = opts_for(instance_file("tr.json", rt::planar_triple(15.0)));
  const auto j = cmd_trace(o);
  CHECK(j.exit_code == 0);
  const auto doc = json::parse(j.body);
  const auto& rows = doc["trace"];
  REQUIRE(rows.size() == doc["solver"]["iterations"].get<std::size_t>() + 1);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    CHECK(rows[i + 1]["f"].get<double>() <= rows[i]["f"].get<double>() + 1e-12);
  CHECK(rows.back()["f_gap"].get<double>() >= -1e-10);

  o.plot = true;
  const auto csv = cmd_trace(o).body;
  CHECK(csv.rfind("iteration,f_gap,grad_norm\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size()) + 1);
}

TEST_CASE("CSV instances take weights from --c") {
  const auto path = write("tri.csv", "1,0\n0,1\n0.6,0.8\n");
  auto o = opts_for(path);
  o.c = "0.5,0.5,1";
  const auto inst = load_instance(o);
  CHECK(inst.vectors.count() == 3);
  CHECK(inst.weights[2] == doctest::Approx(1.0));
  CHECK(cmd_solve(o).exit_code == ExitCode::infeasible);
  o.c = "uniform";
  CHECK(cmd_solve(o).exit_code == ExitCode::ok);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  std::mt19937_64 rng(9);
  const auto path = instance_file("det.json", rt::random_vectors(10, 4, rng));
  ::setenv("RADISO_THREADS", "1", 1);
  const auto a = run_cli({"solve", "--in", path});
  const auto b = run_cli({"solve", "--in", path});
  ::setenv("RADISO_THREADS", "4", 1);
  const auto c = run_cli({"solve", "--in", path});
  ::unsetenv("RADISO_THREADS");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);

  const auto out_path = (scratch() / "written.json").string();
  CHECK(run_cli({"solve", "--in", path, "--out", out_path}).code == 0);
  std::ifstream f(out_path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == a.out);
}
