#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "sbd/io.hpp"
#include "sbd/rng.hpp"

using namespace sbd;

namespace {

CMat random_cmat(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

std::string temp_file(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("matrix text format round-trips doubles exactly") {
  const CMat m = random_cmat(5, 3, 17);
  std::stringstream ss;
  write_matrix(ss, m);

  std::string header;
  std::getline(ss, header);
  CHECK(header == "# 5 3 complex");
  ss.seekg(0);

  const CMat back = read_matrix(ss);
  CHECK(back.rows() == 5);
  CHECK(back.cols() == 3);
  CHECK((back - m).norm() == 0.0);  // 17 significant digits are lossless
}

TEST_CASE("matrix reader rejects malformed input") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_matrix(empty), IoError);
  std::stringstream bad("# 2 2 real\n1 2\n3 4\n");
  CHECK_THROWS_AS(read_matrix(bad), IoError);
  std::stringstream truncated("# 2 2 complex\n1,0 2,0\n");
  CHECK_THROWS_AS(read_matrix(truncated), IoError);
}

TEST_CASE("key-value blocks preserve order and stop at blank lines") {
  KvBlock kv{{"alpha", "1"}, {"beta", "two words"}};
  std::stringstream ss;
  write_kv(ss, kv);
  ss << "\n" << "gamma 3\n";
  const KvBlock back = read_kv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].first == "alpha");
  CHECK(kv_get(back, "beta") == "two words");
  CHECK_THROWS_AS(kv_get(back, "gamma"), IoError);
}

TEST_CASE("instance save/load round-trip regenerates the same problem") {
  const Instance inst = make_instance(EnsembleTag::kFourier, 12, 20, 3, 4, 99);
  const std::string path = temp_file("sbd_test_instance.txt");
  save_instance(path, inst);
  const Instance back = load_instance(path);
  CHECK(back.ensemble == inst.ensemble);
  CHECK(back.n == 12);
  CHECK(back.seed == 99);
  CHECK(back.truth.support == inst.truth.support);
  CHECK((back.truth.amplitudes - inst.truth.amplitudes).norm() == 0.0);
  CHECK((back.truth.waveforms - inst.truth.waveforms).norm() == 0.0);
  CHECK((back.truth.X0 - inst.truth.X0).norm() == 0.0);

  // the operator regenerates deterministically from the stored seed
  const auto op1 = make_operator(inst.ensemble, inst.n, inst.m, inst.k,
                                 inst.seed);
  const auto op2 = make_operator(back.ensemble, back.n, back.m, back.k,
                                 back.seed);
  CHECK((op1.A() - op2.A()).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("measurements round-trip including the noise budget") {
  Measurements meas;
  meas.y = random_cmat(9, 1, 5).col(0);
  meas.eta = 0.125;
  const std::string path = temp_file("sbd_test_meas.txt");
  save_measurements(path, meas);
  const Measurements back = load_measurements(path);
  CHECK(back.eta == 0.125);
  CHECK((back.y - meas.y).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("result and report key-value blocks carry every field") {
  SolveResult res;
  res.objective = 1.5;
  res.iterations = 42;
  res.converged = true;
  const KvBlock kv = solve_result_kv(res);
  CHECK(kv_get(kv, "objective") == format_real(1.5));
  CHECK(kv_get(kv, "iterations") == "42");
  CHECK(kv_get(kv, "converged") == "1");

  CertificateReport rep;
  rep.delta = 0.25;
  rep.pass_delta = true;
  const KvBlock ckv = certificate_report_kv(rep);
  CHECK(kv_get(ckv, "delta") == format_real(0.25));
  CHECK(kv_get(ckv, "pass_delta") == "1");
  CHECK(kv_get(ckv, "rho") == format_real(0.0));
}

TEST_CASE("recovered model serializes one indexed row per column") {
  RecoveredModel model;
  model.support = SupportSet({3}, 5);
  model.amplitudes = RVec::Constant(1, 2.0);
  model.waveforms = CMat::Zero(2, 1);
  model.waveforms(0, 0) = Complex(1, 0);
  model.modulations = CMat::Zero(4, 1);
  std::stringstream ss;
  write_recovered_model(ss, model);
  std::string line;
  std::getline(ss, line);  // comment header
  std::getline(ss, line);
  CHECK(line == "3 2 1,0 0,0");
}
