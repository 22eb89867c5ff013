#ifndef SBD_IO_HPP
#define SBD_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sbd/certificates.hpp"
#include "sbd/ensembles.hpp"
#include "sbd/extraction.hpp"
#include "sbd/solver.hpp"
#include "sbd/types.hpp"

namespace sbd {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits, enough to round-trip a double through decimal.
std::string format_real(Real x);

// Text format: header `# rows cols complex`, then one row per line with
// entries as re,im pairs separated by whitespace.
void write_matrix(std::ostream& out, const CMat& m);
CMat read_matrix(std::istream& in);
void save_matrix(const std::string& path, const CMat& m);
CMat load_matrix(const std::string& path);

// Flat `key value` block; order preserved. A blank line or EOF ends a block.
using KvBlock = std::vector<std::pair<std::string, std::string>>;
void write_kv(std::ostream& out, const KvBlock& kv);
KvBlock read_kv(std::istream& in);
std::string kv_get(const KvBlock& kv, const std::string& key);

// A synthesized problem instance. The dictionary and basis are not stored:
// they regenerate deterministically from (ensemble, N, M, K, seed).
struct Instance {
  EnsembleTag ensemble = EnsembleTag::kGaussian;
  int n = 0, m = 0, k = 0, j = 0;
  std::uint64_t seed = 0;
  GroundTruth truth;
};

// Dictionary seed and ground-truth seed derived from the instance seed.
MeasurementOperator make_operator(EnsembleTag ensemble, int n, int m, int k,
                                  std::uint64_t seed);
Instance make_instance(EnsembleTag ensemble, int n, int m, int k, int j,
                       std::uint64_t seed);

void save_instance(const std::string& path, const Instance& inst);
Instance load_instance(const std::string& path);

struct Measurements {
  CVec y;
  Real eta = 0.0;  // realized noise budget, 0 for clean data
};

void save_measurements(const std::string& path, const Measurements& meas);
Measurements load_measurements(const std::string& path);

KvBlock solve_result_kv(const SolveResult& res);
KvBlock certificate_report_kv(const CertificateReport& rep);

// Table: one line per reported column — index, c, then h entries as re,im.
void write_recovered_model(std::ostream& out, const RecoveredModel& model);

}  // namespace sbd

#endif  // SBD_IO_HPP
