#include "sbd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sbd/rng.hpp"

namespace sbd {

std::string format_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix(std::ostream& out, const CMat& m) {
  out << "# " << m.rows() << " " << m.cols() << " complex\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << " ";
      out << format_real(m(i, j).real()) << "," << format_real(m(i, j).imag());
    }
    out << "\n";
  }
}

CMat read_matrix(std::istream& in) {
  std::string line;
  do {
    if (!std::getline(in, line)) {
      throw IoError("read_matrix: missing header line");
    }
  } while (line.empty());
  Eigen::Index rows = 0, cols = 0;
  std::string kind;
  {
    std::istringstream hs(line);
    std::string hash;
    hs >> hash >> rows >> cols >> kind;
    if (hash != "#" || kind != "complex" || rows < 0 || cols < 0 || hs.fail()) {
      throw IoError("read_matrix: bad header: " + line);
    }
  }
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw IoError("read_matrix: truncated at row " + std::to_string(i));
    }
    std::istringstream rs(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(rs >> tok)) {
        throw IoError("read_matrix: short row " + std::to_string(i));
      }
      const auto comma = tok.find(',');
      if (comma == std::string::npos) {
        throw IoError("read_matrix: bad entry: " + tok);
      }
      m(i, j) = Complex(std::stod(tok.substr(0, comma)),
                        std::stod(tok.substr(comma + 1)));
    }
  }
  return m;
}

void save_matrix(const std::string& path, const CMat& m) {
  std::ofstream out(path);
  if (!out) throw IoError("save_matrix: cannot open " + path);
  write_matrix(out, m);
}

CMat load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_matrix: cannot open " + path);
  return read_matrix(in);
}

void write_kv(std::ostream& out, const KvBlock& kv) {
  for (const auto& [key, value] : kv) {
    out << key << " " << value << "\n";
  }
}

KvBlock read_kv(std::istream& in) {
  KvBlock kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      if (kv.empty()) continue;
      break;
    }
    if (line[0] == '#') continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) {
      kv.emplace_back(line, "");
    } else {
      kv.emplace_back(line.substr(0, space), line.substr(space + 1));
    }
  }
  return kv;
}

std::string kv_get(const KvBlock& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  throw IoError("missing key: " + key);
}

MeasurementOperator make_operator(EnsembleTag ensemble, int n, int m, int k,
                                  std::uint64_t seed) {
  const std::uint64_t dict_seed = derive_seed(seed, 0);
  Dictionary dict = ensemble == EnsembleTag::kGaussian
                        ? gaussian_dictionary(n, m, dict_seed)
                        : fourier_dictionary(n, m, dict_seed);
  if (ensemble == EnsembleTag::kExplicit) {
    throw std::invalid_argument(
        "make_operator: explicit dictionaries are not seed-generated");
  }
  return MeasurementOperator(std::move(dict), dft_subspace(n, k));
}

Instance make_instance(EnsembleTag ensemble, int n, int m, int k, int j,
                       std::uint64_t seed) {
  Instance inst;
  inst.ensemble = ensemble;
  inst.n = n;
  inst.m = m;
  inst.k = k;
  inst.j = j;
  inst.seed = seed;
  inst.truth = random_ground_truth(m, k, j, derive_seed(seed, 1));
  return inst;
}

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw IoError("save_instance: cannot open " + path);
  out << "# sbd instance\n";
  KvBlock kv;
  kv.emplace_back("ensemble", to_string(inst.ensemble));
  kv.emplace_back("N", std::to_string(inst.n));
  kv.emplace_back("M", std::to_string(inst.m));
  kv.emplace_back("K", std::to_string(inst.k));
  kv.emplace_back("J", std::to_string(inst.j));
  kv.emplace_back("seed", std::to_string(inst.seed));
  {
    std::string s;
    for (int t = 0; t < inst.truth.support.size(); ++t) {
      if (t > 0) s += " ";
      s += std::to_string(inst.truth.support[t]);
    }
    kv.emplace_back("support", s);
  }
  {
    std::string s;
    for (int t = 0; t < inst.truth.amplitudes.size(); ++t) {
      if (t > 0) s += " ";
      s += format_real(inst.truth.amplitudes(t));
    }
    kv.emplace_back("amplitudes", s);
  }
  write_kv(out, kv);
  out << "\n";
  write_matrix(out, inst.truth.waveforms);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_instance: cannot open " + path);
  const KvBlock kv = read_kv(in);
  Instance inst;
  inst.ensemble = ensemble_from_string(kv_get(kv, "ensemble"));
  inst.n = std::stoi(kv_get(kv, "N"));
  inst.m = std::stoi(kv_get(kv, "M"));
  inst.k = std::stoi(kv_get(kv, "K"));
  inst.j = std::stoi(kv_get(kv, "J"));
  inst.seed = std::stoull(kv_get(kv, "seed"));

  std::vector<int> support;
  {
    std::istringstream ss(kv_get(kv, "support"));
    int idx;
    while (ss >> idx) support.push_back(idx);
  }
  inst.truth.support = SupportSet(std::move(support), inst.m);
  inst.truth.amplitudes = RVec(inst.j);
  {
    std::istringstream ss(kv_get(kv, "amplitudes"));
    for (int t = 0; t < inst.j; ++t) {
      if (!(ss >> inst.truth.amplitudes(t))) {
        throw IoError("load_instance: short amplitude list");
      }
    }
  }
  inst.truth.waveforms = read_matrix(in);
  if (inst.truth.waveforms.rows() != inst.k ||
      inst.truth.waveforms.cols() != inst.j) {
    throw IoError("load_instance: waveform matrix shape mismatch");
  }
  inst.truth.X0 = CMat::Zero(inst.k, inst.m);
  for (int t = 0; t < inst.j; ++t) {
    inst.truth.X0.col(inst.truth.support[t]) =
        inst.truth.amplitudes(t) * inst.truth.waveforms.col(t);
  }
  return inst;
}

void save_measurements(const std::string& path, const Measurements& meas) {
  std::ofstream out(path);
  if (!out) throw IoError("save_measurements: cannot open " + path);
  out << "# sbd measurements\n";
  KvBlock kv;
  kv.emplace_back("eta", format_real(meas.eta));
  write_kv(out, kv);
  out << "\n";
  write_matrix(out, meas.y);
}

Measurements load_measurements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_measurements: cannot open " + path);
  const KvBlock kv = read_kv(in);
  Measurements meas;
  meas.eta = std::stod(kv_get(kv, "eta"));
  const CMat y = read_matrix(in);
  if (y.cols() != 1) throw IoError("load_measurements: y must be a column");
  meas.y = y.col(0);
  return meas;
}

KvBlock solve_result_kv(const SolveResult& res) {
  KvBlock kv;
  kv.emplace_back("objective", format_real(res.objective));
  kv.emplace_back("primal_residual", format_real(res.primal_residual));
  kv.emplace_back("dual_residual", format_real(res.dual_residual));
  kv.emplace_back("iterations", std::to_string(res.iterations));
  kv.emplace_back("converged", res.converged ? "1" : "0");
  kv.emplace_back("feasibility_gap", format_real(res.feasibility_gap));
  return kv;
}

KvBlock certificate_report_kv(const CertificateReport& rep) {
  KvBlock kv;
  kv.emplace_back("delta", format_real(rep.delta));
  kv.emplace_back("gamma", format_real(rep.gamma));
  kv.emplace_back("theta", format_real(rep.theta));
  kv.emplace_back("cert_residual", format_real(rep.cert_residual));
  kv.emplace_back("beta", format_real(rep.beta));
  kv.emplace_back("tau", format_real(rep.tau));
  kv.emplace_back("rho", format_real(rep.rho));
  kv.emplace_back("pass_cert_residual", rep.pass_cert_residual ? "1" : "0");
  kv.emplace_back("pass_theta", rep.pass_theta ? "1" : "0");
  kv.emplace_back("pass_delta", rep.pass_delta ? "1" : "0");
  kv.emplace_back("pass_inexact_duality", rep.pass_inexact_duality ? "1" : "0");
  kv.emplace_back("pass_noisy_condition", rep.pass_noisy_condition ? "1" : "0");
  return kv;
}

void write_recovered_model(std::ostream& out, const RecoveredModel& model) {
  out << "# index c h(re,im ...)\n";
  for (int t = 0; t < model.support.size(); ++t) {
    out << model.support[t] << " " << format_real(model.amplitudes(t));
    for (Eigen::Index i = 0; i < model.waveforms.rows(); ++i) {
      const Complex h = model.waveforms(i, t);
      out << " " << format_real(h.real()) << "," << format_real(h.imag());
    }
    out << "\n";
  }
}

}  // namespace sbd
