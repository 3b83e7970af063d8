#include "jacobi/serialize.hpp"

#include <cstdio>
#include <ostream>

namespace jacobi {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vec vec_from_json(const nlohmann::json& j, Eigen::Index expected, const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string("element JSON: '") + field + "' has wrong length");
  }
  Vec out(expected);
  for (Eigen::Index i = 0; i < expected; ++i) out(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return out;
}

}  // namespace

nlohmann::json element_to_json(const JacobiElement& g) {
  const Mat& sigma = g.sigma().matrix();
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index k = 0; k < sigma.cols(); ++k) rows.push_back(sigma(i, k));
  }
  return nlohmann::json{{"n", g.dim().n()}, {"sigma", rows}, {"w", vec_json(g.w())}, {"r", g.r()}, {"eps", g.tr()}};
}

JacobiElement element_from_json(const nlohmann::json& j, double tol) {
  try {
    const Dimension dim(j.at("n").get<int>());
    const Vec flat = vec_from_json(j.at("sigma"), dim.reduced() * dim.reduced(), "sigma");
    Mat sigma(dim.reduced(), dim.reduced());
    for (int i = 0; i < dim.reduced(); ++i) {
      for (int k = 0; k < dim.reduced(); ++k) sigma(i, k) = flat(i * dim.reduced() + k);
    }
    Vec w = vec_from_json(j.at("w"), dim.reduced(), "w");
    const double r = j.at("r").get<double>();
    const int eps = j.contains("eps") ? j.at("eps").get<int>() : 1;
    return JacobiElement(SymplecticBlock(std::move(sigma), tol), std::move(w), r, eps);
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorCode::InvalidParameter, std::string("element JSON: ") + err.what());
  }
}

nlohmann::json report_to_json(const InvarianceReport& report) {
  nlohmann::json probes = nlohmann::json::array();
  for (const ProbeResult& p : report.probes) {
    nlohmann::json entry{{"z", vec_json(p.z.flatten())},
                         {"omega_residual", p.omega_residual},
                         {"lambda_residual", p.lambda_residual}};
    if (p.factorization) {
      entry["factorization"] = element_to_json(*p.factorization);
    } else {
      entry["factorization"] = nullptr;
      entry["factor_error"] = to_string(p.factor_error);
    }
    probes.push_back(std::move(entry));
  }
  return nlohmann::json{{"omega_residual_max", report.omega_residual_max},
                        {"lambda_residual_max", report.lambda_residual_max},
                        {"tol_omega", report.tol_omega},
                        {"tol_lambda", report.tol_lambda},
                        {"classification", to_string(report.classification)},
                        {"probes", std::move(probes)}};
}

nlohmann::json ledger_to_json(const EnergyLedger& ledger) {
  return nlohmann::json{{"delta_H", ledger.delta_h},
                        {"kinetic_term", ledger.kinetic_term},
                        {"work_term", ledger.work_term},
                        {"power_term", ledger.power_term},
                        {"residual", ledger.residual}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.dim().n();
  out << "tau";
  for (const char* prefix : {"q", "p"}) {
    for (int i = 1; i <= n; ++i) out << ',' << prefix << i;
  }
  out << ",eps,t";
  for (const char* prefix : {"v", "f"}) {
    for (int i = 1; i <= n; ++i) out << ',' << prefix << i;
  }
  out << ",r\n";
  for (const TrajectorySample& s : traj.samples()) {
    out << format_double(s.tau);
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.z.q()(i));
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.z.p()(i));
    out << ',' << format_double(s.z.eps()) << ',' << format_double(s.z.t());
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.v(i));
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.f(i));
    out << ',' << format_double(s.r) << '\n';
  }
}

}  // namespace jacobi
