#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "jacobi/dynamics.hpp"
#include "jacobi/jacobigroup.hpp"
#include "jacobi/verify.hpp"

namespace jacobi {

/// "%.17g" -- enough digits for an exact double round trip.
std::string format_double(double value);

/// {n, sigma (row-major 2n x 2n), w, r, eps}
nlohmann::json element_to_json(const JacobiElement& g);
JacobiElement element_from_json(const nlohmann::json& j, double tol = 1e-10);

nlohmann::json report_to_json(const InvarianceReport& report);
nlohmann::json ledger_to_json(const EnergyLedger& ledger);

/// Header: tau, q1..qn, p1..pn, eps, t, v1..vn, f1..fn, r.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace jacobi
