#include "htsim/rates.h"

#include <algorithm>

namespace htsim {

Model parse_model(const std::string& s) {
  if (s == "toric") return Model::toric;
  if (s == "d4") return Model::d4;
  throw std::invalid_argument("unknown model: " + s);
}

Basis parse_basis(const std::string& s) {
  if (s == "zero") return Basis::zero;
  if (s == "plus") return Basis::plus;
  throw std::invalid_argument("unknown basis: " + s);
}

const char* to_string(Model m) { return m == Model::toric ? "toric" : "d4"; }
const char* to_string(Basis b) { return b == Basis::zero ? "zero" : "plus"; }

void Rates::validate() const {
  if (!(eta >= 0 && gamma_x >= 0 && gamma_z >= 0)) {
    throw std::invalid_argument("rates must be non-negative");
  }
  if (!(phi_e >= 0 && phi_e <= 1)) {
    throw std::invalid_argument("phi_e must lie in [0,1]");
  }
  if (eta + gamma_x + gamma_z <= 0) {
    throw std::invalid_argument("at least one rate must be positive");
  }
}

EventTable::EventTable(const Rates& r) {
  r.validate();
  const double c0 = r.c0();
  ph_ = c0 * r.eta * r.phi_e;
  pu_ = c0 * r.eta * (1.0 - r.phi_e);
  px_ = c0 * 2.0 * r.gamma_x / 3.0;
  pz_ = c0 * r.gamma_z / 3.0;
}

void EventTable::classify(double u, Branch& b, int& pauli) const {
  pauli = 0;
  if (u < ph_) {
    b = Branch::heralded;
    pauli = std::min(3, static_cast<int>(4.0 * u / ph_));
    return;
  }
  u -= ph_;
  if (u < pu_) {
    b = Branch::unheralded;
    pauli = 1 + std::min(2, static_cast<int>(3.0 * u / pu_));
    return;
  }
  u -= pu_;
  b = (u < px_ || pz_ <= 0.0) ? Branch::x_correct : Branch::z_correct;
}

}  // namespace htsim
