#pragma once

#include <stdexcept>
#include <string>

namespace htsim {

enum class Model { toric, d4 };
enum class Basis { zero, plus };

Model parse_model(const std::string& s);
Basis parse_basis(const std::string& s);
const char* to_string(Model m);
const char* to_string(Basis b);

struct Rates {
  double eta = 1.0;
  double gamma_x = 0.0;
  double gamma_z = 0.0;
  double phi_e = 1.0;

  void validate() const;
  // Duration of one event times the number of edges.
  double c0() const { return 1.0 / (eta + 2.0 * gamma_x / 3.0 + gamma_z / 3.0); }
};

enum class Branch { heralded, unheralded, x_correct, z_correct };

// One random-sequential site event.
struct SiteEvent {
  int edge;
  int side;    // which endpoint vertex / boundary plaquette of the edge
  Branch branch;
  int pauli;   // 0 = I, 1 = X, 2 = Z, 3 = ZX
};

// Cumulative branch probabilities of a site event.
class EventTable {
 public:
  explicit EventTable(const Rates& r);
  double heralded() const { return ph_; }
  double unheralded() const { return pu_; }
  double x_correct() const { return px_; }
  double z_correct() const { return pz_; }
  // Branch and Pauli for a uniform u in [0,1).
  void classify(double u, Branch& b, int& pauli) const;

 private:
  double ph_, pu_, px_, pz_;
};

}  // namespace htsim
