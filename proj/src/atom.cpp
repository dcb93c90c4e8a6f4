#include "shelving/atom.hpp"

#include <sstream>

namespace shelving {

AtomParams moderate_drive() {
  AtomParams p;
  p.rabi = 0.2625;  // gamma_plus / 4
  return p;
}

AtomParams strong_drive() {
  AtomParams p;
  p.rabi = 3.5;
  return p;
}

AtomParams strong_detuned_drive() {
  AtomParams p;
  p.rabi = 3.5;
  p.detuning = 1.0;
  return p;
}

Diagnostics validate(const AtomParams& params) {
  check_params(params);
  Diagnostics d;
  d.gamma_plus = params.gamma_plus();
  d.gamma_minus = params.gamma_minus();
  d.q = params.q();
  d.shelving_regime = params.shelving_regime();
  if (!d.shelving_regime) {
    std::ostringstream os;
    os << "not in the shelving regime: gamma=" << params.gamma
       << " is not >= 10*max(gamma_d, gamma_a)";
    d.warnings.push_back(os.str());
  }
  if (params.gamma_d == 0.0)
    d.warnings.push_back("gamma_d = 0: no shelving, dark periods never occur");
  return d;
}

}  // namespace shelving
