#pragma once
#include <limits>
#include <stdexcept>
#include <vector>

namespace blpp {

// Initial condition X for Brownian last passage percolation on [0,1].
// NarrowWedge: X(0)=0 and X(t)=-inf for t>0 (not a finite function).
// Flat: X == level. PiecewiseLinear: linear interpolation through knots.
struct ContinuumIC {
  enum class Kind { NarrowWedge, Flat, PiecewiseLinear };
  Kind kind = Kind::NarrowWedge;
  double level = 0.0;
  std::vector<double> knot_t, knot_v;

  static ContinuumIC narrow_wedge() { return ContinuumIC{}; }

  static ContinuumIC flat(double c) {
    ContinuumIC ic;
    ic.kind = Kind::Flat;
    ic.level = c;
    return ic;
  }

  static ContinuumIC piecewise_linear(std::vector<double> ts, std::vector<double> vs) {
    if (ts.size() != vs.size() || ts.size() < 2)
      throw std::invalid_argument("piecewise_linear: need >= 2 knots");
    for (size_t i = 1; i < ts.size(); ++i)
      if (!(ts[i] > ts[i - 1])) throw std::invalid_argument("piecewise_linear: knots not increasing");
    if (ts.front() != 0.0) throw std::invalid_argument("piecewise_linear: first knot must sit at t=0");
    ContinuumIC ic;
    ic.kind = Kind::PiecewiseLinear;
    ic.knot_t = std::move(ts);
    ic.knot_v = std::move(vs);
    return ic;
  }

  bool finite() const { return kind != Kind::NarrowWedge; }

  double eval(double t) const {
    switch (kind) {
      case Kind::NarrowWedge:
        return t == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
      case Kind::Flat:
        return level;
      case Kind::PiecewiseLinear: {
        if (t <= knot_t.front()) return knot_v.front();
        if (t >= knot_t.back()) return knot_v.back();
        size_t i = 1;
        while (knot_t[i] < t) ++i;
        double u = (t - knot_t[i - 1]) / (knot_t[i] - knot_t[i - 1]);
        return knot_v[i - 1] + u * (knot_v[i] - knot_v[i - 1]);
      }
    }
    return 0.0;
  }
};

}  // namespace blpp
