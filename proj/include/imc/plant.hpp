#pragma once

#include <optional>

#include "imc/linalg.hpp"
#include "imc/errors.hpp"

namespace imc {

/// Continuous LTI axis model x' = A2 x + B2 u, y = C2 x.
struct PlantCT {
    Mat A2;
    Vec B2;
    RowVec C2;

    int n() const { return static_cast<int>(A2.rows()); }
    bool controllable() const { return is_controllable(A2, B2); }
    bool observable() const { return is_observable(A2, C2); }
};

/// Observer-canonical realization of a discrete plant, plus the transform
/// that produced it. H holds the transfer-function numerator coefficients
/// (top entry multiplies z^{n-1}); the characteristic coefficients are the
/// shared denominator.
struct CanonicalForm {
    Mat G;        ///< observer companion
    Vec H;        ///< numerator coefficients
    RowVec C;     ///< [1 0 ... 0]
    Mat T;        ///< x_canon = T x
    Vec char_coeffs;  ///< [d1 .. dn], det(zI - G) = z^n + d1 z^{n-1} + ...
};

/// Discrete LTI axis model x(k+1) = G2 x + H2 u, y = C2 x.
struct PlantDT {
    Mat G2;
    Vec H2;
    RowVec C2;
    double Ts = 0;
    std::optional<CanonicalForm> canon;

    int n() const { return static_cast<int>(G2.rows()); }
    double spectral_radius() const { return imc::spectral_radius(G2); }
    bool is_stable() const { return spectral_radius() < 1.0; }
};

/// Zero-order-hold discretization via the augmented matrix exponential.
PlantDT discretize_plant_zoh(const PlantCT& plant, double Ts);

/// Populates the observer-canonical realization. Throws NotObservable.
PlantDT to_observer_canonical(PlantDT plant);

/// Markov parameters C G^j H, j = 0..count-1.
Vec markov_parameters(const PlantDT& plant, int count);

/// Appends a stable, uncontrollable (hence transfer-invariant) mode until the
/// state dimension reaches target_n. Used when n < rho.
PlantDT augment_state(PlantDT plant, int target_n, double extra_pole = 0.5);

/// The experimental stage models printed in the paper, Ts = 1e-4 s.
/// first: master X1 axis, second: slave X2 axis; both C = [1 0].
std::pair<PlantDT, PlantDT> paper_plants();

} // namespace imc
