#include "imc/plant.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace imc {

PlantDT discretize_plant_zoh(const PlantCT& plant, double Ts) {
    if (!(Ts > 0)) throw ImcError("discretize_plant_zoh: Ts must be positive");
    const int n = plant.n();
    // exp([[A, B],[0, 0]] Ts) = [[G, H],[0, I]]
    Mat aug = Mat::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = plant.A2 * Ts;
    aug.topRightCorner(n, 1) = plant.B2 * Ts;
    const Mat E = aug.exp();
    PlantDT d;
    d.G2 = E.topLeftCorner(n, n);
    d.H2 = E.topRightCorner(n, 1);
    d.C2 = plant.C2;
    d.Ts = Ts;
    return d;
}

PlantDT to_observer_canonical(PlantDT plant) {
    const int n = plant.n();
    if (!is_observable(plant.G2, plant.C2))
        throw NotObservable("to_observer_canonical: (C2, G2) not observable");
    CanonicalForm cf;
    cf.char_coeffs = char_poly(plant.G2);
    cf.G = observer_companion(cf.char_coeffs);
    cf.C = RowVec::Zero(n);
    cf.C(0) = 1;
    // T = O_canon^{-1} O, so that C = C_o T and O_o = O T^{-1}
    const Mat O = observability_matrix(plant.G2, plant.C2);
    const Mat Oc = observability_matrix(cf.G, cf.C);
    cf.T = Oc.fullPivLu().solve(O);
    cf.H = cf.T * plant.H2;
    plant.canon = std::move(cf);
    return plant;
}

Vec markov_parameters(const PlantDT& plant, int count) {
    Vec m(count);
    RowVec row = plant.C2;
    for (int j = 0; j < count; ++j) {
        m(j) = row * plant.H2;
        row = row * plant.G2;
    }
    return m;
}

PlantDT augment_state(PlantDT plant, int target_n, double extra_pole) {
    while (plant.n() < target_n) {
        const int n = plant.n();
        Mat G = Mat::Zero(n + 1, n + 1);
        G.topLeftCorner(n, n) = plant.G2;
        G(n, n) = extra_pole;
        Vec H = Vec::Zero(n + 1);
        H.head(n) = plant.H2;          // new mode uncontrollable
        RowVec C = RowVec::Zero(n + 1);
        C.head(n) = plant.C2;
        C(n) = 1;                      // observable, so canonical transforms stay valid
        plant.G2 = std::move(G);
        plant.H2 = std::move(H);
        plant.C2 = std::move(C);
        plant.canon.reset();
    }
    return plant;
}

std::pair<PlantDT, PlantDT> paper_plants() {
    PlantDT master, slave;
    master.G2 = (Mat(2, 2) << 1.00, 9.99e-5, -0.79, 1.00).finished();
    master.H2 = (Vec(2) << 3.97e-6, 0.08).finished();
    master.C2 = (RowVec(2) << 1, 0).finished();
    master.Ts = 1e-4;
    slave.G2 = (Mat(2, 2) << 1.00, 9.98e-5, -2.10, 1.00).finished();
    slave.H2 = (Vec(2) << 1.04e-5, 0.21).finished();
    slave.C2 = (RowVec(2) << 1, 0).finished();
    slave.Ts = 1e-4;
    return {master, slave};
}

} // namespace imc
