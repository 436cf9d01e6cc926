#ifndef HPZ_FIXTURES_HPP_
#define HPZ_FIXTURES_HPP_

/**
 * @file fixtures.hpp
 * @brief Reference sets and the two-mode quadratic benchmark model.
 */

#include "reach.hpp"
#include "set.hpp"

namespace hpz::fixtures
{

/// Constrained polynomial zonotope with three factors and one cubic constraint.
inline HybridPolynomialZonotope cpz1()
{
    Matrix G(2, 4);
    G << 1, 0, 1.5, 0.5,
         0, 1, 2, -2;
    IntMatrix E(3, 4);
    E << 1, 0, 0, 0,
         0, 1, 0, 2,
         0, 0, 1, 1;
    Matrix A(1, 3);
    A << 1, 2, 0.5;
    IntMatrix R(3, 3);
    R << 1, 0, 0,
         0, 1, 0,
         0, 0, 3;
    return from_cpz(Vector::Zero(2), G, E, A, Vector::Ones(1), R);
}

inline Matrix example1_binary_generators()
{
    Matrix Gb(2, 3);
    Gb << 3, 1, 4,
          1, 3, -4;
    return Gb;
}

/// Hybrid zonotope with cpz1's generators as continuous generators.
inline HybridPolynomialZonotope example1_hz()
{
    const HybridPolynomialZonotope Z = cpz1();
    return from_hybrid_zonotope(Vector::Zero(2), Z.Gc(), example1_binary_generators(), Matrix(0, 4), Matrix(0, 3),
                                Vector(0));
}

/// cpz1 shifted by every binary combination of three generators: 8 translated copies.
inline HybridPolynomialZonotope example1_hpz1()
{
    const HybridPolynomialZonotope Z = cpz1();
    return {Z.c(), Z.Gc(), example1_binary_generators(), Z.E(), Z.Ac(), Matrix::Zero(1, 3), Z.b(), Z.R()};
}

/// hpz1 with the binaries entering the constraint through [1.5 1.5 1.5].
inline HybridPolynomialZonotope example1_hpz2()
{
    const HybridPolynomialZonotope Z = cpz1();
    Matrix Ab(1, 3);
    Ab << 1.5, 1.5, 1.5;
    return {Z.c(), Z.Gc(), example1_binary_generators(), Z.E(), Z.Ac(), Ab, Z.b(), Z.R()};
}

/// Two-mode planar system: mode 1 on x1 <= 0, mode 2 on x1 >= 0.
inline PwnaModel pwna()
{
    Matrix M1(2, 2), M2(2, 2), A1(2, 2), A2(2, 2);
    M1 << 0.017, -0.0028,
          0, 0.017;
    M2 << -0.1, 0,
          0, -0.1;
    A1 << 0.75, 0.25,
          -0.25, 0.75;
    A2 << 0.75, -0.25,
          0.25, 0.75;
    Vector d(2);
    d << 0.25, -0.5;

    PwnaModel m;
    m.state_dim = 2;
    Matrix L1(1, 2), L2(1, 2);
    L1 << 1, 0;
    L2 << -1, 0;
    m.modes.push_back({{L1, Vector::Zero(1)}, {{M1, M1}, A1, d}});
    m.modes.push_back({{L2, Vector::Zero(1)}, {{M2, M2}, A2, d}});
    Vector c0(2);
    c0 << -0.201, 0.96;
    m.initial_set = from_zonotope(c0, 0.2 * Matrix::Identity(2, 2));
    m.horizon = 5;
    m.sampling.grid_res = 40;
    m.sampling.max_points = 1600;
    m.sampling.seed = 1;
    return m;
}

} // namespace hpz::fixtures

#endif
