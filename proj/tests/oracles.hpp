#pragma once

// Reference values frozen from independent computations:
//  - Bessel zeros and Robin disk eigenvalues from a 40-digit radial shooting /
//    root-finding run (mpmath), cross-checked against the series expansions.
//  - Geometric quantities from closed forms or adaptive quadrature at 30+ digits.

namespace oracles {

// First zero of J0 and derived disk quantities
inline constexpr double kJ01 = 2.4048255576957727686216318793265;
inline constexpr double kJ01Sq = 5.7831859629467845211759957584558;       // Dirichlet lambda1, unit disk
inline constexpr double kJ11Sq = 14.681970642123893257219777768630;       // Dirichlet lambda2, unit disk
inline constexpr double kDiskDirichletDilationRate = -11.566371925893569; // d/dr lambda_D(B_r) at r=1 = -2 j01^2
inline constexpr double kDiskDirichletSecondDeriv = 34.699115777680707;   // d2/dr2 lambda_D(B_r) at r=1 = 6 j01^2

// Robin disk of radius 1: lowest root of sqrt(l) J0'(sqrt(l)) + beta J0(sqrt(l)) = 0
inline constexpr double kRobinDiskBetaHalf = 0.88504925399430685969100398968;
inline constexpr double kRobinDiskBetaOne = 1.5769927308086067248703836769;
inline constexpr double kRobinDiskBetaTen = 4.7502054148719532480383829314;
inline constexpr double kRobinDiskBetaHuge = 5.7820294414324929174282654017;  // beta = 1e4
inline constexpr double kRobinDiskBetaOneLambda2 = 5.7831859629467845211759957585;  // = j01^2 exactly

// Negative Robin parameter, unit disk: root of s I1(s) + beta I0(s) = 0, lambda = -s^2
inline constexpr double kRobinDiskBetaMinusHalf = -1.1356864818759116819766363955;
inline constexpr double kRobinDiskBetaMinusOne = -2.5865628591780898473741749389;
inline constexpr double kRobinDiskBetaMinusTwo = -6.6791214262572075199436984707;

// d/dr lambda_R(B_r) at r=1 for beta=1 (shooting + finite differences, 12 digits)
inline constexpr double kRobinDiskDilationRateBetaOne = -1.93008388676583;

// Squares: lambda_D([0,1]^2) = 2 pi^2, lambda_D([-1,1]^2) = pi^2 / 2
inline constexpr double kSquareSide1Dirichlet = 19.739208802178717237668981999752;
inline constexpr double kSquareSide2Dirichlet = 4.9348022005446793094172454999381;

// Geometry
inline constexpr double kEllipse21Perimeter = 9.6884482205476761984285031964;   // a=2, b=1
inline constexpr double kFlowerCurvatureAt0 = 1.6780045351473922902494331066;   // eta = 1 + 0.05 cos(4 theta), theta=0
inline constexpr double kPi = 3.1415926535897932384626433832795;

}  // namespace oracles
