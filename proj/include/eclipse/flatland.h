#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eclipse::flatland {

// 1D study: a unit circle with albedo-1 Lambertian shading lit by a circular
// environment, shadowed by arc occluders at radius r. Everything is
// discretized on uniform angle grids.
struct FlatlandConfig {
    int surfaceSamples = 512;   // N, per observation
    int lightSamples = 512;     // M
    int observations = 1;       // T, occluder centers uniform over [0, 2pi)
    double occluderWidth = 0.7; // radians
    double occluderRadius = 10.0;
    bool occluded = true;       // false = no-occlusion baseline
};

// Ray parameter to the radius-r circle from the unit circle point at angle
// lambda toward direction angle phi (delta = lambda - phi).
double shellDistance(double delta, double r);

// Angle of the point where the ray (lambda -> phi direction) crosses the
// radius-r circle.
double shellAngle(double lambda, double phi, double r);

// 1 when the ray escapes (not blocked by the arc at thetaT), 0 when blocked.
double flatMask(double lambda, double phi, double thetaT, double occluderWidth, double r);

// Stacked illumination-to-image matrix: block t has rows
// A[i, j] = mask(lambda_i, phi_j; theta_t) * max(cos(lambda_i - phi_j), 0) * (2pi / M).
Eigen::MatrixXd assembleA(const FlatlandConfig& cfg);

// Per-frame mask-to-image matrix for fixed illumination ell:
// B = C * diag(ell), with C the clamped-cosine convolution matrix.
Eigen::MatrixXd assembleC(int n);
Eigen::MatrixXd assembleB(int n, const Eigen::VectorXd& ell);

// Illumination spectra for the diagonalization study: amplitude
// (1+k)^(-a) with seeded random phases, DC amplitude 1.
Eigen::VectorXd spectrumIllumination(int n, double a, uint64_t seed);

// Descending singular values, divided by the largest.
Eigen::VectorXd singularSpectrum(const Eigen::MatrixXd& A);

struct SpectrumByFrequency {
    // gain[f]: smallest singular value of A restricted to the cos/sin
    // subspace of frequency f, normalized so the maximum over f is 1.
    std::vector<double> gain;
    // assigned[k]: DFT bin holding the peak energy of right singular vector
    // k, paired with its normalized singular value.
    std::vector<std::pair<int, double>> assigned;
};
SpectrumByFrequency spectrumByFrequency(const Eigen::MatrixXd& A, int lightSamples);

// Unitary-DFT conjugation report: F X F^H.
struct DiagonalizationReport {
    Eigen::MatrixXcd transformed;
    double offDiagonalEnergyFraction = 0;
    // Rows whose diagonal entry ties the row maximum within a relative
    // tolerance of 1e-12 of the global maximum (exact-arithmetic zero rows
    // tie trivially).
    int rowsDiagonalMax = 0;
    int rows = 0;
};
DiagonalizationReport fourierDiagonalization(const Eigen::MatrixXd& X);

// CSV/PFM emitters for the study outputs.
void writeSpectrumCsv(const std::string& path,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& spectra);
void writeGainCsv(const std::string& path,
                  const std::vector<std::pair<std::string, std::vector<double>>>& gains);
void writeRowProfileCsv(const std::string& path, const Eigen::MatrixXcd& transformed,
                        const std::vector<int>& rows);
void writeMatrixPfm(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace eclipse::flatland
