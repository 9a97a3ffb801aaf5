#include "eclipse/flatland.h"

#include <cmath>
#include <fstream>

#include <Eigen/SVD>

#include "eclipse/error.h"
#include "eclipse/math.h"
#include "eclipse/pfm.h"
#include "eclipse/rng.h"

namespace eclipse::flatland {

double shellDistance(double delta, double r) {
    const double c = std::cos(delta);
    return std::sqrt(c * c + r * r - 1.0) - c;
}

double shellAngle(double lambda, double phi, double r) {
    const double t = shellDistance(lambda - phi, r);
    const double y = std::sin(lambda) + t * std::sin(phi);
    const double x = std::cos(lambda) + t * std::cos(phi);
    return std::atan2(y, x);
}

namespace {
// Wrap to (-pi, pi].
double wrapAngle(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a <= 0) a += kTwoPi;
    return a - kPi;
}
}  // namespace

double flatMask(double lambda, double phi, double thetaT, double occluderWidth, double r) {
    ECLIPSE_REQUIRE(r > 1.0, "flatMask: occluder must sit outside the unit circle");
    const double psi = shellAngle(lambda, phi, r);
    return std::abs(wrapAngle(psi - thetaT)) < occluderWidth / 2 ? 0.0 : 1.0;
}

Eigen::MatrixXd assembleA(const FlatlandConfig& cfg) {
    const int N = cfg.surfaceSamples;
    const int M = cfg.lightSamples;
    const int T = cfg.observations;
    const double scale = kTwoPi / M;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(N) * T, M);
    for (int t = 0; t < T; ++t) {
        const double thetaT = kTwoPi * t / T;
        for (int i = 0; i < N; ++i) {
            const double lambda = kTwoPi * i / N;
            for (int j = 0; j < M; ++j) {
                const double phi = kTwoPi * j / M;
                const double cosTerm = clampPositive(std::cos(lambda - phi));
                double m = 1.0;
                if (cfg.occluded && cosTerm > 0)
                    m = flatMask(lambda, phi, thetaT, cfg.occluderWidth, cfg.occluderRadius);
                A(static_cast<Eigen::Index>(t) * N + i, j) = m * cosTerm * scale;
            }
        }
    }
    return A;
}

Eigen::MatrixXd assembleC(int n) {
    const double scale = kTwoPi / n;
    Eigen::MatrixXd C(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            C(i, j) = clampPositive(std::cos(kTwoPi * (i - j) / n)) * scale;
    return C;
}

Eigen::MatrixXd assembleB(int n, const Eigen::VectorXd& ell) {
    ECLIPSE_REQUIRE(ell.size() == n, "assembleB: illumination size mismatch");
    return assembleC(n) * ell.asDiagonal();
}

Eigen::VectorXd spectrumIllumination(int n, double a, uint64_t seed) {
    RandomStream rs(seed, 0, 0, 0, StreamPurpose::Init);
    Eigen::VectorXd ell = Eigen::VectorXd::Ones(n);
    for (int k = 1; k <= n / 2; ++k) {
        const double amp = std::pow(1.0 + k, -a);
        const double xi = 2.0 * rs.next() - 1.0;
        const double eta = 2.0 * rs.next() - 1.0;
        for (int j = 0; j < n; ++j) {
            const double ang = kTwoPi * k * j / n;
            ell[j] += amp * (xi * std::cos(ang) + eta * std::sin(ang));
        }
    }
    return ell;
}

Eigen::VectorXd singularSpectrum(const Eigen::MatrixXd& A) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    Eigen::VectorXd s = svd.singularValues();
    ECLIPSE_REQUIRE(s.size() > 0 && s[0] > 0, "singularSpectrum: degenerate matrix");
    return s / s[0];
}

SpectrumByFrequency spectrumByFrequency(const Eigen::MatrixXd& A, int lightSamples) {
    const int M = lightSamples;
    SpectrumByFrequency out;

    // Worst-case gain over each frequency's cos/sin subspace.
    out.gain.assign(M / 2 + 1, 0.0);
    Eigen::VectorXd phases(M);
    for (int j = 0; j < M; ++j) phases[j] = kTwoPi * j / M;
    double maxGain = 0;
    for (int f = 0; f <= M / 2; ++f) {
        Eigen::MatrixXd basis;
        if (f == 0) {
            basis = Eigen::MatrixXd::Constant(M, 1, 1.0 / std::sqrt(static_cast<double>(M)));
        } else {
            const int dims = f == M / 2 ? 1 : 2;
            basis.resize(M, dims);
            Eigen::VectorXd c(M), s(M);
            for (int j = 0; j < M; ++j) {
                c[j] = std::cos(f * phases[j]);
                s[j] = std::sin(f * phases[j]);
            }
            basis.col(0) = c / c.norm();
            if (dims == 2) basis.col(1) = s / s.norm();
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A * basis);
        out.gain[f] = svd.singularValues().minCoeff();
        maxGain = std::max(maxGain, out.gain[f]);
    }
    ECLIPSE_REQUIRE(maxGain > 0, "spectrumByFrequency: zero gain");
    for (double& g : out.gain) g /= maxGain;

    // Right-singular-vector bin assignment report.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    const Eigen::MatrixXd V = svd.matrixV();
    const double smax = s[0];
    for (int k = 0; k < V.cols(); ++k) {
        // Energy per DFT bin of column k.
        int bestBin = 0;
        double bestEnergy = -1;
        for (int f = 0; f <= M / 2; ++f) {
            double re = 0, im = 0;
            for (int j = 0; j < M; ++j) {
                re += V(j, k) * std::cos(f * phases[j]);
                im -= V(j, k) * std::sin(f * phases[j]);
            }
            double e = re * re + im * im;
            if (f != 0 && f != M / 2) e *= 2;  // mirror bin
            if (e > bestEnergy) {
                bestEnergy = e;
                bestBin = f;
            }
        }
        out.assigned.push_back({bestBin, s[k] / smax});
    }
    return out;
}

DiagonalizationReport fourierDiagonalization(const Eigen::MatrixXd& X) {
    ECLIPSE_REQUIRE(X.rows() == X.cols(), "fourierDiagonalization: square input required");
    const int n = static_cast<int>(X.rows());
    Eigen::MatrixXcd F(n, n);
    const std::complex<double> I(0, 1);
    const double invSqrtN = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            F(i, j) = std::exp(-I * (kTwoPi * i * j / n)) * invSqrtN;

    DiagonalizationReport rep;
    rep.transformed = F * X.cast<std::complex<double>>() * F.adjoint();
    rep.rows = n;

    double total = 0, offdiag = 0, gmax = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double e = std::norm(rep.transformed(i, j));
            total += e;
            if (i != j) offdiag += e;
            gmax = std::max(gmax, std::abs(rep.transformed(i, j)));
        }
    rep.offDiagonalEnergyFraction = total > 0 ? offdiag / total : 0.0;

    const double tol = 1e-12 * gmax;
    for (int i = 0; i < n; ++i) {
        double rowMax = 0;
        for (int j = 0; j < n; ++j) rowMax = std::max(rowMax, std::abs(rep.transformed(i, j)));
        if (std::abs(rep.transformed(i, i)) >= rowMax - tol) ++rep.rowsDiagonalMax;
    }
    return rep;
}

void writeSpectrumCsv(const std::string& path,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& spectra) {
    std::ofstream f(path);
    if (!f) throw RuntimeError("flatland: cannot open " + path);
    f << "scenario,rank,normalized_value\n";
    f.precision(15);
    for (const auto& [name, s] : spectra)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            f << name << "," << i << "," << s[i] << "\n";
}

void writeGainCsv(const std::string& path,
                  const std::vector<std::pair<std::string, std::vector<double>>>& gains) {
    std::ofstream f(path);
    if (!f) throw RuntimeError("flatland: cannot open " + path);
    f << "scenario,frequency,normalized_gain\n";
    f.precision(15);
    for (const auto& [name, g] : gains)
        for (size_t i = 0; i < g.size(); ++i)
            f << name << "," << i << "," << g[i] << "\n";
}

void writeRowProfileCsv(const std::string& path, const Eigen::MatrixXcd& transformed,
                        const std::vector<int>& rows) {
    std::ofstream f(path);
    if (!f) throw RuntimeError("flatland: cannot open " + path);
    f << "row,column,magnitude\n";
    f.precision(15);
    for (int r : rows)
        for (Eigen::Index j = 0; j < transformed.cols(); ++j)
            f << r << "," << j << "," << std::abs(transformed(r, j)) << "\n";
}

void writeMatrixPfm(const std::string& path, const Eigen::MatrixXd& m) {
    Image img(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j) {
            const double v = m(i, j);
            img.at(i, j) = Rgbd(v, v, v);
        }
    writePfm(path, img);
}

}  // namespace eclipse::flatland
