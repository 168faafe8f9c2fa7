#ifndef NOTCHSCAN_SIGNAL_HPP
#define NOTCHSCAN_SIGNAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace notchscan {

using Complex = std::complex<double>;

/// Uniform time axis. The derived angular frequency step is 2*pi/(n*dt).
struct TimeGrid {
    int n_samples = 0;
    double dt = 0.0;
    double t0 = 0.0;

    bool valid() const { return n_samples >= 2 && dt > 0.0; }
    double domega() const { return 2.0 * M_PI / (n_samples * dt); }
    double time(int i) const { return t0 + i * dt; }
    Eigen::VectorXd times() const;
};

/// Complex angular frequencies omega_l = l*domega - i*zeta of the exponential
/// window method, plus the index range of the relevant band.
struct FrequencyGrid {
    int n_samples = 0;
    double domega = 0.0;
    double zeta = 0.0;
    int band_lo = 0;  ///< first band index (inclusive)
    int band_hi = 0;  ///< last band index (inclusive)

    Complex omega(int l) const { return {l * domega, -zeta}; }
    int band_size() const { return band_hi - band_lo + 1; }
};

/// zeta = 0.5*domega and band index selection for [f_min, f_max] in Hz.
/// Throws if the band contains no frequency bin.
FrequencyGrid make_frequency_grid(const TimeGrid& grid, double f_min, double f_max);

struct ExcitationConfig {
    double f_c = 500e3;      ///< center frequency, Hz
    double t_shift = 10e-6;  ///< pulse delay, s
};

/// Sinusoidal Gaussian pulse sin(2 pi f_c t) exp(-0.5 (t - t_shift)^2 f_c^2).
Eigen::VectorXd excitation_signal(const TimeGrid& grid, const ExcitationConfig& cfg);

/// 4D signal array (component, x, y, time) stored row-major with time last.
struct Array4 {
    int nc = 0, nx = 0, ny = 0, nt = 0;
    Eigen::VectorXd data;

    Array4() = default;
    Array4(int c, int x, int y, int t)
        : nc(c), nx(x), ny(y), nt(t), data(Eigen::VectorXd::Zero(std::ptrdiff_t(c) * x * y * t)) {}

    std::ptrdiff_t index(int c, int x, int y, int t) const {
        return ((std::ptrdiff_t(c) * nx + x) * ny + y) * nt + t;
    }
    double& at(int c, int x, int y, int t) { return data(index(c, x, y, t)); }
    double at(int c, int x, int y, int t) const { return data(index(c, x, y, t)); }
    int n_traces() const { return nc * nx * ny; }

    /// View as (traces x nt) matrix; trace index = (c*nx + x)*ny + y.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> traces() const {
        return {data.data(), n_traces(), nt};
    }
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> traces() {
        return {data.data(), n_traces(), nt};
    }
};

using TraceMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CTraceMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Discrete Laplace transform: FFT of the exponentially windowed rows.
CTraceMatrix dlt(const TraceMatrix& x, const TimeGrid& grid, double zeta);
CTraceMatrix dlt(const CTraceMatrix& x, const TimeGrid& grid, double zeta);

/// Inverse discrete Laplace transform: inverse FFT, then exp(+zeta t) window.
CTraceMatrix idlt(const CTraceMatrix& X, const TimeGrid& grid, double zeta);

/// Analytic signal per row (FFT Hilbert method).
CTraceMatrix analytic_signal(const TraceMatrix& x);

/// Magnitude of the analytic signal per row.
TraceMatrix envelope_t(const TraceMatrix& x);

/// Arithmetic mean over the y axis; output has ny = 1.
Array4 mean_y(const Array4& v);

/// Normalize so that the maximum of the envelope over all traces is 1.
/// Throws on an (effectively) all-zero array.
Array4 nrm(const Array4& a);

/// Envelope then flattening in (component, x, time) order; requires ny = 1.
Eigen::VectorXd vec_env(const Array4& v);

/// Spread the conjugate-symmetric partner bins so that the inverse transform
/// of a band-limited spectrum is real: bin n-l = conj(bin l) for l in
/// [band_lo, band_hi]. Bins 0 and n/2 are left untouched.
void conjugate_symmetrize(CTraceMatrix& spectra, int band_lo, int band_hi);

}  // namespace notchscan

#endif
