#include "core/signal.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace notchscan {

namespace {

// FFTW plans cached per length. Plan creation is not thread-safe; execution
// via fftw_execute_dft on caller-owned buffers is.
class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    void forward(const Complex* in, Complex* out, int n) { run(in, out, n, FFTW_FORWARD); }
    void backward(const Complex* in, Complex* out, int n) { run(in, out, n, FFTW_BACKWARD); }

  private:
    struct Pair {
        fftw_plan fwd = nullptr, bwd = nullptr;
    };

    Pair& plans(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        std::vector<Complex> a(n), b(n);
        Pair p;
        p.fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
        p.bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
        return cache_.emplace(n, p).first->second;
    }

    void run(const Complex* in, Complex* out, int n, int sign) {
        Pair& p = plans(n);
        std::vector<Complex> tmp(in, in + n);
        fftw_execute_dft(sign == FFTW_FORWARD ? p.fwd : p.bwd,
                         reinterpret_cast<fftw_complex*>(tmp.data()),
                         reinterpret_cast<fftw_complex*>(out));
    }

    std::mutex mutex_;
    std::map<int, Pair> cache_;
};

using ComplexL = std::complex<long double>;

// Long-double twin of FftPlans for the exponentially windowed transforms.
// The window exp(zeta*T) amplifies absolute FFT roundoff by up to e^{4 pi}
// for zeta = 2*domega; the extra mantissa bits keep the round trip below
// 1e-12 in double precision.
class FftPlansL {
  public:
    static FftPlansL& instance() {
        static FftPlansL p;
        return p;
    }

    void forward(const ComplexL* in, ComplexL* out, int n) { run(in, out, n, FFTW_FORWARD); }
    void backward(const ComplexL* in, ComplexL* out, int n) { run(in, out, n, FFTW_BACKWARD); }

  private:
    struct Pair {
        fftwl_plan fwd = nullptr, bwd = nullptr;
    };

    Pair& plans(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        std::vector<ComplexL> a(n), b(n);
        Pair p;
        p.fwd = fftwl_plan_dft_1d(n, reinterpret_cast<fftwl_complex*>(a.data()),
                                  reinterpret_cast<fftwl_complex*>(b.data()), FFTW_FORWARD,
                                  FFTW_ESTIMATE);
        p.bwd = fftwl_plan_dft_1d(n, reinterpret_cast<fftwl_complex*>(a.data()),
                                  reinterpret_cast<fftwl_complex*>(b.data()), FFTW_BACKWARD,
                                  FFTW_ESTIMATE);
        return cache_.emplace(n, p).first->second;
    }

    void run(const ComplexL* in, ComplexL* out, int n, int sign) {
        Pair& p = plans(n);
        std::vector<ComplexL> tmp(in, in + n);
        fftwl_execute_dft(sign == FFTW_FORWARD ? p.fwd : p.bwd,
                          reinterpret_cast<fftwl_complex*>(tmp.data()),
                          reinterpret_cast<fftwl_complex*>(out));
    }

    std::mutex mutex_;
    std::map<int, Pair> cache_;
};

}  // namespace

Eigen::VectorXd TimeGrid::times() const {
    Eigen::VectorXd t(n_samples);
    for (int i = 0; i < n_samples; ++i) t(i) = time(i);
    return t;
}

FrequencyGrid make_frequency_grid(const TimeGrid& grid, double f_min, double f_max) {
    if (!grid.valid()) throw std::invalid_argument("make_frequency_grid: invalid time grid");
    FrequencyGrid f;
    f.n_samples = grid.n_samples;
    f.domega = grid.domega();
    f.zeta = 0.5 * f.domega;
    const double df = f.domega / (2.0 * M_PI);
    int lo = static_cast<int>(std::ceil(f_min / df - 1e-12));
    int hi = static_cast<int>(std::floor(f_max / df + 1e-12));
    lo = std::max(lo, 0);
    hi = std::min(hi, grid.n_samples / 2);
    if (lo > hi) throw std::invalid_argument("make_frequency_grid: empty frequency band");
    f.band_lo = lo;
    f.band_hi = hi;
    return f;
}

Eigen::VectorXd excitation_signal(const TimeGrid& grid, const ExcitationConfig& cfg) {
    if (!grid.valid() || cfg.f_c <= 0.0 || cfg.t_shift <= 0.0)
        throw std::invalid_argument("excitation_signal: invalid arguments");
    Eigen::VectorXd s(grid.n_samples);
    for (int i = 0; i < grid.n_samples; ++i) {
        const double t = grid.time(i);
        const double arg = (t - cfg.t_shift) * cfg.f_c;
        s(i) = std::sin(2.0 * M_PI * cfg.f_c * t) * std::exp(-0.5 * arg * arg);
    }
    return s;
}

CTraceMatrix dlt(const CTraceMatrix& x, const TimeGrid& grid, double zeta) {
    if (x.cols() != grid.n_samples) throw std::invalid_argument("dlt: time axis mismatch");
    const int n = grid.n_samples;
    CTraceMatrix out(x.rows(), n);
    std::vector<ComplexL> row(n), spec(n);
    std::vector<long double> win(n);
    for (int i = 0; i < n; ++i)
        win[i] = std::exp(-static_cast<long double>(zeta) * static_cast<long double>(grid.time(i)));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (int i = 0; i < n; ++i) row[i] = ComplexL(x(r, i)) * win[i];
        FftPlansL::instance().forward(row.data(), spec.data(), n);
        for (int i = 0; i < n; ++i)
            out(r, i) = Complex(static_cast<double>(spec[i].real()), static_cast<double>(spec[i].imag()));
    }
    return out;
}

CTraceMatrix dlt(const TraceMatrix& x, const TimeGrid& grid, double zeta) {
    return dlt(CTraceMatrix(x.cast<Complex>()), grid, zeta);
}

CTraceMatrix idlt(const CTraceMatrix& X, const TimeGrid& grid, double zeta) {
    if (X.cols() != grid.n_samples) throw std::invalid_argument("idlt: frequency axis mismatch");
    const int n = grid.n_samples;
    CTraceMatrix out(X.rows(), n);
    std::vector<ComplexL> row(n), sig(n);
    std::vector<long double> win(n);
    for (int i = 0; i < n; ++i)
        win[i] = std::exp(static_cast<long double>(zeta) * static_cast<long double>(grid.time(i))) /
                 static_cast<long double>(n);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (int i = 0; i < n; ++i) row[i] = ComplexL(X(r, i));
        FftPlansL::instance().backward(row.data(), sig.data(), n);
        for (int i = 0; i < n; ++i) {
            const ComplexL v = sig[i] * win[i];
            out(r, i) = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
        }
    }
    return out;
}

CTraceMatrix analytic_signal(const TraceMatrix& x) {
    const int n = static_cast<int>(x.cols());
    CTraceMatrix out(x.rows(), n);
    std::vector<Complex> row(n), spec(n);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (int i = 0; i < n; ++i) row[i] = Complex(x(r, i), 0.0);
        FftPlans::instance().forward(row.data(), spec.data(), n);
        const int half = n / 2;
        for (int i = 1; i < (n + 1) / 2; ++i) spec[i] *= 2.0;
        if (n % 2 == 0)
            for (int i = half + 1; i < n; ++i) spec[i] = 0.0;
        else
            for (int i = half + 1; i < n; ++i) spec[i] = 0.0;
        FftPlans::instance().backward(spec.data(), &out(r, 0), n);
        out.row(r) /= double(n);
    }
    return out;
}

TraceMatrix envelope_t(const TraceMatrix& x) {
    return analytic_signal(x).cwiseAbs();
}

Array4 mean_y(const Array4& v) {
    if (v.ny < 1) throw std::invalid_argument("mean_y: ny must be >= 1");
    Array4 out(v.nc, v.nx, 1, v.nt);
    for (int c = 0; c < v.nc; ++c)
        for (int x = 0; x < v.nx; ++x)
            for (int t = 0; t < v.nt; ++t) {
                double s = 0.0;
                for (int y = 0; y < v.ny; ++y) s += v.at(c, x, y, t);
                out.at(c, x, 0, t) = s / v.ny;
            }
    return out;
}

Array4 nrm(const Array4& a) {
    const double m = envelope_t(a.traces()).maxCoeff();
    if (!(m > 0.0)) throw std::invalid_argument("nrm: degenerate all-zero measurement");
    Array4 out = a;
    out.data /= m;
    return out;
}

Eigen::VectorXd vec_env(const Array4& v) {
    if (v.ny != 1) throw std::invalid_argument("vec_env: expected ny = 1");
    TraceMatrix env = envelope_t(v.traces());
    // Row-major (trace, time) storage already matches (component, x, time).
    return Eigen::Map<const Eigen::VectorXd>(env.data(), env.size());
}

void conjugate_symmetrize(CTraceMatrix& spectra, int band_lo, int band_hi) {
    const int n = static_cast<int>(spectra.cols());
    for (int l = std::max(band_lo, 1); l <= band_hi; ++l) {
        const int m = n - l;
        if (m <= n / 2 || m >= n) continue;
        spectra.col(m) = spectra.col(l).conjugate();
    }
}

}  // namespace notchscan
