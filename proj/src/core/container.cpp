#include "core/container.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "core/mesh.hpp"

namespace notchscan {

namespace {

constexpr const char* kMagic = "NOTCHSCAN-MEASUREMENT v1";

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void validate_header(const MeasurementContainer& c) {
    if (c.n_components != 2)
        throw std::runtime_error("container: expected 2 components, got " +
                                 std::to_string(c.n_components));
    if (c.n_x < 1 || c.n_y < 1 || c.n_t < 2 || c.dt <= 0.0)
        throw std::runtime_error("container: invalid grid declaration");
    if (static_cast<int>(c.xs.size()) != c.n_x)
        throw std::runtime_error("container: xs count does not match nx");
    for (std::size_t i = 1; i < c.xs.size(); ++i)
        if (!(c.xs[i] > c.xs[i - 1]))
            throw std::runtime_error("container: xs must be strictly increasing");
    if (c.geometry.size() != 6)
        throw std::runtime_error("container: geometry must hold 6 values");
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Box-Muller on the portable uniform, so payloads are identical across
/// standard library implementations.
double gaussian(std::mt19937_64& rng) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    const double v = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

}  // namespace

void write_container(const std::string& path, const MeasurementContainer& c) {
    validate_header(c);
    if (c.payload.size() != c.expected_payload())
        throw std::runtime_error("container: payload length mismatch on write");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("container: cannot open " + path + " for writing");
    f << kMagic << "\n";
    f << "components " << c.n_components << "\n";
    f << "nx " << c.n_x << "\n";
    f << "ny " << c.n_y << "\n";
    f << "nt " << c.n_t << "\n";
    f << "dt " << fmt(c.dt) << "\n";
    f << "t0 " << fmt(c.t0) << "\n";
    f << "xs";
    for (double x : c.xs) f << " " << fmt(x);
    f << "\n";
    f << "geometry";
    for (double g : c.geometry) f << " " << fmt(g);
    f << "\n";
    f << "note " << c.note << "\n";
    f << "data\n";
    f.write(reinterpret_cast<const char*>(c.payload.data()),
            static_cast<std::streamsize>(c.payload.size() * sizeof(double)));
    if (!f) throw std::runtime_error("container: write failed for " + path);
}

MeasurementContainer read_raw_container(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("container: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != kMagic)
        throw std::runtime_error("container: unsupported schema in " + path +
                                 " (expected '" + kMagic + "')");
    MeasurementContainer c;
    c.xs.clear();
    c.geometry.clear();
    bool saw_data = false;
    while (std::getline(f, line)) {
        if (line == "data") {
            saw_data = true;
            break;
        }
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "components")
            ss >> c.n_components;
        else if (key == "nx")
            ss >> c.n_x;
        else if (key == "ny")
            ss >> c.n_y;
        else if (key == "nt")
            ss >> c.n_t;
        else if (key == "dt")
            ss >> c.dt;
        else if (key == "t0")
            ss >> c.t0;
        else if (key == "xs") {
            double v;
            while (ss >> v) c.xs.push_back(v);
            ss.clear();
        } else if (key == "geometry") {
            double v;
            while (ss >> v) c.geometry.push_back(v);
            ss.clear();
        } else if (key == "note") {
            const std::size_t pos = line.find(' ');
            c.note = pos == std::string::npos ? "" : line.substr(pos + 1);
        } else {
            throw std::runtime_error("container: unknown header field '" + key + "'");
        }
        if (ss.fail() && key != "note")
            throw std::runtime_error("container: malformed header line '" + line + "'");
    }
    if (!saw_data) throw std::runtime_error("container: missing data section");
    validate_header(c);

    c.payload.resize(c.expected_payload());
    f.read(reinterpret_cast<char*>(c.payload.data()),
           static_cast<std::streamsize>(c.payload.size() * sizeof(double)));
    if (static_cast<std::size_t>(f.gcount()) != c.payload.size() * sizeof(double))
        throw std::runtime_error("container: payload length mismatch (truncated file)");
    char extra;
    if (f.read(&extra, 1))
        throw std::runtime_error("container: payload length mismatch (trailing bytes)");
    for (double v : c.payload)
        if (!std::isfinite(v))
            throw std::runtime_error("container: payload contains non-finite values");
    return c;
}

MeasurementSet read_container(const std::string& path) {
    const MeasurementContainer c = read_raw_container(path);
    Array4 raw(c.n_components, c.n_x, c.n_y, c.n_t);
    for (std::size_t i = 0; i < c.payload.size(); ++i)
        raw.data(static_cast<std::ptrdiff_t>(i)) = c.payload[i];
    return {TimeGrid{c.n_t, c.dt, c.t0}, nrm(mean_y(raw))};
}

MeasurementContainer synth_measurement(const NotchParams& q_true, const ModelConfig& cfg,
                                       double noise_rms_fraction, std::uint64_t seed,
                                       const TimeGrid& grid) {
    if (!ParameterBox{}.contains(q_true))
        throw std::invalid_argument("synth_measurement: q outside the parameter box");
    if (noise_rms_fraction < 0.0)
        throw std::invalid_argument("synth_measurement: negative noise level");

    // Elevated discretization so the inversion model never sees its own data.
    ModelConfig data_cfg = cfg;
    data_cfg.mesh.degree = 8;
    data_cfg.mesh.cf_order = 8;
    data_cfg.mesh.band_top = 2;
    data_cfg.mesh.band_bottom = 2;
    data_cfg.mesh.band_divider = 2;

    const ForwardContext ctx = make_forward_context(data_cfg, grid);
    const std::vector<Eigen::MatrixXcd> V = unit_responses(ctx, q_true);

    const Eigen::VectorXd s = excitation_signal(grid, ExcitationConfig{});
    const TraceMatrix srow = s.transpose();
    const CTraceMatrix shat = dlt(srow, grid, ctx.fgrid.zeta);
    CTraceMatrix spec = CTraceMatrix::Zero(V[0].rows(), grid.n_samples);
    for (int l = 0; l < ctx.fgrid.band_size(); ++l) {
        const int bin = ctx.fgrid.band_lo + l;
        spec.col(bin) = V[l] * (shat(0, bin) * Eigen::Vector2cd(1.0, 0.3));
    }
    conjugate_symmetrize(spec, ctx.fgrid.band_lo, ctx.fgrid.band_hi);
    const TraceMatrix tr = idlt(spec, grid, ctx.fgrid.zeta).real();

    const int nx = static_cast<int>(cfg.geom.measurement_xs.size());
    Array4 arr(2, nx, 1, grid.n_samples);
    arr.traces() = tr;

    if (noise_rms_fraction > 0.0) {
        const double sigma = noise_rms_fraction * envelope_t(tr).maxCoeff();
        std::mt19937_64 rng(seed);
        for (Eigen::Index i = 0; i < arr.data.size(); ++i)
            arr.data(i) += sigma * gaussian(rng);
    }
    arr = nrm(arr);

    MeasurementContainer c;
    c.n_x = nx;
    c.n_y = 1;
    c.n_t = grid.n_samples;
    c.dt = grid.dt;
    c.t0 = grid.t0;
    c.xs = cfg.geom.measurement_xs;
    c.geometry = {cfg.geom.x_min,    cfg.geom.x_max,    cfg.geom.thickness,
                  cfg.geom.sensor_lo, cfg.geom.sensor_hi, cfg.geom.notch_width};
    c.note = "synthetic guided-wave measurement";
    c.payload.assign(arr.data.data(), arr.data.data() + arr.data.size());
    return c;
}

}  // namespace notchscan
