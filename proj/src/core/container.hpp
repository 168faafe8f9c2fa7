#ifndef NOTCHSCAN_CONTAINER_HPP
#define NOTCHSCAN_CONTAINER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/forward.hpp"

namespace notchscan {

/// Self-describing measurement file: a text header followed by a little-endian
/// 64-bit float payload in (component, x, y, time) order.
struct MeasurementContainer {
    int n_components = 2;
    int n_x = 0;
    int n_y = 1;
    int n_t = 0;
    double dt = 0.0;
    double t0 = 0.0;
    std::vector<double> xs;        ///< measurement x-coordinates, strictly increasing
    std::vector<double> geometry;  ///< x_min x_max thickness sensor_lo sensor_hi notch_width
    std::string note;
    std::vector<double> payload;   ///< length n_components * n_x * n_y * n_t

    std::size_t expected_payload() const {
        return std::size_t(n_components) * n_x * n_y * n_t;
    }
};

void write_container(const std::string& path, const MeasurementContainer& c);

/// Parses and validates the file without any signal processing.
MeasurementContainer read_raw_container(const std::string& path);

/// Loads a container and reduces it to the normalized (2, n_x, 1, n_t)
/// measurement array: mean over y, then envelope normalization.
MeasurementSet read_container(const std::string& path);

/// Synthetic stand-in for the experiment: forward model at elevated
/// discretization (p = 8, doubled notch-band density), excitation-weighted
/// transfer pair (s_hat, 0.3 s_hat), seeded additive white Gaussian noise at
/// the given RMS fraction of the peak envelope, then normalization.
MeasurementContainer synth_measurement(const NotchParams& q_true, const ModelConfig& cfg,
                                       double noise_rms_fraction, std::uint64_t seed,
                                       const TimeGrid& grid = {782, 0.2e-6, 0.0});

}  // namespace notchscan

#endif
