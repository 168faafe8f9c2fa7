#ifndef NOTCHSCAN_FORWARD_HPP
#define NOTCHSCAN_FORWARD_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "core/model.hpp"
#include "core/signal.hpp"

namespace notchscan {

/// Normalized measurement: (2, n_x, 1, n_t) velocity traces on a time grid.
struct MeasurementSet {
    TimeGrid grid;
    Array4 v;
};

struct ModelConfig {
    Material material;
    PlateGeometry geom = PlateGeometry::standard();
    MeshConfig mesh;
    double f_min = 10e3;  ///< Hz, relevant band
    double f_max = 1.5e6;
    double beta = 1e-9;  ///< transfer-fit regularization, relative to tr(V^H V)/2
};

/// Everything the forward operator needs that does not depend on q: the
/// measurement spectrum, the per-frequency waveguide modes, and the region at
/// and left of the last measurement line condensed onto that interface (it
/// contains the sensor, the loads, and all measurement points, and never
/// changes with the notch parameters).
struct ForwardContext {
    ModelConfig cfg;
    TimeGrid grid;
    FrequencyGrid fgrid;
    Eigen::VectorXd y_meas;       ///< vec_env of the measurement (once attached)
    Eigen::MatrixXcd vhat_meas;   ///< n_meas x band_size measurement spectrum
    CrossSectionMatrices cs;
    std::vector<WaveguideModes> modes;  ///< per band frequency

    double x_interface = 0.0;
    int n_interface = 0;  ///< interface dofs (one cross-section line)

    /// Per band frequency: condensed left-region data. u_meas = r0_col + R u_b
    /// per traction column, where u_b are the interface displacements.
    struct LeftBlock {
        Eigen::MatrixXcd S_cond, f_cond, r0, R;
    };
    std::vector<LeftBlock> left;

    bool has_measurement() const { return vhat_meas.size() > 0; }
};

/// Builds every q-independent cache (waveguide modes, condensed left region)
/// for the given time grid; no measurement yet.
ForwardContext make_forward_context(const ModelConfig& cfg, const TimeGrid& grid);

/// Stores the measurement envelope vector and band spectrum into the context.
void attach_measurement(ForwardContext& ctx, const MeasurementSet& meas);

ForwardContext make_forward_context(const ModelConfig& cfg, const MeasurementSet& meas);

/// Raw unit-traction velocity responses V_hat (n_meas x 2), one per band
/// frequency, without the transfer fit; used by synthetic-data generation.
std::vector<Eigen::MatrixXcd> unit_responses(const ForwardContext& ctx, const NotchParams& q);

/// Regularized least-squares transfer fit h = (V^H V + beta I)^-1 V^H v.
Eigen::Vector2cd transfer_fit(const Eigen::MatrixXcd& V, const Eigen::VectorXcd& v,
                              double beta);

struct ForwardOutput {
    Eigen::VectorXd y;         ///< vec_env of the simulated traces
    Array4 v_sim;              ///< (2, n_x, 1, n_t) time-domain traces
    Eigen::MatrixXcd h;        ///< 2 x band_size fitted transfer functions
    Eigen::MatrixXd jacobian;  ///< N_meas x 2 (empty unless requested)
};

ForwardOutput forward(const ForwardContext& ctx, const NotchParams& q, bool with_jacobian);

/// Squared Euclidean norm of the envelope residual ||F(q) - y_meas||^2.
double objective(const ForwardContext& ctx, const NotchParams& q);

}  // namespace notchscan

#endif
