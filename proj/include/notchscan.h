#ifndef NOTCHSCAN_H
#define NOTCHSCAN_H

/* C interface to the guided-wave notch reconstruction core. All lengths are
 * in meters, times in seconds, frequencies in Hz. Functions return NS_OK on
 * success; on any other status ns_last_error() describes the failure. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ns_status {
    NS_OK = 0,
    NS_ERR_INVALID_ARGUMENT = 1,
    NS_ERR_IO = 2,
    NS_ERR_NUMERIC = 3,
    NS_ERR_INTERNAL = 4
} ns_status;

/* Thread-local message of the most recent failure. */
const char* ns_last_error(void);

/* Opaque forward-model handle: plate, discretization, frequency caches, and
 * an attached measurement. */
typedef struct ns_model ns_model;

/* Load a NOTCHSCAN-MEASUREMENT container and build the inversion model. */
ns_status ns_model_from_measurement(const char* path, ns_model** out);

/* Generate a synthetic measurement at the true notch (q1, q2) with additive
 * white Gaussian noise (RMS fraction of the peak envelope) and build the
 * inversion model on it. The data are produced at elevated discretization. */
ns_status ns_model_synthetic(double q1, double q2, double noise_rms_fraction,
                             unsigned long long seed, ns_model** out);

void ns_model_free(ns_model* m);

/* Measurement array shape: components (2), measurement points, samples. */
ns_status ns_model_shape(const ns_model* m, int* nc, int* nx, int* nt, double* dt,
                         double* t0);

/* Measurement x-coordinates; xs must hold nx doubles. */
ns_status ns_measurement_xs(const ns_model* m, double* xs);

/* Squared envelope misfit of the simulated response at (q1, q2). */
ns_status ns_objective(const ns_model* m, double q1, double q2, double* value);

/* Simulated time traces at (q1, q2), row-major (component*nx + point, time),
 * out must hold nc*nx*nt doubles. */
ns_status ns_forward_traces(const ns_model* m, double q1, double q2, double* out);

typedef struct ns_recon_result {
    double q1, q2;                /* reconstructed notch position and depth */
    int iterations;               /* Gauss-Newton iterations used */
    int converged;                /* 1 if the step-norm criterion was met */
    int regularization_fallbacks; /* steps that needed the singular fallback */
} ns_recon_result;

/* Multistart (uniform over box = {q1_lo, q1_hi, q2_lo, q2_hi}) followed by
 * the iteratively regularized Gauss-Newton iteration. alpha0 <= 0 selects the
 * default alpha_n = 0; otherwise alpha_n = alpha0 * (2/3)^n. The trajectory
 * buffer (rows of q1, q2, objective) may be NULL; traj_len receives the
 * number of rows written. */
ns_status ns_reconstruct(const ns_model* m, const double box[4], int starts,
                         unsigned long long seed, double alpha0, double eps, int max_iter,
                         ns_recon_result* out, double* trajectory, int traj_capacity,
                         int* traj_len);

/* Propagating Lamb modes of the undamaged plate at the given frequencies.
 * Each row holds {frequency_hz, family (0 = S, 1 = A), order, wavelength_m,
 * re_k, im_k}; n_rows receives the count (at most capacity_rows rows are
 * written). */
ns_status ns_dispersion(const double* freqs_hz, int n_freqs, double* out,
                        int capacity_rows, int* n_rows);

/* Write a synthetic measurement container to path. */
ns_status ns_synth_container(double q1, double q2, double noise_rms_fraction,
                             unsigned long long seed, const char* path);

/* Built-in verification suite; returns 0 on pass and fills log (truncated to
 * log_capacity) with one line per check. */
int ns_selftest(char* log, int log_capacity);

#ifdef __cplusplus
}
#endif

#endif
