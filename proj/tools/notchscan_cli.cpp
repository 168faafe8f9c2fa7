// Command-line front end; talks to the core exclusively through the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "notchscan.h"

namespace {

constexpr double kMm = 1e-3;

[[noreturn]] void die(const std::string& what) {
    std::cerr << "error: " << what << "\n";
    std::exit(1);
}

void check(ns_status s) {
    if (s != NS_OK) die(ns_last_error());
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream f(path);
    if (!f) die("cannot open " + path + " for writing");
    f.precision(17);
    return f;
}

struct ModelHandle {
    ns_model* m = nullptr;
    ~ModelHandle() { ns_model_free(m); }
};

/// Shared measurement source: an explicit container file, or the default
/// synthetic case (true notch at --true-q1/--true-q2, seeded noise).
struct SourceOpts {
    std::string measurement;
    double true_q1_mm = 0.0;
    double true_q2_mm = 0.8;
    double noise = 0.0;
    unsigned long long data_seed = 1;

    void add(CLI::App& app) {
        app.add_option("--measurement", measurement, "measurement container file");
        app.add_option("--true-q1", true_q1_mm, "synthetic notch position, mm")
            ->capture_default_str();
        app.add_option("--true-q2", true_q2_mm, "synthetic notch depth, mm")
            ->capture_default_str();
        app.add_option("--noise", noise, "synthetic noise RMS fraction of peak envelope")
            ->capture_default_str();
        app.add_option("--data-seed", data_seed, "synthetic noise seed")->capture_default_str();
    }

    void open(ModelHandle& h) const {
        if (!measurement.empty())
            check(ns_model_from_measurement(measurement.c_str(), &h.m));
        else
            check(ns_model_synthetic(true_q1_mm * kMm, true_q2_mm * kMm, noise, data_seed,
                                     &h.m));
    }
};

int cmd_dispersion(double fmin, double fmax, int n, const std::string& out_path) {
    if (n < 1 || fmin <= 0.0 || fmax <= fmin) die("need 0 < fmin < fmax and n >= 1");
    std::vector<double> freqs(n);
    for (int i = 0; i < n; ++i)
        freqs[i] = n == 1 ? fmin : fmin + (fmax - fmin) * i / (n - 1);
    std::vector<double> rows(static_cast<std::size_t>(n) * 40 * 6);
    int n_rows = 0;
    check(ns_dispersion(freqs.data(), n, rows.data(), n * 40, &n_rows));
    auto f = open_csv(out_path);
    f << "frequency_hz,mode_label,wavelength_m,re_k,im_k\n";
    for (int i = 0; i < n_rows; ++i) {
        const double* r = &rows[6 * i];
        f << r[0] << "," << (r[1] > 0.5 ? 'A' : 'S') << static_cast<int>(r[2]) << ","
          << r[3] << "," << r[4] << "," << r[5] << "\n";
    }
    return 0;
}

int cmd_forward(const SourceOpts& src, double q1_mm, double q2_mm,
                const std::string& out_path) {
    ModelHandle h;
    src.open(h);
    int nc = 0, nx = 0, nt = 0;
    double dt = 0.0, t0 = 0.0;
    check(ns_model_shape(h.m, &nc, &nx, &nt, &dt, &t0));
    std::vector<double> xs(nx), v(static_cast<std::size_t>(nc) * nx * nt);
    check(ns_measurement_xs(h.m, xs.data()));
    check(ns_forward_traces(h.m, q1_mm * kMm, q2_mm * kMm, v.data()));
    auto f = open_csv(out_path);
    f << "component,x_m,time_s,velocity\n";
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i < nx; ++i)
            for (int t = 0; t < nt; ++t)
                f << c << "," << xs[i] << "," << t0 + t * dt << ","
                  << v[(static_cast<std::size_t>(c) * nx + i) * nt + t] << "\n";
    return 0;
}

int cmd_scan(const SourceOpts& src, const std::vector<double>& box_mm, int n1, int n2,
             const std::string& out_path) {
    if (n1 < 2 || n2 < 2) die("need at least a 2x2 grid");
    ModelHandle h;
    src.open(h);
    auto f = open_csv(out_path);
    f << "q1_mm,q2_mm,objective\n";
    for (int i = 0; i < n1; ++i) {
        const double q1 = box_mm[0] + (box_mm[1] - box_mm[0]) * i / (n1 - 1);
        for (int j = 0; j < n2; ++j) {
            const double q2 = box_mm[2] + (box_mm[3] - box_mm[2]) * j / (n2 - 1);
            double val = 0.0;
            check(ns_objective(h.m, q1 * kMm, q2 * kMm, &val));
            f << q1 << "," << q2 << "," << val << "\n";
        }
    }
    return 0;
}

int cmd_synth(double q1_mm, double q2_mm, double noise, unsigned long long seed,
              const std::string& out_path) {
    check(ns_synth_container(q1_mm * kMm, q2_mm * kMm, noise, seed, out_path.c_str()));
    return 0;
}

int cmd_reconstruct(const SourceOpts& src, const std::vector<double>& box_mm, int starts,
                    unsigned long long seed, double alpha0, double eps,
                    const std::string& out_path, const std::string& traj_path) {
    ModelHandle h;
    src.open(h);
    const double box[4] = {box_mm[0] * kMm, box_mm[1] * kMm, box_mm[2] * kMm,
                           box_mm[3] * kMm};
    ns_recon_result res{};
    std::vector<double> traj(3 * 128);
    int traj_len = 0;
    check(ns_reconstruct(h.m, box, starts, seed, alpha0, eps, 0, &res, traj.data(), 128,
                         &traj_len));

    std::ostringstream rec;
    rec.precision(17);
    rec << "reconstruction\n"
        << "q1_mm " << res.q1 / kMm << "\n"
        << "q2_mm " << res.q2 / kMm << "\n"
        << "iterations " << res.iterations << "\n"
        << "converged " << res.converged << "\n"
        << "regularization_fallbacks " << res.regularization_fallbacks << "\n";
    if (out_path.empty()) {
        std::cout << rec.str();
    } else {
        std::ofstream f(out_path);
        if (!f) die("cannot open " + out_path + " for writing");
        f << rec.str();
    }

    auto f = open_csv(traj_path);
    f << "iteration,q1_mm,q2_mm,objective\n";
    for (int i = 0; i < traj_len; ++i)
        f << i << "," << traj[3 * i] / kMm << "," << traj[3 * i + 1] / kMm << ","
          << traj[3 * i + 2] << "\n";
    return 0;
}

int cmd_selftest() {
    std::vector<char> log(1 << 14);
    const int rc = ns_selftest(log.data(), static_cast<int>(log.size()));
    std::cout << log.data();
    return rc == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guided-wave notch reconstruction (SBFEM forward model + "
                 "Gauss-Newton inversion)"};
    app.require_subcommand(1);

    // dispersion
    auto* disp = app.add_subcommand("dispersion", "Lamb-mode dispersion curves as CSV");
    double fmin = 100e3, fmax = 1.5e6;
    int n_freq = 100;
    std::string disp_out = "dispersion.csv";
    disp->add_option("--fmin", fmin, "lowest frequency, Hz")->capture_default_str();
    disp->add_option("--fmax", fmax, "highest frequency, Hz")->capture_default_str();
    disp->add_option("--n", n_freq, "number of frequencies")->capture_default_str();
    disp->add_option("--output", disp_out, "output CSV")->capture_default_str();

    // forward
    auto* fwd = app.add_subcommand("forward", "simulated sensor traces at a notch");
    SourceOpts fwd_src;
    fwd_src.add(*fwd);
    double q1_mm = 0.0, q2_mm = 0.6;
    std::string fwd_out = "traces.csv";
    fwd->add_option("--q1", q1_mm, "notch position, mm")->capture_default_str();
    fwd->add_option("--q2", q2_mm, "notch depth, mm")->capture_default_str();
    fwd->add_option("--output", fwd_out, "output CSV")->capture_default_str();

    // scan
    auto* scan = app.add_subcommand("scan", "objective values on a parameter grid");
    SourceOpts scan_src;
    scan_src.add(*scan);
    std::vector<double> scan_box = {-40.0, 40.0, 0.1, 1.1};
    int n1 = 161, n2 = 21;
    std::string scan_out = "scan.csv";
    scan->add_option("--box", scan_box, "q1_lo,q1_hi,q2_lo,q2_hi in mm")
        ->expected(4)
        ->delimiter(',')
        ->capture_default_str();
    scan->add_option("--nq1", n1, "grid points along q1")->capture_default_str();
    scan->add_option("--nq2", n2, "grid points along q2")->capture_default_str();
    scan->add_option("--output", scan_out, "output CSV")->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic measurement container");
    double s_q1 = 0.0, s_q2 = 0.8, s_noise = 0.01;
    unsigned long long s_seed = 1;
    std::string synth_out = "measurement.nsm";
    synth->add_option("--q1", s_q1, "true notch position, mm")->capture_default_str();
    synth->add_option("--q2", s_q2, "true notch depth, mm")->capture_default_str();
    synth->add_option("--noise", s_noise, "noise RMS fraction of peak envelope")
        ->capture_default_str();
    synth->add_option("--seed", s_seed, "noise seed")->capture_default_str();
    synth->add_option("--output", synth_out, "output container")->capture_default_str();

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "multistart + Gauss-Newton inversion");
    SourceOpts rec_src;
    rec_src.add(*rec);
    std::vector<double> rec_box = {-40.0, 40.0, 0.1, 1.1};
    int starts = 100;
    unsigned long long rec_seed = 1;
    double alpha0 = 0.0, eps = 1e-7;
    std::string rec_out, traj_out = "trajectory.csv";
    rec->add_option("--box", rec_box, "q1_lo,q1_hi,q2_lo,q2_hi in mm")
        ->expected(4)
        ->delimiter(',')
        ->capture_default_str();
    rec->add_option("--starts", starts, "multistart samples")->capture_default_str();
    rec->add_option("--seed", rec_seed, "multistart seed")->capture_default_str();
    rec->add_option("--alpha0", alpha0, "initial regularization (0 disables)")
        ->capture_default_str();
    rec->add_option("--eps", eps, "stopping step norm, m")->capture_default_str();
    rec->add_option("--output", rec_out, "result record file (default: stdout)");
    rec->add_option("--trajectory", traj_out, "trajectory CSV")->capture_default_str();

    // selftest
    app.add_subcommand("selftest", "built-in verification suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    if (disp->parsed()) return cmd_dispersion(fmin, fmax, n_freq, disp_out);
    if (fwd->parsed()) return cmd_forward(fwd_src, q1_mm, q2_mm, fwd_out);
    if (scan->parsed()) return cmd_scan(scan_src, scan_box, n1, n2, scan_out);
    if (synth->parsed()) return cmd_synth(s_q1, s_q2, s_noise, s_seed, synth_out);
    if (rec->parsed())
        return cmd_reconstruct(rec_src, rec_box, starts, rec_seed, alpha0, eps, rec_out,
                               traj_out);
    return cmd_selftest();
}
