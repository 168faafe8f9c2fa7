#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "notchscan.h"

namespace {

struct Handle {
    ns_model* m = nullptr;
    ~Handle() { ns_model_free(m); }
};

}  // namespace

TEST_CASE("argument and io errors are reported, not fatal") {
    ns_model* m = nullptr;
    CHECK(ns_model_from_measurement(nullptr, &m) == NS_ERR_INVALID_ARGUMENT);
    CHECK(ns_model_from_measurement("/tmp/notchscan_missing.nsm", &m) == NS_ERR_IO);
    CHECK(m == nullptr);
    CHECK(std::string(ns_last_error()).find("/tmp/notchscan_missing.nsm") !=
          std::string::npos);

    CHECK(ns_objective(nullptr, 0.0, 0.5e-3, nullptr) == NS_ERR_INVALID_ARGUMENT);
    CHECK(ns_dispersion(nullptr, 0, nullptr, 0, nullptr) == NS_ERR_INVALID_ARGUMENT);

    // invalid box rejected before any heavy work
    Handle h;
    REQUIRE(ns_model_synthetic(0.0, 0.6e-3, 0.0, 1, &h.m) == NS_OK);
    const double bad_box[4] = {0.04, -0.04, 0.1e-3, 1.1e-3};
    ns_recon_result r{};
    CHECK(ns_reconstruct(h.m, bad_box, 10, 1, 0.0, 1e-7, 0, &r, nullptr, 0, nullptr) ==
          NS_ERR_INVALID_ARGUMENT);

    // out-of-box synthetic notch
    ns_model* m2 = nullptr;
    CHECK(ns_model_synthetic(0.0, 5e-3, 0.0, 1, &m2) == NS_ERR_INVALID_ARGUMENT);
    CHECK(m2 == nullptr);
}

TEST_CASE("synthetic model: shape, traces, objective landscape") {
    Handle h;
    REQUIRE(ns_model_synthetic(0.0, 0.6e-3, 0.0, 1, &h.m) == NS_OK);

    int nc = 0, nx = 0, nt = 0;
    double dt = 0.0, t0 = 0.0;
    REQUIRE(ns_model_shape(h.m, &nc, &nx, &nt, &dt, &t0) == NS_OK);
    CHECK(nc == 2);
    CHECK(nx == 11);
    CHECK(nt == 782);
    CHECK(dt == doctest::Approx(0.2e-6));

    std::vector<double> xs(nx);
    REQUIRE(ns_measurement_xs(h.m, xs.data()) == NS_OK);
    CHECK(xs.front() == doctest::Approx(-66e-3));
    CHECK(xs.back() == doctest::Approx(-46e-3));

    std::vector<double> v(static_cast<std::size_t>(nc) * nx * nt, -7.0);
    REQUIRE(ns_forward_traces(h.m, 0.0, 0.6e-3, v.data()) == NS_OK);
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    CHECK(peak > 0.0);
    CHECK(peak < 10.0);  // normalized measurement scale

    // noiseless data at elevated discretization: the p = 6 model misfit at the
    // truth is small but nonzero, and clearly below a wrong notch position
    double j_true = -1.0, j_wrong = -1.0;
    REQUIRE(ns_objective(h.m, 0.0, 0.6e-3, &j_true) == NS_OK);
    REQUIRE(ns_objective(h.m, 10e-3, 0.6e-3, &j_wrong) == NS_OK);
    CHECK(j_true > 0.0);
    CHECK(j_true < 0.1 * j_wrong);
}

TEST_CASE("container written through the api loads back to the same model") {
    const char* path = "/tmp/notchscan_capi.nsm";
    REQUIRE(ns_synth_container(0.0, 0.6e-3, 0.0, 1, path) == NS_OK);
    Handle direct, loaded;
    REQUIRE(ns_model_synthetic(0.0, 0.6e-3, 0.0, 1, &direct.m) == NS_OK);
    REQUIRE(ns_model_from_measurement(path, &loaded.m) == NS_OK);
    std::remove(path);
    double ja = -1.0, jb = -2.0;
    REQUIRE(ns_objective(direct.m, 2e-3, 0.5e-3, &ja) == NS_OK);
    REQUIRE(ns_objective(loaded.m, 2e-3, 0.5e-3, &jb) == NS_OK);
    CHECK(ja == jb);  // the file round trip is bit-exact
}

TEST_CASE("dispersion rows are labeled and ordered by frequency") {
    const int n = 12;
    std::vector<double> freqs(n);
    for (int i = 0; i < n; ++i) freqs[i] = 100e3 + i * (900e3 / (n - 1));
    std::vector<double> rows(static_cast<std::size_t>(n) * 40 * 6);
    int n_rows = 0;
    REQUIRE(ns_dispersion(freqs.data(), n, rows.data(), n * 40, &n_rows) == NS_OK);
    CHECK(n_rows >= 2 * n);  // at least A0 and S0 everywhere in this band
    double prev_f = 0.0;
    for (int i = 0; i < n_rows; ++i) {
        const double* r = &rows[6 * i];
        CHECK(r[0] >= prev_f);
        prev_f = r[0];
        CHECK((r[1] == 0.0 || r[1] == 1.0));
        CHECK(r[3] > 0.0);  // wavelength
        CHECK(r[4] > 0.0);  // propagating: positive real wavenumber
    }
}
