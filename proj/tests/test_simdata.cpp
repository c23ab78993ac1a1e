#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "esd/simdata.hpp"

using namespace esd;
namespace fs = std::filesystem;

TEST_CASE("friedman function values") {
    Eigen::Matrix<double, 5, 1> x;
    x << 0, 0, 0, 0, 0;
    CHECK(friedman_f0(x) == doctest::Approx(5.0));
    x << 1, 0.5, 0.5, 0, 0;
    CHECK(friedman_f0(x) == doctest::Approx(10.0));
    x << 0.5, 0.5, 0.5, 0.5, 0.5;
    CHECK(friedman_f0(x) == doctest::Approx(10.0 * std::sin(M_PI * 0.25) + 7.5));
}

TEST_CASE("gen_zeta marginals and correlation") {
    RngStream rng(11);
    // n = 1: plain N(0, sigma^2)
    const int N = 20000;
    double s = 0, q = 0;
    for (int i = 0; i < N; ++i) {
        const double z = gen_zeta(1, 2.5, 0.3, rng)(0);
        s += z;
        q += z * z;
    }
    CHECK(std::abs(s / N) < 0.05);
    CHECK(q / N == doctest::Approx(2.5).epsilon(0.05));

    // kernel reproduction at a probe pair, n = 40
    const int reps = 6000, n = 40;
    Eigen::MatrixXd draws(reps, n);
    for (int r = 0; r < reps; ++r) draws.row(r) = gen_zeta(n, 1.0, 0.3, rng).transpose();
    const Eigen::RowVectorXd mu = draws.colwise().mean();
    auto cov_at = [&](int i, int j) {
        double c = 0;
        for (int r = 0; r < reps; ++r) c += (draws(r, i) - mu(i)) * (draws(r, j) - mu(j));
        return c / (reps - 1);
    };
    // kernel: exp(-0.3 * |i-j|/n)
    CHECK(cov_at(0, 0) == doctest::Approx(1.0).epsilon(0.06));
    CHECK(cov_at(0, 20) == doctest::Approx(std::exp(-0.3 * 0.5)).epsilon(0.08));
    CHECK(cov_at(5, 35) == doctest::Approx(std::exp(-0.3 * 0.75)).epsilon(0.08));
}

TEST_CASE("gen_case structure and invariants") {
    SimSpec spec;
    spec.case_id = 1;
    spec.n = 200;
    spec.snr = 5.0;
    spec.missing_pct = 0.05;
    spec.seed = 42;
    RngStream rng(spec.seed);
    const Dataset data = gen_case(spec, rng);
    CHECK(data.m() == 200);
    CHECK(data.n() == 190);  // exactly round(0.95 * 200)
    CHECK(data.p() == 4);    // x2 excluded
    CHECK(data.has_truth());
    CHECK(data.locations.front()[0] == doctest::Approx(1.0 / 200));
    CHECK(data.locations.back()[0] == doctest::Approx(1.0));

    // SNR round trip (exact by construction)
    const double se2 = noise_variance_for_snr(data.truth, spec.snr);
    const double mu = data.truth.mean();
    const double var = (data.truth.array() - mu).square().sum() / (data.m() - 1);
    CHECK(var / se2 == doctest::Approx(spec.snr));

    // determinism
    RngStream rng2(spec.seed);
    const Dataset data2 = gen_case(spec, rng2);
    CHECK((data.Z - data2.Z).norm() == 0.0);
    CHECK((data.truth - data2.truth).norm() == 0.0);

    // missing_pct = 0 observes everything
    spec.missing_pct = 0.0;
    RngStream rng3(1);
    CHECK(gen_case(spec, rng3).n() == 200);
}

TEST_CASE("case weights at the endpoints") {
    // Case 1: Y is a deterministic function of the x draws (no zeta);
    // the x block consumes exactly 5n uniforms, so Y is reproducible
    SimSpec spec;
    spec.case_id = 1;
    spec.n = 100;
    spec.seed = 8;
    RngStream rng(8);
    const Dataset d1 = gen_case(spec, rng);
    RngStream check(8);
    Eigen::Matrix<double, 5, 1> x0;
    for (int j = 0; j < 5; ++j) x0(j) = check.uniform01();
    CHECK(d1.truth(0) == doctest::Approx(friedman_f0(x0)));

    // Case 5: pure zeta, truth variance near sigma_zeta^2 = var(f)
    spec.case_id = 5;
    spec.n = 400;
    RngStream rng5(99);
    const Dataset d5 = gen_case(spec, rng5);
    // a single strongly correlated draw: non-constant, finite signal
    CHECK(d5.truth.maxCoeff() - d5.truth.minCoeff() > 0.1);
    CHECK(d5.truth.allFinite());
}

TEST_CASE("csv loader: happy path, errors, holdout") {
    const fs::path p = fs::temp_directory_path() / "esd_test_data.csv";
    {
        std::ofstream os(p);
        os << "lon,lat,value\n1.0,2.0,10.5\n1.5,2.5,11.5\n2.0,3.0,12.5\n";
    }
    CsvSchema schema;
    schema.coord_columns = {"lon", "lat"};
    schema.value_column = "value";
    const Dataset data = load_csv(p.string(), schema);
    CHECK(data.m() == 3);
    CHECK(data.n() == 3);
    CHECK(data.dim() == 2);
    CHECK(data.Z(1) == 11.5);
    CHECK(data.locations[2][1] == 3.0);
    CHECK(data.has_truth());

    {
        std::ofstream os(p);
        os << "lon,lat,value\n1.0,2.0,10.5\n1.5,2.5,oops\n";
    }
    try {
        load_csv(p.string(), schema);
        FAIL("expected parse error");
    } catch (const std::invalid_argument& ex) {
        CHECK(std::string(ex.what()).find("line 3") != std::string::npos);
    }

    // 1000 rows, 5% holdout -> exactly 50 held out, reproducibly
    {
        std::ofstream os(p);
        os << "lon,lat,value\n";
        for (int i = 0; i < 1000; ++i) os << i * 0.001 << ',' << i * 0.002 << ',' << i << '\n';
    }
    schema.holdout_fraction = 0.05;
    schema.holdout_seed = 17;
    const Dataset h1 = load_csv(p.string(), schema);
    CHECK(h1.m() == 1000);
    CHECK(h1.n() == 950);
    const Dataset h2 = load_csv(p.string(), schema);
    CHECK(h1.observed_idx == h2.observed_idx);
    fs::remove(p);
}

TEST_CASE("bundle round trip is lossless") {
    SimSpec spec;
    spec.case_id = 3;
    spec.n = 80;
    spec.missing_pct = 0.1;
    spec.seed = 5;
    RngStream rng(5);
    const Dataset data = gen_case(spec, rng);
    const fs::path dir = fs::temp_directory_path() / "esd_test_bundle";
    fs::remove_all(dir);
    save_bundle(data, dir.string(), {{"case", "3"}, {"note", "round trip"}});

    const Dataset back = load_bundle(dir.string());
    CHECK(back.m() == data.m());
    CHECK(back.observed_idx == data.observed_idx);
    CHECK((back.Z - data.Z).norm() == 0.0);
    CHECK((back.X - data.X).norm() == 0.0);
    CHECK((back.X_pred - data.X_pred).norm() == 0.0);
    CHECK((back.truth - data.truth).norm() == 0.0);
    for (int j = 0; j < data.m(); ++j)
        CHECK(back.locations[static_cast<std::size_t>(j)][0] ==
              data.locations[static_cast<std::size_t>(j)][0]);

    const auto meta = load_bundle_meta(dir.string());
    CHECK(meta.at("case") == "3");
    CHECK(meta.at("note") == "round trip");
    fs::remove_all(dir);
}

TEST_CASE("spec validation") {
    SimSpec spec;
    spec.case_id = 6;
    CHECK_THROWS(spec.validate());
    spec = SimSpec{};
    spec.missing_pct = 1.0;
    CHECK_THROWS(spec.validate());
    spec = SimSpec{};
    spec.snr = 0.0;
    CHECK_THROWS(spec.validate());
}
