// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each block is self-contained and seeded.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "esd/gibbs.hpp"
#include "esd/scoring.hpp"
#include "esd/simdata.hpp"
#include "esd/spectral.hpp"

using namespace esd;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExpansionMap flat_map_1d() {
    BasisSet b;
    b.knots = {Location(0.5)};
    b.bandwidth = 1.0;
    return ExpansionMap{b, Eigen::VectorXd::Zero(1)};
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const int K = 5000, reps = 2000;
    const double phi = 1.0, sigma_nu = 1.0;
    const std::vector<double> lags = {0.0, 0.1, 0.5, 1.0};
    RngStream rng(0);
    const auto map = flat_map_1d();
    std::vector<Location> pts;
    pts.emplace_back(0.0);
    for (double h : lags) pts.emplace_back(h);
    Eigen::MatrixXd fields(reps, static_cast<int>(pts.size()));
    for (int r = 0; r < reps; ++r) {
        const auto draw = draw_spectral(K, 1, phi, rng);
        fields.row(r) = simulate_field(draw, pts, map, sigma_nu).transpose();
    }
    const Eigen::RowVectorXd mu = fields.colwise().mean();
    double max_cov_err = 0.0;
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const int c = static_cast<int>(k) + 1;
        double cov = 0.0;
        for (int r = 0; r < reps; ++r)
            cov += (fields(r, 0) - mu(0)) * (fields(r, c) - mu(c));
        cov /= (reps - 1);
        max_cov_err = std::max(max_cov_err, std::abs(cov - std::exp(-lags[k])));
    }
    const double mean_abs = std::abs(fields.mean());
    const double secs = now_seconds(t0);
    std::ostringstream d;
    d << "max |cov err| " << max_cov_err << ", |mean| " << mean_abs << ", " << secs << " s";
    report(1, max_cov_err < 0.05 && mean_abs < 0.02 && secs < 60.0,
           "spectral simulation reproduces exp(-|h|) at K=5000", d.str());
}

// ---------------------------------------------------------------- criterion 2
struct MomentCheck {
    std::string name;
    double mean_err = 0.0, var_err = 0.0;
};

void criterion_2() {
    const int N = 100000;
    std::vector<MomentCheck> checks;

    // beta conditional on a fixed synthetic sufficient-statistics fixture
    {
        RngStream rng(21);
        const int n = 40, p = 2;
        Eigen::MatrixXd X(n, p);
        Eigen::VectorXd Z(n), nu = Eigen::VectorXd::Zero(n);
        RngStream gen(7);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            X(i, 1) = gen.uniform01();
            Z(i) = 2.0 + 3.0 * X(i, 1) + 0.3 * gen.normal();
        }
        const double se2 = 0.8, sb2 = 25.0;
        Eigen::MatrixXd prec = X.transpose() * X / se2;
        prec.diagonal().array() += 1.0 / sb2;
        const Eigen::VectorXd mu = prec.ldlt().solve(X.transpose() * Z / se2);
        const Eigen::MatrixXd cov = prec.inverse();
        Eigen::VectorXd s = Eigen::VectorXd::Zero(p), q = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < N; ++i) {
            const Eigen::VectorXd b = sample_beta(X, Z, nu, se2, sb2, rng);
            s += b;
            q += b.cwiseProduct(b);
        }
        MomentCheck c{"beta (item 1)"};
        for (int j = 0; j < p; ++j) {
            const double m = s(j) / N;
            const double v = q(j) / N - m * m;
            c.mean_err = std::max(c.mean_err, std::abs(m - mu(j)) / std::abs(mu(j)));
            c.var_err = std::max(c.var_err, std::abs(v - cov(j, j)) / cov(j, j));
        }
        checks.push_back(c);
    }

    // nu conditional, observed and unobserved coordinates
    {
        RngStream rng(22);
        Eigen::VectorXd nu_tilde(2), resid(1);
        nu_tilde << 1.5, -2.0;
        resid << 4.0;
        const std::vector<int> obs = {0, -1};
        const double d2 = 0.7, se2 = 1.9;
        const double v = 1.0 / (1.0 / d2 + 1.0 / se2);
        const double mu0 = v * (resid(0) / se2 + nu_tilde(0) / d2);
        Eigen::Vector2d s = Eigen::Vector2d::Zero(), q = Eigen::Vector2d::Zero();
        for (int i = 0; i < N; ++i) {
            const Eigen::VectorXd x = sample_nu(nu_tilde, resid, obs, d2, se2, rng);
            s += x;
            q += x.cwiseProduct(x);
        }
        MomentCheck c{"nu (item 2)"};
        const double m0 = s(0) / N, m1 = s(1) / N;
        c.mean_err = std::max(std::abs(m0 - mu0) / std::abs(mu0),
                              std::abs(m1 - nu_tilde(1)) / std::abs(nu_tilde(1)));
        c.var_err = std::max(std::abs(q(0) / N - m0 * m0 - v) / v,
                             std::abs(q(1) / N - m1 * m1 - d2) / d2);
        checks.push_back(c);
    }

    // the five IG conditionals: sigma_nu^2 via the quad-form path, the rest
    // via ig_update with distinct fixed sufficient statistics
    struct IgFix {
        std::string name;
        double alpha, beta;
        int n_eff;
        double quad;
    };
    const std::vector<IgFix> igs = {
        {"sigma_nu^2 (item 4)", 2.0, 3.0, 30, 40.0},
        // posterior shape must stay comfortably above 4 or the sample-variance
        // estimator has no CLT and the 2% gate is unattainable at any N
        {"sigma_beta^2 (item 5)", 15.0, 2.0, 4, 55.0},
        {"sigma_eta^2 (item 6)", 0.5, 0.5, 20, 33.0},
        {"delta^2 (item 8)", 1.0, 2.0, 60, 72.0},
        {"sigma_eps^2 (item 9)", 0.01, 0.01, 100, 480.0},
    };
    std::uint64_t seed = 23;
    for (const auto& f : igs) {
        RngStream rng(seed++);
        const double shape = f.alpha + 0.5 * f.n_eff;
        const double scale = f.beta + 0.5 * f.quad;
        const double true_mean = scale / (shape - 1.0);
        const double true_var = scale * scale / ((shape - 1) * (shape - 1) * (shape - 2));
        double s = 0.0, q = 0.0;
        const bool quad_path = f.name.find("nu^2") != std::string::npos;
        Eigen::VectorXd nu_sub;
        Eigen::MatrixXd E_sub;
        if (quad_path) {
            // spread-out subsample: R numerically the identity, quad = sum nu^2
            nu_sub.resize(f.n_eff);
            for (int i = 0; i < f.n_eff; ++i)
                nu_sub(i) = (i % 2 ? -1.0 : 1.0) * std::sqrt(f.quad / f.n_eff);
            E_sub = Eigen::MatrixXd::Constant(f.n_eff, f.n_eff, 1e6);
            E_sub.diagonal().setZero();
        }
        for (int i = 0; i < N; ++i) {
            const double x = quad_path
                                 ? sample_sigma_nu2(nu_sub, E_sub, 1.0, 0.0, f.alpha, f.beta, rng)
                                 : ig_update(f.alpha, f.beta, f.n_eff, f.quad, rng);
            s += x;
            q += x * x;
        }
        MomentCheck c{f.name};
        const double m = s / N;
        c.mean_err = std::abs(m - true_mean) / true_mean;
        c.var_err = std::abs(q / N - m * m - true_var) / true_var;
        checks.push_back(c);
    }

    bool ok = true;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : checks) {
        const double e = std::max(c.mean_err, c.var_err);
        if (e > worst) {
            worst = e;
            worst_name = c.name;
        }
        if (c.mean_err > 0.02 || c.var_err > 0.02) ok = false;
    }
    std::ostringstream d;
    d << "worst relative moment error " << worst << " [" << worst_name << "]";
    report(2, ok, "conjugate full conditionals match analytic moments within 2%", d.str());
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
    // data drawn from the model itself: eta = 0, known (phi, s2nu, s2eps, d2)
    const int m = 100;
    const double phi = 1.5, s2nu = 2.0, s2eps = 0.5, d2 = 0.1;
    BasisSet basis;
    basis.knots = knot_grid_1d({Location(0.0), Location(1.0)}, 4);
    basis.bandwidth = 1.0;

    Dataset data;
    for (int i = 1; i <= m; ++i) data.locations.emplace_back(static_cast<double>(i) / m);
    CovParams cp;
    cp.eta = Eigen::VectorXd::Zero(4);
    cp.phi = phi;
    cp.sigma_nu_sq = s2nu;
    Eigen::MatrixXd C = cov_matrix(data.locations, cp, basis);
    C.diagonal().array() += d2;
    RngStream gen(31);
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z(i) = gen.normal();
    const Eigen::VectorXd Y = Eigen::LLT<Eigen::MatrixXd>(C).matrixL() * z;
    for (int i = 0; i < m; ++i) data.observed_idx.push_back(i);
    data.Z.resize(m);
    for (int i = 0; i < m; ++i) data.Z(i) = Y(i) + std::sqrt(s2eps) * gen.normal();
    data.X = Eigen::MatrixXd::Zero(m, 1);
    data.X_pred = Eigen::MatrixXd::Zero(m, 1);

    OracleParams op;
    op.cov = cp;
    op.sigma_eps_sq = s2eps;
    op.delta_sq = d2;
    op.sigma_beta_sq = 0.0;  // X = 0 disables the regression term
    const OracleResult oracle = dense_gp_oracle(data, op, basis);

    Hyperparams h;
    h.B = 20000;
    h.burn_in = 2000;
    h.K = 1000;
    h.m_sub = 0;  // all structural parameters fixed; no subsample needed
    h.phi_grid = 1;
    h.seed = 77;
    h.fix_phi = phi;
    h.fix_sigma_nu_sq = s2nu;
    h.fix_sigma_eps_sq = s2eps;
    h.fix_delta_sq = d2;
    h.fix_sigma_beta_sq = 1.0;
    h.fix_eta_zero = true;
    const ChainOutput out = run_chain(data, basis, h);
    const Prediction pred = predict_posterior(out, data);

    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
        const double se = std::sqrt(pred.variance(j) / out.retained);
        const double dev = std::abs(pred.mean(j) - oracle.mean(j)) / std::max(se, 1e-12);
        worst = std::max(worst, dev);
    }
    std::ostringstream d;
    d << "max |mean - oracle| = " << worst << " MC standard errors (limit 3); "
      << "the prior-refresh of the spectral field yields pointwise shrinkage, not kriging";
    report(3, worst <= 3.0, "collapsed sampler matches the dense-GP oracle mean", d.str());
}

// ------------------------------------------------------- criteria 4 and 5
struct RepResult {
    double rmspe_all = 0.0;
    double hpd_lo = 0.0, hpd_hi = 0.0;
    double true_se2 = 0.0;
    double seconds = 0.0;
};

void criteria_4_and_5() {
    const int n_reps = 10;
    std::vector<RepResult> results(n_reps);
    std::mutex mu;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_reps) return;
            const auto t0 = std::chrono::steady_clock::now();
            SimSpec spec;
            spec.case_id = 1;
            spec.n = 1000;
            spec.snr = 5.0;
            spec.missing_pct = 0.05;
            spec.seed = static_cast<std::uint64_t>(i + 1);
            RngStream rng(spec.seed);
            const Dataset data = gen_case(spec, rng);

            BasisSet basis;
            basis.knots = knot_grid_1d(data.locations, 20);
            basis.bandwidth = default_tau(basis.knots);
            Hyperparams h;
            h.B = 16000;
            h.burn_in = 4000;
            h.thin = 4;
            h.K = 500;
            h.m_sub = 150;
            h.phi_grid = 20;
            h.seed = static_cast<std::uint64_t>(1001 + i);
            const ChainOutput out = run_chain(data, basis, h);
            const Prediction pred = predict_posterior(out, data);

            RepResult r;
            r.rmspe_all = rmspe(data.truth, pred.mean);
            const auto hpd = hpd_interval(out.sigma_eps_sq, 0.95);
            r.hpd_lo = hpd.first;
            r.hpd_hi = hpd.second;
            r.true_se2 = noise_variance_for_snr(data.truth, spec.snr);
            r.seconds = now_seconds(t0);
            std::lock_guard<std::mutex> lock(mu);
            results[static_cast<std::size_t>(i)] = r;
        }
    };
    std::vector<std::thread> pool;
    const unsigned workers = std::min(5u, std::max(1u, std::thread::hardware_concurrency() / 2));
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<double> rmspes;
    int covered = 0;
    double max_secs = 0.0;
    for (const auto& r : results) {
        rmspes.push_back(r.rmspe_all);
        if (r.hpd_lo <= r.true_se2 && r.true_se2 <= r.hpd_hi) ++covered;
        max_secs = std::max(max_secs, r.seconds);
    }
    std::sort(rmspes.begin(), rmspes.end());
    const double median = 0.5 * (rmspes[4] + rmspes[5]);

    std::ostringstream d4;
    d4 << "median RMSPE " << median << " over 10 seeds (reference methods score 3.05-3.24), slowest "
       << max_secs << " s";
    report(4, median < 3.0 && max_secs < 1800.0,
           "Case 1 / SNR 5 / n=1000 / 5% missing beats the reference methods", d4.str());

    std::ostringstream d5;
    d5 << covered << "/10 HPD intervals contain the true sigma_eps^2";
    report(5, covered >= 8, "95% HPD recovery of sigma_eps^2", d5.str());
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
    bool ok = true;
    std::ostringstream d;
    // 50,000-location fit: every per-iteration allocation instrumented
    {
        SimSpec spec;
        spec.case_id = 1;
        spec.n = 50000;
        spec.missing_pct = 0.05;
        spec.seed = 404;
        RngStream rng(spec.seed);
        const Dataset data = gen_case(spec, rng);
        BasisSet basis;
        basis.knots = knot_grid_1d(data.locations, 20);
        basis.bandwidth = default_tau(basis.knots);
        Hyperparams h;
        h.B = 2;
        h.burn_in = 0;
        h.K = 500;
        h.m_sub = 150;
        h.phi_grid = 10;
        h.seed = 5;
        const ChainOutput out = run_chain(data, basis, h);
        d << "m=50000: peak " << out.peak_tracked_entries << " of " << out.allowed_entries
          << " allowed entries";
        if (out.peak_tracked_entries > out.allowed_entries || out.iterations != 2) ok = false;
    }
    // 20,000-point ozone-format run, end to end with finite RMSPE
    {
        const fs::path csv = fs::temp_directory_path() / "esd_acc_ozone.csv";
        {
            std::ofstream os(csv);
            os << "lon,lat,tco\n";
            RngStream gen(55);
            for (int i = 0; i < 20000; ++i) {
                const double lon = -180.0 + 360.0 * gen.uniform01();
                const double lat = -80.0 + 160.0 * gen.uniform01();
                const double v = 280.0 + 40.0 * std::sin(lat * M_PI / 180.0) +
                                 10.0 * std::cos(lon * M_PI / 90.0) + 3.0 * gen.normal();
                os << lon << ',' << lat << ',' << v << '\n';
            }
        }
        CsvSchema schema;
        schema.coord_columns = {"lon", "lat"};
        schema.value_column = "tco";
        schema.holdout_fraction = 0.05;
        schema.holdout_seed = 9;
        const Dataset data = load_csv(csv.string(), schema);
        BasisSet basis;
        basis.kind = BasisKind::OzoneComposite;
        basis.knots = knot_grid_2d(data.locations, 3, 3);
        basis.bandwidth = default_tau(basis.knots);
        Hyperparams h;
        h.B = 60;
        h.burn_in = 20;
        h.K = 200;
        h.m_sub = 100;
        h.phi_grid = 10;
        h.seed = 6;
        const ChainOutput out = run_chain(data, basis, h);
        const Prediction pred = predict_posterior(out, data);
        const double r = rmspe(data.truth, pred.mean);
        d << "; ozone-format n=20000 RMSPE " << r;
        if (!std::isfinite(r) || out.peak_tracked_entries > out.allowed_entries) ok = false;
        fs::remove(csv);
    }
    report(6, ok, "matrix-free scaling contract holds at m=50000 and n=20000", d.str());
}

// ---------------------------------------------------------------- criterion 7
int run_cli(const std::string& args) {
    const std::string cmd = std::string(ESD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return (std::system(cmd.c_str()) >> 8) & 0xff;
}

bool same_tree(const fs::path& a, const fs::path& b) {
    std::vector<std::string> rel_a, rel_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a).string());
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b).string());
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a) {
        std::ifstream fa(a / rel, std::ios::binary), fb(b / rel, std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str()) return false;
    }
    return true;
}

void criterion_7() {
    const fs::path dir = fs::temp_directory_path() / "esd_acc_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream os(dir / name);
        os << text;
    };
    const std::string bundle = (dir / "bundle").string();
    const std::string fitdir = (dir / "fit_a").string();
    write("cfg.ini",
          "[simulate]\ncase = 2\nn = 300\nsnr = 5\nmissing = 0.1\nseed = 12\n"
          "[data]\nbundle = " + bundle + "\n"
          "[basis]\nknots = 8\n"
          "[fit]\nB = 60\nburn_in = 20\nK = 80\nm_sub = 40\nphi_grid = 6\nseed = 2\n"
          "[predict]\nchain_dir = " + fitdir + "\n"
          "[evaluate]\nchain_dir = " + fitdir + "\n"
          "[spectral]\nK = 800\nreps = 300\nseed = 1\n"
          "[sweep]\nseed = 3\n");
    write("cfg_sweep.ini", "[simulate]\nn = 60\n[sweep]\nseed = 3\n");
    const std::string cfg = " --config " + (dir / "cfg.ini").string();
    const std::string cfg_sw = " --config " + (dir / "cfg_sweep.ini").string();

    bool ok = true;
    std::ostringstream d;
    auto twice = [&](const std::string& label, const std::string& args_a,
                     const std::string& args_b, const fs::path& pa, const fs::path& pb) {
        const int ra = run_cli(args_a);
        const int rb = run_cli(args_b);
        const bool same = ra == rb && same_tree(pa, pb);
        if (!same) {
            ok = false;
            d << label << " differs; ";
        }
    };

    // simulate
    twice("simulate", "simulate" + cfg + " --out " + (dir / "sim_a").string(),
          "simulate" + cfg + " --out " + (dir / "sim_b").string(), dir / "sim_a", dir / "sim_b");
    // fit needs the bundle in the configured location
    run_cli("simulate" + cfg + " --out " + bundle);
    twice("fit", "fit" + cfg + " --out " + (dir / "fit_a").string(),
          "fit" + cfg + " --out " + (dir / "fit_b").string(), dir / "fit_a", dir / "fit_b");
    // predict/evaluate read fit_a and write fresh output dirs
    twice("predict", "predict" + cfg + " --out " + (dir / "pr_a").string(),
          "predict" + cfg + " --out " + (dir / "pr_b").string(), dir / "pr_a", dir / "pr_b");
    run_cli("predict" + cfg + " --out " + fitdir);
    twice("evaluate", "evaluate" + cfg + " --out " + (dir / "ev_a").string(),
          "evaluate" + cfg + " --out " + (dir / "ev_b").string(), dir / "ev_a", dir / "ev_b");
    twice("spectral-check", "spectral-check" + cfg + " --out " + (dir / "sp_a").string(),
          "spectral-check" + cfg + " --out " + (dir / "sp_b").string(), dir / "sp_a",
          dir / "sp_b");
    twice("sweep", "sweep" + cfg_sw + " --out " + (dir / "sw_a").string(),
          "sweep" + cfg_sw + " --out " + (dir / "sw_b").string(), dir / "sw_a", dir / "sw_b");

    report(7, ok, "every CLI command is byte-identical on re-run",
           ok ? "simulate/fit/predict/evaluate/spectral-check/sweep all compared" : d.str());
    fs::remove_all(dir);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criteria_4_and_5();
    criterion_6();
    criterion_7();
    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criterion(s) failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
