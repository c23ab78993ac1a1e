#include "esd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "esd/basis.hpp"
#include "esd/gibbs.hpp"
#include "esd/scoring.hpp"
#include "esd/simdata.hpp"
#include "esd/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace esd {

namespace {

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
    std::ofstream os(p);
    if (!os) throw std::invalid_argument("cannot write " + p.string());
    os << std::setprecision(17);
    return os;
}

SimSpec sim_spec_from(const Config& cfg) {
    SimSpec spec;
    spec.case_id = cfg.get_int("simulate", "case", spec.case_id);
    spec.n = cfg.get_int("simulate", "n", spec.n);
    spec.snr = cfg.get_double("simulate", "snr", spec.snr);
    spec.missing_pct = cfg.get_double("simulate", "missing", spec.missing_pct);
    spec.phi_zeta = cfg.get_double("simulate", "phi_zeta", spec.phi_zeta);
    spec.seed = cfg.get_u64("simulate", "seed", spec.seed);
    spec.validate();
    return spec;
}

Dataset load_data(const Config& cfg) {
    const std::string bundle = cfg.get_str("data", "bundle", "");
    const std::string csv = cfg.get_str("data", "csv", "");
    if (!bundle.empty() && !csv.empty())
        throw std::invalid_argument("data: give either bundle or csv, not both");
    if (!bundle.empty()) return load_bundle(bundle);
    if (csv.empty()) throw std::invalid_argument("data: bundle or csv path required");
    CsvSchema schema;
    {
        const std::string coords = cfg.get_str("data", "coords", "s1");
        std::istringstream is(coords);
        std::string tok;
        while (std::getline(is, tok, ',')) schema.coord_columns.push_back(tok);
    }
    schema.value_column = cfg.get_str("data", "value", "z");
    schema.holdout_fraction = cfg.get_double("data", "holdout", 0.0);
    schema.holdout_seed = cfg.get_u64("data", "holdout_seed", 0);
    return load_csv(csv, schema);
}

BasisSet build_basis(const Config& cfg, const Dataset& data) {
    BasisSet basis;
    const std::string kind = cfg.get_str("basis", "kind", "gaussian");
    if (kind == "gaussian")
        basis.kind = BasisKind::GaussianRbf;
    else if (kind == "bisquare")
        basis.kind = BasisKind::Bisquare;
    else if (kind == "ozone")
        basis.kind = BasisKind::OzoneComposite;
    else
        throw std::invalid_argument("basis.kind must be gaussian, bisquare, or ozone");
    if (data.dim() == 1) {
        basis.knots = knot_grid_1d(data.locations, cfg.get_int("basis", "knots", 20));
    } else {
        basis.knots = knot_grid_2d(data.locations, cfg.get_int("basis", "knots_x", 5),
                                   cfg.get_int("basis", "knots_y", 5));
    }
    const double bw = cfg.get_double("basis", "bandwidth", 0.0);
    basis.bandwidth = bw > 0.0 ? bw : default_tau(basis.knots);
    basis.validate();
    return basis;
}

Hyperparams hyper_from(const Config& cfg) {
    Hyperparams h;
    h.B = cfg.get_int("fit", "B", h.B);
    h.burn_in = cfg.get_int("fit", "burn_in", h.burn_in);
    h.thin = cfg.get_int("fit", "thin", h.thin);
    h.K = cfg.get_int("fit", "K", h.K);
    h.m_sub = cfg.get_int("fit", "m_sub", h.m_sub);
    h.phi_grid = cfg.get_int("fit", "phi_grid", h.phi_grid);
    h.phi_L = cfg.get_double("fit", "phi_L", h.phi_L);
    h.phi_U = cfg.get_double("fit", "phi_U", h.phi_U);
    h.mh_step = cfg.get_double("fit", "mh_step", h.mh_step);
    h.adapt_mh = cfg.get_bool("fit", "adapt_mh", h.adapt_mh);
    h.seed = cfg.get_u64("fit", "seed", h.seed);
    h.alpha1 = cfg.get_double("fit", "alpha1", h.alpha1);
    h.beta1 = cfg.get_double("fit", "beta1", h.beta1);
    h.alpha2 = cfg.get_double("fit", "alpha2", h.alpha2);
    h.beta2 = cfg.get_double("fit", "beta2", h.beta2);
    h.alpha3 = cfg.get_double("fit", "alpha3", h.alpha3);
    h.beta3 = cfg.get_double("fit", "beta3", h.beta3);
    h.alpha4 = cfg.get_double("fit", "alpha4", h.alpha4);
    h.beta4 = cfg.get_double("fit", "beta4", h.beta4);
    h.alpha5 = cfg.get_double("fit", "alpha5", h.alpha5);
    h.beta5 = cfg.get_double("fit", "beta5", h.beta5);
    if (cfg.has("fit", "fix_phi")) h.fix_phi = cfg.get_double("fit", "fix_phi", 0);
    if (cfg.has("fit", "fix_sigma_nu_sq"))
        h.fix_sigma_nu_sq = cfg.get_double("fit", "fix_sigma_nu_sq", 0);
    if (cfg.has("fit", "fix_sigma_beta_sq"))
        h.fix_sigma_beta_sq = cfg.get_double("fit", "fix_sigma_beta_sq", 0);
    if (cfg.has("fit", "fix_sigma_eta_sq"))
        h.fix_sigma_eta_sq = cfg.get_double("fit", "fix_sigma_eta_sq", 0);
    if (cfg.has("fit", "fix_delta_sq")) h.fix_delta_sq = cfg.get_double("fit", "fix_delta_sq", 0);
    if (cfg.has("fit", "fix_sigma_eps_sq"))
        h.fix_sigma_eps_sq = cfg.get_double("fit", "fix_sigma_eps_sq", 0);
    h.fix_eta_zero = cfg.get_bool("fit", "fix_eta_zero", false);
    h.validate();
    return h;
}

void write_samples_csv(const fs::path& path, const ChainOutput& out, int burn_in, int thin) {
    auto os = open_out(path);
    os << "iter,sigma_nu_sq,sigma_beta_sq,sigma_eta_sq,phi,delta_sq,sigma_eps_sq";
    for (Eigen::Index j = 0; j < out.beta_samples.cols(); ++j) os << ",beta_" << (j + 1);
    for (Eigen::Index j = 0; j < out.eta_samples.cols(); ++j) os << ",eta_" << (j + 1);
    os << '\n';
    for (int s = 0; s < out.retained; ++s) {
        os << (burn_in + s * thin) << ',' << out.sigma_nu_sq(s) << ',' << out.sigma_beta_sq(s)
           << ',' << out.sigma_eta_sq(s) << ',' << out.phi(s) << ',' << out.delta_sq(s) << ','
           << out.sigma_eps_sq(s);
        for (Eigen::Index j = 0; j < out.beta_samples.cols(); ++j)
            os << ',' << out.beta_samples(s, j);
        for (Eigen::Index j = 0; j < out.eta_samples.cols(); ++j)
            os << ',' << out.eta_samples(s, j);
        os << '\n';
    }
}

std::vector<int> holdout_indices(const Dataset& data) {
    std::vector<char> obs(static_cast<std::size_t>(data.m()), 0);
    for (int idx : data.observed_idx) obs[static_cast<std::size_t>(idx)] = 1;
    std::vector<int> held;
    for (int j = 0; j < data.m(); ++j)
        if (!obs[static_cast<std::size_t>(j)]) held.push_back(j);
    return held;
}

}  // namespace

int cmd_simulate(const Config& cfg, const std::string& out_dir) {
    const SimSpec spec = sim_spec_from(cfg);
    RngStream rng(spec.seed);
    const Dataset data = gen_case(spec, rng);
    const double sigma_eps_sq = noise_variance_for_snr(data.truth, spec.snr);
    std::map<std::string, std::string> meta;
    std::ostringstream v;
    v << std::setprecision(17);
    auto put = [&](const std::string& k, auto val) {
        v.str("");
        v << val;
        meta[k] = v.str();
    };
    put("case", spec.case_id);
    put("n", spec.n);
    put("snr", spec.snr);
    put("missing", spec.missing_pct);
    put("phi_zeta", spec.phi_zeta);
    put("seed", spec.seed);
    put("sigma_eps_sq", sigma_eps_sq);
    save_bundle(data, out_dir, meta);
    std::cout << "sigma_eps_sq = " << std::setprecision(17) << sigma_eps_sq << '\n';
    return 0;
}

int cmd_fit(const Config& cfg, const std::string& out_dir) {
    const Dataset data = load_data(cfg);
    const BasisSet basis = build_basis(cfg, data);
    const Hyperparams hyper = hyper_from(cfg);
    GibbsChain chain(data, basis, hyper);

    const fs::path out(out_dir);
    fs::create_directories(out);
    const fs::path ckpt_path = out / "checkpoint.txt";
    if (cfg.get_bool("fit", "resume", true) && fs::exists(ckpt_path))
        chain.load_checkpoint(ckpt_path.string());

    const int stop_after = cfg.get_int("fit", "stop_after", 0);
    const int stop = stop_after > 0 ? std::min(stop_after, hyper.B) : hyper.B;
    const int every = cfg.get_int("fit", "checkpoint_every", 0);
    while (chain.next_iteration() < stop) {
        const int target = every > 0 ? std::min(stop, chain.next_iteration() + every) : stop;
        chain.run_until(target);
        if (every > 0) chain.save_checkpoint(ckpt_path.string());
    }
    chain.save_checkpoint(ckpt_path.string());

    const ChainOutput& res = chain.output();
    std::cerr << "fit: " << res.iterations << " iterations, " << res.retained << " retained, "
              << std::fixed << std::setprecision(2) << res.seconds << " s, eta acceptance "
              << res.eta_accept_rate << '\n';

    if (chain.next_iteration() >= hyper.B) {
        write_samples_csv(out / "samples.csv", res, hyper.burn_in, hyper.thin);
        auto os = open_out(out / "manifest.txt");
        os << "# run manifest\n" << cfg.echo();
        os << "result.iterations = " << res.iterations << '\n';
        os << "result.retained = " << res.retained << '\n';
        os << "result.eta_accept_rate = " << res.eta_accept_rate << '\n';
        os << "result.mh_step_final = " << res.mh_step_final << '\n';
        os << "result.peak_tracked_entries = " << res.peak_tracked_entries << '\n';
        os << "result.allowed_entries = " << res.allowed_entries << '\n';
    } else {
        std::cerr << "fit: stopped at iteration " << chain.next_iteration()
                  << "; checkpoint written\n";
    }
    return 0;
}

int cmd_predict(const Config& cfg, const std::string& out_dir) {
    const Dataset data = load_data(cfg);
    const BasisSet basis = build_basis(cfg, data);
    const Hyperparams hyper = hyper_from(cfg);
    const std::string chain_dir = cfg.get_str("predict", "chain_dir", "");
    if (chain_dir.empty()) throw std::invalid_argument("predict.chain_dir required");
    GibbsChain chain(data, basis, hyper);
    chain.load_checkpoint((fs::path(chain_dir) / "checkpoint.txt").string());
    const Prediction pred = predict_posterior(chain.output(), data);

    auto os = open_out(fs::path(out_dir) / "prediction.csv");
    os << (data.dim() == 1 ? "s1" : "s1,s2") << ",mean,variance\n";
    for (int j = 0; j < data.m(); ++j) {
        os << data.locations[static_cast<std::size_t>(j)][0];
        if (data.dim() == 2) os << ',' << data.locations[static_cast<std::size_t>(j)][1];
        os << ',' << pred.mean(j) << ',' << pred.variance(j) << '\n';
    }
    return 0;
}

int cmd_evaluate(const Config& cfg, const std::string& out_dir) {
    const Dataset data = load_data(cfg);
    const std::string chain_dir = cfg.get_str("evaluate", "chain_dir", "");
    if (chain_dir.empty()) throw std::invalid_argument("evaluate.chain_dir required");
    const double level = cfg.get_double("evaluate", "level", 0.95);

    // prediction.csv: mean/variance per location, as written by predict
    Eigen::VectorXd mean(data.m());
    {
        std::ifstream is(fs::path(chain_dir) / "prediction.csv");
        if (!is)
            throw std::invalid_argument("evaluate: missing prediction.csv in " + chain_dir);
        std::string line;
        std::getline(is, line);
        int j = 0;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            if (j >= data.m()) throw std::runtime_error("evaluate: prediction.csv too long");
            const auto last = line.rfind(',');
            const auto prev = line.rfind(',', last - 1);
            mean(j) = std::stod(line.substr(prev + 1, last - prev - 1));
            ++j;
        }
        if (j != data.m()) throw std::runtime_error("evaluate: prediction.csv length mismatch");
    }

    // scalar chains from samples.csv
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    {
        std::ifstream is(fs::path(chain_dir) / "samples.csv");
        if (!is) throw std::invalid_argument("evaluate: missing samples.csv in " + chain_dir);
        std::string line;
        std::getline(is, line);
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) names.push_back(tok);
        cols.resize(names.size());
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::size_t c = 0;
            while (std::getline(ls, tok, ',')) cols.at(c++).push_back(std::stod(tok));
        }
    }

    json summary;
    summary["level"] = level;
    for (std::size_t c = 1; c < names.size(); ++c) {  // skip iter column
        Eigen::Map<Eigen::VectorXd> v(cols[c].data(), static_cast<Eigen::Index>(cols[c].size()));
        ScalarSummary s;
        s.name = names[c];
        s.mean = v.mean();
        s.sd = v.size() > 1 ? std::sqrt((v.array() - s.mean).square().sum() / (v.size() - 1)) : 0.0;
        json entry = {{"mean", s.mean}, {"sd", s.sd}};
        if (v.size() >= 20) {  // interval/ESS need a minimally sized chain
            const auto hpd = hpd_interval(v, level);
            entry["hpd_lo"] = hpd.first;
            entry["hpd_hi"] = hpd.second;
            entry["ess"] = effective_sample_size(v);
        }
        summary["parameters"][s.name] = entry;
    }

    auto rm = open_out(fs::path(out_dir) / "rmspe.csv");
    rm << "method,rmspe\n";
    if (data.has_truth()) {
        const double all = rmspe(data.truth, mean);
        summary["rmspe_all"] = all;
        rm << "esd_all," << all << '\n';
        const auto held = holdout_indices(data);
        if (!held.empty()) {
            const double ho = rmspe(data.truth, mean, &held);
            summary["rmspe_holdout"] = ho;
            rm << "esd_holdout," << ho << '\n';
        }
    } else {
        std::cerr << "evaluate: warning: no truth available, RMSPE skipped\n";
    }

    auto os = open_out(fs::path(out_dir) / "summary.json");
    os << summary.dump(2) << '\n';
    return 0;
}

int cmd_spectral_check(const Config& cfg, const std::string& out_dir) {
    const int K = cfg.get_int("spectral", "K", 5000);
    const int reps = cfg.get_int("spectral", "reps", 2000);
    const double phi = cfg.get_double("spectral", "phi", 1.0);
    const double sigma_nu_sq = cfg.get_double("spectral", "sigma_nu_sq", 1.0);
    const std::vector<double> lags = cfg.get_doubles("spectral", "lags", {0.0, 0.1, 0.5, 1.0});
    const double tol = cfg.get_double("spectral", "tol", 0.05);
    const double mean_tol = cfg.get_double("spectral", "mean_tol", 0.02);
    RngStream rng(cfg.get_u64("spectral", "seed", 0));
    if (reps < 2) throw std::invalid_argument("spectral.reps must be >= 2");
    if (sigma_nu_sq < 0.0) throw std::invalid_argument("spectral.sigma_nu_sq must be >= 0");

    std::vector<Location> pts;
    pts.emplace_back(0.0);
    for (double h : lags) pts.emplace_back(h);
    const int npts = static_cast<int>(pts.size());

    BasisSet basis;
    basis.kind = BasisKind::GaussianRbf;
    basis.knots.emplace_back(0.5);
    basis.bandwidth = 1.0;
    const ExpansionMap map{basis, Eigen::VectorXd::Zero(1)};  // eta = 0: no warp

    const double sigma_nu = std::sqrt(sigma_nu_sq);
    Eigen::MatrixXd fields(reps, npts);
    for (int r = 0; r < reps; ++r) {
        const SpectralDraw draw = draw_spectral(K, 1, phi, rng);
        fields.row(r) = simulate_field(draw, pts, map, sigma_nu).transpose();
    }

    const Eigen::RowVectorXd mu = fields.colwise().mean();
    const double scale = sigma_nu_sq > 0.0 ? sigma_nu_sq : 1.0;
    const double mean_scale = sigma_nu > 0.0 ? sigma_nu : 1.0;
    bool ok = std::abs(fields.mean()) <= mean_tol * mean_scale;
    const bool mean_ok = ok;

    auto os = open_out(fs::path(out_dir) / "covariogram.csv");
    os << "lag,empirical,analytic,abs_diff\n";
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const int c = static_cast<int>(k) + 1;
        double cov = 0.0;
        for (int r = 0; r < reps; ++r)
            cov += (fields(r, 0) - mu(0)) * (fields(r, c) - mu(c));
        cov /= (reps - 1);
        const double analytic = sigma_nu_sq * std::exp(-lags[k] / phi);
        const double diff = std::abs(cov - analytic);
        os << lags[k] << ',' << cov << ',' << analytic << ',' << diff << '\n';
        std::cout << "lag " << lags[k] << ": empirical " << cov << " analytic " << analytic
                  << " |diff| " << diff << (diff <= tol * scale ? "  ok" : "  EXCEEDED") << '\n';
        if (diff > tol * scale) ok = false;
    }
    std::cout << "field mean " << fields.mean() << (mean_ok ? "  ok" : "  EXCEEDED") << '\n';
    std::cout << (ok ? "spectral-check PASS" : "spectral-check FAIL") << '\n';
    return ok ? 0 : 3;
}

int cmd_sweep(const Config& cfg, const std::string& out_dir) {
    const std::uint64_t base_seed = cfg.get_u64("sweep", "seed", 0);
    const bool do_fit = cfg.get_bool("sweep", "fit", false);
    static const double snrs[] = {2, 3, 5, 10};
    static const double missings[] = {0.05, 0.10, 0.20};
    const fs::path out(out_dir);
    fs::create_directories(out);
    auto manifest = open_out(out / "sweep_manifest.csv");
    manifest << "dir,case,snr,missing,seed\n";
    int idx = 0;
    for (int case_id = 1; case_id <= 5; ++case_id)
        for (double snr : snrs)
            for (double missing : missings) {
                Config sub = cfg;
                std::ostringstream name;
                name << "case" << case_id << "_snr" << snr << "_miss"
                     << static_cast<int>(std::lround(missing * 100));
                const fs::path dir = out / name.str();
                const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(idx);
                sub.set("simulate", "case", std::to_string(case_id));
                sub.set("simulate", "snr", std::to_string(snr));
                sub.set("simulate", "missing", std::to_string(missing));
                sub.set("simulate", "seed", std::to_string(seed));
                if (!cfg.has("simulate", "n")) sub.set("simulate", "n", "1000");
                cmd_simulate(sub, dir.string());
                if (do_fit) {
                    sub.set("data", "bundle", dir.string());
                    sub.set("fit", "seed", std::to_string(seed + 1000000));
                    cmd_fit(sub, (dir / "fit").string());
                }
                manifest << name.str() << ',' << case_id << ',' << snr << ',' << missing << ','
                         << seed << '\n';
                ++idx;
            }
    std::cout << "sweep: " << idx << " settings written to " << out_dir << '\n';
    return 0;
}

}  // namespace esd
