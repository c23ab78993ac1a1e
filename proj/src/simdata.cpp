#include "esd/simdata.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace esd {

void SimSpec::validate() const {
    if (case_id < 1 || case_id > 5) throw std::invalid_argument("SimSpec: case must be in 1..5");
    if (n < 2) throw std::invalid_argument("SimSpec: n must be >= 2");
    if (!(snr > 0.0)) throw std::invalid_argument("SimSpec: snr must be > 0");
    if (missing_pct < 0.0 || missing_pct >= 1.0)
        throw std::invalid_argument("SimSpec: missing_pct must be in [0,1)");
    if (!(phi_zeta > 0.0)) throw std::invalid_argument("SimSpec: phi_zeta must be > 0");
}

double friedman_f0(const Eigen::Matrix<double, 5, 1>& x) {
    return 10.0 * std::sin(M_PI * x(0) * x(1)) + 20.0 * (x(2) - 0.5) * (x(2) - 0.5) +
           10.0 * x(3) + 5.0 * x(4);
}

namespace {

double sample_var(const Eigen::VectorXd& v) {
    const double mu = v.mean();
    return (v.array() - mu).square().sum() / (v.size() - 1);
}

}  // namespace

Eigen::VectorXd gen_zeta(int n, double sigma_zeta_sq, double phi_zeta, RngStream& rng) {
    if (n < 1 || n > 5000) throw std::invalid_argument("gen_zeta: n must be in 1..5000");
    if (!(sigma_zeta_sq > 0.0)) throw std::invalid_argument("gen_zeta: variance must be > 0");
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = std::abs(i - j) / static_cast<double>(n);
            R(i, j) = sigma_zeta_sq * std::exp(-phi_zeta * d);
        }
    R.diagonal().array() += 1e-10 * sigma_zeta_sq;
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gen_zeta: kernel matrix not PD after jitter");
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    return llt.matrixL() * z;
}

double noise_variance_for_snr(const Eigen::VectorXd& Y, double snr) {
    if (Y.size() < 2) throw std::invalid_argument("noise_variance_for_snr: need >= 2 values");
    if (!(snr > 0.0)) throw std::invalid_argument("noise_variance_for_snr: snr must be > 0");
    return sample_var(Y) / snr;
}

Dataset gen_case(const SimSpec& spec, RngStream& rng) {
    spec.validate();
    const int m = spec.n;
    static const double wf_tab[] = {1.0, 0.85, 0.5, 0.15, 0.0};
    const double wf = wf_tab[spec.case_id - 1];
    const double wz = 1.0 - wf;

    Eigen::MatrixXd xs(m, 5);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < 5; ++j) xs(i, j) = rng.uniform01();

    Eigen::VectorXd f(m);
    for (int i = 0; i < m; ++i) {
        Eigen::Matrix<double, 5, 1> row = xs.row(i).transpose();
        f(i) = friedman_f0(row);
    }

    Eigen::VectorXd Y = wf * f;
    if (wz > 0.0) {
        const double sigma_zeta_sq = sample_var(f);
        Y += wz * gen_zeta(m, sigma_zeta_sq, spec.phi_zeta, rng);
    }

    const double sigma_eps_sq = sample_var(Y) / spec.snr;
    const double sd_eps = std::sqrt(sigma_eps_sq);
    Eigen::VectorXd Z_full(m);
    for (int i = 0; i < m; ++i) Z_full(i) = Y(i) + sd_eps * rng.normal();

    // drop round(missing_pct*m) indices uniformly at random
    const int n_miss = static_cast<int>(std::lround(spec.missing_pct * m));
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < n_miss; ++i) {
        const int j = i + static_cast<int>(rng.uniform01() * (m - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(std::min(j, m - 1))]);
    }
    std::vector<int> observed(idx.begin() + n_miss, idx.end());
    std::sort(observed.begin(), observed.end());

    Dataset data;
    data.locations.reserve(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) data.locations.emplace_back(static_cast<double>(i) / m);
    data.observed_idx = observed;
    // design excludes x2
    data.X_pred.resize(m, 4);
    data.X_pred.col(0) = xs.col(0);
    data.X_pred.col(1) = xs.col(2);
    data.X_pred.col(2) = xs.col(3);
    data.X_pred.col(3) = xs.col(4);
    const int n_obs = static_cast<int>(observed.size());
    data.X.resize(n_obs, 4);
    data.Z.resize(n_obs);
    for (int row = 0; row < n_obs; ++row) {
        data.X.row(row) = data.X_pred.row(observed[static_cast<std::size_t>(row)]);
        data.Z(row) = Z_full(observed[static_cast<std::size_t>(row)]);
    }
    data.truth = Y;
    data.validate();
    return data;
}

// --- CSV ingestion -------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) {
        // trim surrounding whitespace
        const auto a = cur.find_first_not_of(" \t\r");
        const auto b = cur.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? std::string() : cur.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& tok, int line_no, const std::string& col) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": cannot parse '" + tok +
                                 "' in column " + col);
    }
    if (pos != tok.size())
        throw std::invalid_argument("line " + std::to_string(line_no) + ": trailing characters in '" +
                                 tok + "' in column " + col);
    if (!std::isfinite(v))
        throw std::invalid_argument("line " + std::to_string(line_no) + ": non-finite value in column " +
                                 col);
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    if (schema.coord_columns.empty() || schema.coord_columns.size() > 2)
        throw std::invalid_argument("load_csv: schema needs 1 or 2 coordinate columns");
    if (schema.value_column.empty())
        throw std::invalid_argument("load_csv: schema needs a value column");
    if (schema.holdout_fraction < 0.0 || schema.holdout_fraction >= 1.0)
        throw std::invalid_argument("load_csv: holdout fraction must be in [0,1)");
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("load_csv: empty file " + path);
    const auto header = split_csv_line(line);
    const int d = static_cast<int>(schema.coord_columns.size());
    std::vector<int> coord_pos;
    int value_pos = -1;
    for (const auto& name : schema.coord_columns) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::invalid_argument("load_csv: column '" + name + "' not in header");
        coord_pos.push_back(static_cast<int>(it - header.begin()));
    }
    {
        const auto it = std::find(header.begin(), header.end(), schema.value_column);
        if (it == header.end())
            throw std::invalid_argument("load_csv: column '" + schema.value_column + "' not in header");
        value_pos = static_cast<int>(it - header.begin());
    }

    std::vector<Location> locs;
    std::vector<double> vals;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto toks = split_csv_line(line);
        if (toks.size() < header.size())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(toks.size()));
        double c[2] = {0.0, 0.0};
        for (int k = 0; k < d; ++k)
            c[k] = parse_double(toks[static_cast<std::size_t>(coord_pos[static_cast<std::size_t>(k)])],
                                line_no, schema.coord_columns[static_cast<std::size_t>(k)]);
        vals.push_back(parse_double(toks[static_cast<std::size_t>(value_pos)], line_no,
                                    schema.value_column));
        locs.push_back(d == 1 ? Location(c[0]) : Location(c[0], c[1]));
    }
    const int m = static_cast<int>(locs.size());
    if (m == 0) throw std::invalid_argument("load_csv: no data rows in " + path);

    // seeded holdout: held-out rows stay as prediction targets only
    const int n_hold = static_cast<int>(std::lround(schema.holdout_fraction * m));
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    if (n_hold > 0) {
        RngStream hrng(schema.holdout_seed);
        for (int i = 0; i < n_hold; ++i) {
            const int j = i + static_cast<int>(hrng.uniform01() * (m - i));
            std::swap(idx[static_cast<std::size_t>(i)],
                      idx[static_cast<std::size_t>(std::min(j, m - 1))]);
        }
    }
    std::vector<int> observed(idx.begin() + n_hold, idx.end());
    std::sort(observed.begin(), observed.end());

    Dataset data;
    data.locations = std::move(locs);
    data.observed_idx = observed;
    data.X_pred = Eigen::MatrixXd::Ones(m, 1);  // intercept-only default design
    const int n_obs = static_cast<int>(observed.size());
    data.X = Eigen::MatrixXd::Ones(n_obs, 1);
    data.Z.resize(n_obs);
    for (int row = 0; row < n_obs; ++row) data.Z(row) = vals[static_cast<std::size_t>(observed[static_cast<std::size_t>(row)])];
    data.truth = Eigen::Map<Eigen::VectorXd>(vals.data(), m);
    data.validate();
    return data;
}

// --- bundle round trip ---------------------------------------------------

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw std::invalid_argument("save_bundle: cannot write " + p.string());
    os << std::setprecision(17);
    return os;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw std::invalid_argument("load_bundle: cannot read " + p.string());
    return is;
}

}  // namespace

void save_bundle(const Dataset& data, const std::string& dir,
                 const std::map<std::string, std::string>& meta) {
    data.validate();
    fs::create_directories(dir);
    const fs::path root(dir);
    const int m = data.m();
    const int d = data.dim();

    {
        auto os = open_out(root / "locations.csv");
        os << (d == 1 ? "s1\n" : "s1,s2\n");
        for (const auto& s : data.locations) {
            os << s[0];
            if (d == 2) os << ',' << s[1];
            os << '\n';
        }
    }
    {
        auto os = open_out(root / "z.csv");
        os << "z\n";
        for (Eigen::Index i = 0; i < data.Z.size(); ++i) os << data.Z(i) << '\n';
    }
    {
        auto os = open_out(root / "x.csv");
        for (int j = 0; j < data.p(); ++j) os << (j ? "," : "") << "x" << (j + 1);
        os << '\n';
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < data.p(); ++j) os << (j ? "," : "") << data.X_pred(i, j);
            os << '\n';
        }
    }
    {
        auto os = open_out(root / "mask.csv");
        os << "observed\n";
        std::vector<int> flag(static_cast<std::size_t>(m), 0);
        for (int idx : data.observed_idx) flag[static_cast<std::size_t>(idx)] = 1;
        for (int i = 0; i < m; ++i) os << flag[static_cast<std::size_t>(i)] << '\n';
    }
    if (data.has_truth()) {
        auto os = open_out(root / "truth.csv");
        os << "y\n";
        for (int i = 0; i < m; ++i) os << data.truth(i) << '\n';
    }
    {
        auto os = open_out(root / "meta");
        for (const auto& [k, v] : meta) os << k << '=' << v << '\n';
    }
}

Dataset load_bundle(const std::string& dir) {
    const fs::path root(dir);
    Dataset data;
    {
        auto is = open_in(root / "locations.csv");
        std::string line;
        std::getline(is, line);
        const int d = static_cast<int>(split_csv_line(line).size());
        if (d != 1 && d != 2) throw std::invalid_argument("load_bundle: bad locations header");
        int line_no = 1;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            ++line_no;
            const auto toks = split_csv_line(line);
            const double a = parse_double(toks.at(0), line_no, "s1");
            if (d == 1)
                data.locations.emplace_back(a);
            else
                data.locations.emplace_back(a, parse_double(toks.at(1), line_no, "s2"));
        }
    }
    const int m = static_cast<int>(data.locations.size());
    {
        auto is = open_in(root / "mask.csv");
        std::string line;
        std::getline(is, line);
        int i = 0;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            if (i >= m) throw std::invalid_argument("load_bundle: mask longer than locations");
            if (line.find('1') != std::string::npos) data.observed_idx.push_back(i);
            ++i;
        }
        if (i != m) throw std::invalid_argument("load_bundle: mask/location length mismatch");
    }
    {
        auto is = open_in(root / "x.csv");
        std::string line;
        std::getline(is, line);
        const int p = static_cast<int>(split_csv_line(line).size());
        data.X_pred.resize(m, p);
        int i = 0, line_no = 1;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            ++line_no;
            if (i >= m) throw std::invalid_argument("load_bundle: x.csv longer than locations");
            const auto toks = split_csv_line(line);
            for (int j = 0; j < p; ++j)
                data.X_pred(i, j) = parse_double(toks.at(static_cast<std::size_t>(j)), line_no, "x");
            ++i;
        }
        if (i != m) throw std::invalid_argument("load_bundle: x.csv/location length mismatch");
    }
    {
        auto is = open_in(root / "z.csv");
        std::string line;
        std::getline(is, line);
        std::vector<double> z;
        int line_no = 1;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            ++line_no;
            z.push_back(parse_double(line, line_no, "z"));
        }
        data.Z = Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    }
    const int n = data.n();
    data.X.resize(n, data.X_pred.cols());
    for (int row = 0; row < n; ++row)
        data.X.row(row) = data.X_pred.row(data.observed_idx[static_cast<std::size_t>(row)]);
    if (fs::exists(root / "truth.csv")) {
        auto is = open_in(root / "truth.csv");
        std::string line;
        std::getline(is, line);
        std::vector<double> y;
        int line_no = 1;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            ++line_no;
            y.push_back(parse_double(line, line_no, "y"));
        }
        data.truth = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    }
    data.validate();
    return data;
}

std::map<std::string, std::string> load_bundle_meta(const std::string& dir) {
    auto is = open_in(fs::path(dir) / "meta");
    std::map<std::string, std::string> meta;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("load_bundle_meta: bad line: " + line);
        meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return meta;
}

}  // namespace esd
