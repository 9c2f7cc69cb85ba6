#include "morseid/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace morseid {

using json = nlohmann::ordered_json;

static void gen_monomials(int dims_left, int total, std::vector<int>& prefix,
                          std::vector<std::vector<int>>& out) {
    if (dims_left == 1) {
        prefix.push_back(total);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = total; e >= 0; --e) {
        prefix.push_back(e);
        gen_monomials(dims_left - 1, total - e, prefix, out);
        prefix.pop_back();
    }
}

PolyBasis make_poly_basis(int dimension, int degree) {
    if (dimension < 1) throw ConfigError("basis dimension must be positive");
    if (degree < 0) throw ConfigError("basis degree must be nonnegative");
    PolyBasis basis;
    basis.dimension = dimension;
    basis.degree = degree;
    std::vector<int> prefix;
    for (int t = 0; t <= degree; ++t) gen_monomials(dimension, t, prefix, basis.monomials);
    return basis;
}

Vector poly_features(const PolyBasis& basis, const Vector& x) {
    if (x.size() != basis.dimension)
        throw ConfigError("poly_features: state dimension does not match basis");
    Vector phi(basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        double v = 1.0;
        for (int d = 0; d < basis.dimension; ++d)
            for (int e = 0; e < basis.monomials[i][d]; ++e) v *= x[d];
        phi[i] = v;
    }
    return phi;
}

Vector SwitchingClassifier::scores(const Vector& x) const {
    return weights * poly_features(basis, x) + offsets;
}

int SwitchingClassifier::predict(const Vector& x) const {
    const Vector s = scores(x);
    int best = 0;
    for (int j = 1; j < s.size(); ++j)
        if (s[j] > s[best]) best = j;
    return best;
}

Vector SwitchingClassifier::one_hot(const Vector& x) const {
    Vector v = Vector::Zero(weights.rows());
    v[predict(x)] = 1.0;
    return v;
}

int SwitchingModel::mode_of(const Vector& x) const {
    if (K == 1) return 0;
    if (!classifier) throw NumericalError("switching model has no fitted classifier");
    return classifier->predict(x);
}

Vector SwitchingModel::eval(const Vector& x) const {
    return coeffs[mode_of(x)] * poly_features(basis, x);
}

static double heaviside(double s) { return s >= 0.0 ? 1.0 : 0.0; }

Vector ToggleSwitch::eval(const Vector& x) const {
    Vector b(2);
    b[0] = low[0] + heaviside(threshold[1] - x[1]) * (high[0] - low[0]);
    b[1] = low[1] + heaviside(threshold[0] - x[0]) * (high[1] - low[1]);
    return b - gamma.cwiseProduct(x);
}

Vector PiecewiseVanDerPol::eval(const Vector& x) const {
    const double g = std::abs(x[0]) < 1.0 ? x[0] * x[0] * x[0] : x[0];
    Vector dx(2);
    dx[0] = x[1];
    dx[1] = (1.0 - x[0] * x[0]) * x[1] - g;
    return dx;
}

Vector eval_field(const VectorField& field, const Vector& x) {
    return std::visit([&](const auto& f) { return f.eval(x); }, field);
}

int field_dim(const VectorField& field) {
    if (std::holds_alternative<SwitchingModel>(field)) return std::get<SwitchingModel>(field).n;
    return 2;
}

Vector integrate(const VectorField& field, const Vector& x0, double tau, double h) {
    if (!(tau > 0.0)) throw ConfigError("integrate: tau must be positive");
    if (!(h > 0.0)) throw ConfigError("integrate: step must be positive");
    const int steps = static_cast<int>(std::ceil(tau / h - 1e-12));
    Vector x = x0;
    for (int s = 0; s < steps; ++s) {
        const double dt = (s + 1 == steps) ? tau - s * h : h;
        const Vector k1 = eval_field(field, x);
        const Vector k2 = eval_field(field, x + 0.5 * dt * k1);
        const Vector k3 = eval_field(field, x + 0.5 * dt * k2);
        const Vector k4 = eval_field(field, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite())
            throw IntegrationDiverged("integration diverged to a non-finite state", x0);
    }
    return x;
}

TrajectoryDataset simulate_trajectories(const VectorField& field, int count, double horizon,
                                        double sample_dt, const Box& domain, std::uint64_t seed,
                                        double h) {
    if (count < 1) throw ConfigError("simulate: trajectory count must be >= 1");
    if (horizon < 0.0) throw ConfigError("simulate: horizon must be nonnegative");
    if (!(sample_dt > 0.0)) throw ConfigError("simulate: sample_dt must be positive");
    const int n = field_dim(field);
    const int per_traj = static_cast<int>(std::floor(horizon / sample_dt + 1e-9)) + 1;

    TrajectoryDataset data;
    data.dim = n;
    for (int id = 0; id < count; ++id) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(id)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Vector x(n);
        for (int d = 0; d < n; ++d)
            x[d] = domain.lower[d] + unit(rng) * (domain.upper[d] - domain.lower[d]);
        for (int k = 0; k < per_traj; ++k) {
            if (!domain.contains(x)) break;  // truncate from the first escaping sample
            TrajectorySample s;
            s.traj_id = id;
            s.t = k * sample_dt;
            s.x = x;
            s.xdot = eval_field(field, x);
            data.samples.push_back(std::move(s));
            if (k + 1 == per_traj) break;
            try {
                x = integrate(field, x, sample_dt, h);
            } catch (const IntegrationDiverged&) {
                break;
            }
        }
    }
    if (data.samples.empty()) throw NumericalError("simulation produced an empty dataset");
    return data;
}

std::string dataset_to_csv(const TrajectoryDataset& data) {
    std::ostringstream out;
    out << "traj_id,t";
    for (int d = 1; d <= data.dim; ++d) out << ",x" << d;
    for (int d = 1; d <= data.dim; ++d) out << ",dx" << d;
    out << "\n";
    for (const auto& s : data.samples) {
        out << s.traj_id << "," << format_double(s.t);
        for (int d = 0; d < data.dim; ++d) out << "," << format_double(s.x[d]);
        for (int d = 0; d < data.dim; ++d) out << "," << format_double(s.xdot[d]);
        out << "\n";
    }
    return out.str();
}

TrajectoryDataset dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("dataset CSV is empty");
    int n = 0;
    {
        std::stringstream header(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(header, col, ',')) cols.push_back(col);
        if (cols.size() < 4 || cols[0] != "traj_id" || cols[1] != "t")
            throw IoError("dataset CSV header malformed");
        n = static_cast<int>((cols.size() - 2) / 2);
    }
    TrajectoryDataset data;
    data.dim = n;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != 2 + 2 * n)
            throw IoError("dataset CSV row has wrong arity");
        TrajectorySample s;
        s.traj_id = static_cast<int>(vals[0]);
        s.t = vals[1];
        s.x = Eigen::Map<Vector>(vals.data() + 2, n);
        s.xdot = Eigen::Map<Vector>(vals.data() + 2 + n, n);
        data.samples.push_back(std::move(s));
    }
    return data;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << contents;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename failed for " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_dataset_csv(const std::string& path, const TrajectoryDataset& data) {
    write_file_atomic(path, dataset_to_csv(data));
}

TrajectoryDataset read_dataset_csv(const std::string& path) {
    return dataset_from_csv(read_file(path));
}

std::string model_to_json(const SwitchingModel& model) {
    json j;
    j["n"] = model.n;
    j["K"] = model.K;
    j["degree"] = model.basis.degree;
    j["monomial_order"] = model.basis.monomials;
    json coeffs = json::array();
    for (const auto& C : model.coeffs) {
        json flat = json::array();
        for (int r = 0; r < C.rows(); ++r)
            for (int c = 0; c < C.cols(); ++c) flat.push_back(C(r, c));
        coeffs.push_back(std::move(flat));
    }
    j["coeffs"] = std::move(coeffs);
    if (model.classifier) {
        const auto& cl = *model.classifier;
        json jc;
        jc["degree"] = cl.basis.degree;
        json w = json::array();
        for (int r = 0; r < cl.weights.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < cl.weights.cols(); ++c) row.push_back(cl.weights(r, c));
            w.push_back(std::move(row));
        }
        jc["weights"] = std::move(w);
        jc["offsets"] = std::vector<double>(cl.offsets.data(), cl.offsets.data() + cl.offsets.size());
        j["classifier"] = std::move(jc);
    } else {
        j["classifier"] = nullptr;
    }
    j["eta"] = model.eta;
    j["provenance"] = model.provenance;
    return j.dump(2) + "\n";
}

SwitchingModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    SwitchingModel model;
    model.n = j.at("n").get<int>();
    model.K = j.at("K").get<int>();
    model.basis = make_poly_basis(model.n, j.at("degree").get<int>());
    const auto order = j.at("monomial_order").get<std::vector<std::vector<int>>>();
    if (order != model.basis.monomials)
        throw IoError("model monomial_order does not match graded-lex convention");
    const int p = model.basis.size();
    for (const auto& flat : j.at("coeffs")) {
        if (static_cast<int>(flat.size()) != model.n * p)
            throw IoError("model coeffs block has wrong size");
        Matrix C(model.n, p);
        int k = 0;
        for (int r = 0; r < model.n; ++r)
            for (int c = 0; c < p; ++c) C(r, c) = flat[k++].get<double>();
        model.coeffs.push_back(std::move(C));
    }
    if (static_cast<int>(model.coeffs.size()) != model.K)
        throw IoError("model coeffs count does not match K");
    if (!j.at("classifier").is_null()) {
        const auto& jc = j.at("classifier");
        SwitchingClassifier cl;
        cl.basis = make_poly_basis(model.n, jc.at("degree").get<int>());
        const auto w = jc.at("weights").get<std::vector<std::vector<double>>>();
        const auto off = jc.at("offsets").get<std::vector<double>>();
        cl.weights.resize(static_cast<int>(w.size()), cl.basis.size());
        for (int r = 0; r < cl.weights.rows(); ++r) {
            if (static_cast<int>(w[r].size()) != cl.basis.size())
                throw IoError("classifier weight row has wrong size");
            for (int c = 0; c < cl.weights.cols(); ++c) cl.weights(r, c) = w[r][c];
        }
        cl.offsets = Eigen::Map<const Vector>(off.data(), static_cast<int>(off.size()));
        model.classifier = std::move(cl);
    }
    model.eta = j.at("eta").get<double>();
    model.provenance = j.at("provenance").get<std::string>();
    return model;
}

void write_model_json(const std::string& path, const SwitchingModel& model) {
    write_file_atomic(path, model_to_json(model));
}

SwitchingModel read_model_json(const std::string& path) {
    return model_from_json(read_file(path));
}

}  // namespace morseid
