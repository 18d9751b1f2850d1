#include "cavsim/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cavsim::io {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

json to_json(const FieldState& s) {
    json j;
    j["dim"] = s.dim();
    std::vector<double> re(s.dim()), im(s.dim());
    for (int n = 0; n < s.dim(); ++n) {
        re[n] = s.amps[n].real();
        im[n] = s.amps[n].imag();
    }
    j["re"] = re;
    j["im"] = im;
    j["leak"] = s.leak;
    return j;
}

FieldState field_state_from_json(const json& j) {
    const int d = j.at("dim").get<int>();
    FieldState s;
    s.amps = Vec::Zero(d);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
        throw std::domain_error("field state json: length mismatch");
    for (int n = 0; n < d; ++n)
        s.amps[n] = Complex(re[n].get<double>(), im[n].get<double>());
    s.leak = j.value("leak", 0.0);
    return s;
}

json to_json(double t, const DensityMatrix& r) {
    json j;
    j["t"] = t;
    j["dim"] = r.dim();
    std::vector<std::vector<double>> re(r.dim()), im(r.dim());
    for (int m = 0; m < r.dim(); ++m) {
        re[m].resize(r.dim());
        im[m].resize(r.dim());
        for (int n = 0; n < r.dim(); ++n) {
            re[m][n] = r.rho(m, n).real();
            im[m][n] = r.rho(m, n).imag();
        }
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

DensityMatrix density_from_json(const json& j) {
    const int d = j.at("dim").get<int>();
    DensityMatrix r;
    r.rho = Mat::Zero(d, d);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            r.rho(m, n) = Complex(re[m][n].get<double>(), im[m][n].get<double>());
    return r;
}

std::string master_csv(const std::vector<MasterSnapshot>& snaps) {
    std::string out = "t,n_mean,var_x1,var_x2\n";
    for (const auto& s : snaps) {
        // Quadrature variances of the mixed state from first/second moments.
        const Mat& rho = s.rho.rho;
        const int d = s.rho.dim();
        Complex a = 0.0, a2 = 0.0;
        double n = 0.0;
        for (int m = 0; m < d; ++m) {
            if (m + 1 < d) a += std::sqrt(double(m + 1)) * rho(m + 1, m);
            if (m + 2 < d) a2 += std::sqrt(double((m + 1) * (m + 2))) * rho(m + 2, m);
            n += m * rho(m, m).real();
        }
        const double x1sq = 0.25 * (2.0 * a2.real() + 2.0 * n + 1.0);
        const double x2sq = 0.25 * (-2.0 * a2.real() + 2.0 * n + 1.0);
        const double var_x1 = x1sq - a.real() * a.real();
        const double var_x2 = x2sq - a.imag() * a.imag();
        out += fmt(s.t) + "," + fmt(n) + "," + fmt(var_x1) + "," + fmt(var_x2) + "\n";
    }
    return out;
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
    std::string out = "t,n_mean,q1,q2,var_x1,var_x2\n";
    for (const SamplePoint& s : rec.samples)
        out += fmt(s.t) + "," + fmt(s.n_mean) + "," + fmt(s.q1) + "," + fmt(s.q2) + "," +
               fmt(s.var_x1) + "," + fmt(s.var_x2) + "\n";
    return out;
}

json trajectory_sidecar(const TrajectoryRecord& rec) {
    json j;
    j["engine"] = rec.engine;
    j["seed"] = rec.seed;
    json events = json::array();
    for (const JumpEvent& e : rec.events)
        events.push_back({{"time", e.time}, {"kind", e.kind == JumpKind::down ? "down" : "up"}});
    j["events"] = events;
    if (!rec.atom_events.empty()) {
        json atoms = json::array();
        for (const AtomEvent& e : rec.atom_events)
            atoms.push_back({{"index", e.index},
                             {"prep", e.prep},
                             {"detected", e.detected},
                             {"flipped", e.flipped}});
        j["atom_events"] = atoms;
    }
    if (rec.abort_reason) j["abort_reason"] = *rec.abort_reason;
    return j;
}

std::string qgrid_csv(const QGrid& g) {
    std::string out = "re_axis";
    for (int i = 0; i < g.re_axis.size(); ++i) out += "," + fmt(g.re_axis[i]);
    out += "\nim_axis";
    for (int j = 0; j < g.im_axis.size(); ++j) out += "," + fmt(g.im_axis[j]);
    out += "\n";
    for (int j = 0; j < g.im_axis.size(); ++j) {
        out += fmt(g.im_axis[j]);
        for (int i = 0; i < g.re_axis.size(); ++i) out += "," + fmt(g.values(i, j));
        out += "\n";
    }
    return out;
}

std::string pmf_csv(const std::vector<double>& pmf, double nbar) {
    std::string out = "n,p_empirical,p_bose_einstein\n";
    for (std::size_t n = 0; n < pmf.size(); ++n)
        out += std::to_string(n) + "," + fmt(pmf[n]) + "," +
               fmt(bose_einstein_pmf(nbar, static_cast<int>(n))) + "\n";
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                bool no_clobber) {
    if (no_clobber && std::filesystem::exists(path))
        throw std::runtime_error("refusing to overwrite " + path.string());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << content;
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& files,
                    const std::string& config_hash) {
    json j;
    j["config_hash"] = config_hash;
    json list = json::array();
    for (const auto& p : files) {
        std::ifstream f(dir / p, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
        list.push_back({{"path", p.generic_string()},
                        {"bytes", bytes.size()},
                        {"fnv1a64", fnv1a_hex(bytes)}});
    }
    j["files"] = list;
    write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace cavsim::io
