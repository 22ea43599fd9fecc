#include "bqc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bqc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("invalid numeric value for " + key + ": '" + v + "'");
    }
}

void set_key(ParsedConfig& cfg, const std::string& key, const std::string& value, int line) {
    auto bad = [&](const std::string& msg) {
        throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
    };
    try {
        if (key == "beta") {
            cfg.sim.beta = parse_number(value, key);
            cfg.multipliers.set_beta(cfg.sim.beta);
        } else if (key == "epsilon")
            cfg.sim.epsilon = parse_number(value, key);
        else if (key == "s")
            cfg.multipliers.set_s(parse_number(value, key));
        else if (key == "lambda0")
            cfg.multipliers.lambda0 = parse_number(value, key);
        else if (key == "lambda_prime")
            cfg.multipliers.lambda_prime = parse_number(value, key);
        else if (key == "gamma")
            cfg.multipliers.set_gamma(parse_number(value, key));
        else if (key == "sigma_weight")
            cfg.multipliers.sigma = parse_number(value, key);
        else if (key == "q")
            cfg.multipliers.q = parse_number(value, key);
        else if (key == "kmax")
            cfg.sim.kmax = int(parse_number(value, key));
        else if (key == "nv")
            cfg.sim.nv = int(parse_number(value, key));
        else if (key == "lv")
            cfg.sim.lv = parse_number(value, key);
        else if (key == "dt")
            cfg.sim.dt = parse_number(value, key);
        else if (key == "t_end")
            cfg.sim.t_end = parse_number(value, key);
        else if (key == "dealias")
            cfg.sim.dealias = parse_number(value, key);
        else if (key == "preset")
            cfg.sim.preset = value;
        else if (key == "seed")
            cfg.sim.seed = std::stoull(value);
        else if (key == "out_dir")
            cfg.sim.out_dir = value;
        else if (key == "snapshot_every")
            cfg.sim.snapshot_every = parse_number(value, key);
        else if (key == "diag_every")
            cfg.sim.diag_every = parse_number(value, key);
        else
            bad("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    cfg.raw[key] = value;
}

void finalize(ParsedConfig& cfg) {
    // q defaults to its upper bound 1/4 + s/2 unless given explicitly
    if (!cfg.raw.count("q")) cfg.multipliers.q = 0.25 + 0.5 * cfg.multipliers.s;
    if (!(cfg.sim.beta > 0.5)) throw std::invalid_argument("beta must exceed 1/2");
    cfg.sim.validate();
    cfg.multipliers.set_beta(cfg.sim.beta);
    cfg.multipliers.validate();
}

} // namespace

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        set_key(cfg, key, value, lineno);
    }
    finalize(cfg);
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(ParsedConfig& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value, 0);
    finalize(cfg);
}

std::string format_double(double v, int max_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", max_digits, v);
    return buf;
}

std::string config_echo(const ParsedConfig& cfg) {
    std::ostringstream out;
    out << "beta = " << format_double(cfg.sim.beta) << "\n";
    out << "epsilon = " << format_double(cfg.sim.epsilon) << "\n";
    out << "s = " << format_double(cfg.multipliers.s) << "\n";
    out << "lambda0 = " << format_double(cfg.multipliers.lambda0) << "\n";
    out << "lambda_prime = " << format_double(cfg.multipliers.lambda_prime) << "\n";
    out << "gamma = " << format_double(cfg.multipliers.gamma) << "\n";
    out << "sigma_weight = " << format_double(cfg.multipliers.sigma) << "\n";
    out << "q = " << format_double(cfg.multipliers.q) << "\n";
    out << "kmax = " << cfg.sim.kmax << "\n";
    out << "nv = " << cfg.sim.nv << "\n";
    out << "lv = " << format_double(cfg.sim.lv) << "\n";
    out << "dt = " << format_double(cfg.sim.dt) << "\n";
    out << "t_end = " << format_double(cfg.sim.t_end) << "\n";
    out << "dealias = " << format_double(cfg.sim.dealias) << "\n";
    out << "preset = " << cfg.sim.preset << "\n";
    out << "seed = " << cfg.sim.seed << "\n";
    out << "out_dir = " << cfg.sim.out_dir << "\n";
    out << "snapshot_every = " << format_double(cfg.sim.snapshot_every) << "\n";
    out << "diag_every = " << format_double(cfg.sim.diag_every) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

const char* kDiagCsvVersion = "bqc-diagnostics-v1";

void write_diagnostics_csv(const std::vector<DiagRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# schema: " << kDiagCsvVersion << "\n";
    out << "t,l2_omega_neq,l2_gradtheta_neq,l2_ux_neq,l2_uy_neq,l2_theta_neq,"
           "E_L,E_n,E_v,G_lambda_Z,G_w_Z,G_m_Z,G_lambda_Q,G_w_Q,G_m_Q,"
           "vdot_gnorm,enstrophy,energy_quad,flux_integral,flux_inst\n";
    for (const DiagRow& r : rows) {
        out << format_double(r.t) << ',' << format_double(r.l2_omega_neq) << ','
            << format_double(r.l2_gradtheta_neq) << ',' << format_double(r.l2_ux_neq) << ','
            << format_double(r.l2_uy_neq) << ',' << format_double(r.l2_theta_neq) << ','
            << format_double(r.E_L) << ',' << format_double(r.E_n) << ','
            << format_double(r.E_v) << ',' << format_double(r.G_lambda_Z) << ','
            << format_double(r.G_w_Z) << ',' << format_double(r.G_m_Z) << ','
            << format_double(r.G_lambda_Q) << ',' << format_double(r.G_w_Q) << ','
            << format_double(r.G_m_Q) << ',' << format_double(r.vdot_gnorm) << ','
            << format_double(r.enstrophy) << ',' << format_double(r.energy_quad) << ','
            << format_double(r.flux_integral) << ',' << format_double(r.flux_inst) << "\n";
    }
}

std::vector<DiagRow> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<DiagRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { // column header
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() < 20) throw std::runtime_error("malformed diagnostics row in " + path);
        DiagRow r;
        r.t = vals[0];
        r.l2_omega_neq = vals[1];
        r.l2_gradtheta_neq = vals[2];
        r.l2_ux_neq = vals[3];
        r.l2_uy_neq = vals[4];
        r.l2_theta_neq = vals[5];
        r.E_L = vals[6];
        r.E_n = vals[7];
        r.E_v = vals[8];
        r.G_lambda_Z = vals[9];
        r.G_w_Z = vals[10];
        r.G_m_Z = vals[11];
        r.G_lambda_Q = vals[12];
        r.G_w_Q = vals[13];
        r.G_m_Q = vals[14];
        r.vdot_gnorm = vals[15];
        r.enstrophy = vals[16];
        r.energy_quad = vals[17];
        r.flux_integral = vals[18];
        r.flux_inst = vals[19];
        rows.push_back(r);
    }
    return rows;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& footer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
    for (const std::string& f : footer) out << f << "\n";
}

// ---------------------------------------------------------------------------
// Snapshots
// ---------------------------------------------------------------------------

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                          (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
    static_assert(sizeof(double) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void write_snapshot(const SolverState& state, const SimConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const GridSpec& g = state.omega.grid;
    out.write("BQC1", 4);
    put_u32(out, std::uint32_t(g.kmax));
    put_u32(out, std::uint32_t(g.nv));
    put_u32(out, 1u); // flags: bit0 = little-endian payload
    put_u32(out, 0u); // reserved
    put_f64(out, state.t);
    put_f64(out, g.lv);
    put_f64(out, cfg.beta);
    put_f64(out, cfg.epsilon);
    for (const SpectralField* f : {&state.omega, &state.theta}) {
        for (int k = -g.kmax; k <= g.kmax; ++k) {
            for (int n = -g.nv / 2; n < g.nv / 2; ++n) {
                const cplx c = f->at(k, n);
                put_f64(out, c.real());
                put_f64(out, c.imag());
            }
        }
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "BQC1", 4) != 0)
        throw std::runtime_error("snapshot magic mismatch: " + path);
    const std::uint32_t kmax = get_u32(in);
    const std::uint32_t nv = get_u32(in);
    const std::uint32_t flags = get_u32(in);
    (void)get_u32(in); // reserved
    if (flags != 1u)
        throw std::runtime_error("snapshot byte order not little-endian (flags=" +
                                 std::to_string(flags) + "): " + path);
    if (kmax < 1 || kmax > 65535 || nv < 2 || nv > (1u << 20) || nv % 2 != 0)
        throw std::runtime_error("snapshot dimension overflow: " + path);
    Snapshot snap;
    snap.state.t = get_f64(in);
    snap.lv = get_f64(in);
    snap.beta = get_f64(in);
    snap.epsilon = get_f64(in);
    GridSpec g;
    g.kmax = int(kmax);
    g.nv = int(nv);
    g.lv = snap.lv;
    snap.state.omega = SpectralField(g);
    snap.state.theta = SpectralField(g);
    for (SpectralField* f : {&snap.state.omega, &snap.state.theta}) {
        for (int k = -g.kmax; k <= g.kmax; ++k) {
            for (int n = -g.nv / 2; n < g.nv / 2; ++n) {
                const double re = get_f64(in);
                const double im = get_f64(in);
                f->at(k, n) = cplx(re, im);
            }
        }
    }
    if (!in) throw std::runtime_error("truncated snapshot: " + path);
    return snap;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {
const char* kConfigMarker = "--- config echo ---";
}

void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# bqc run manifest\n";
    out << "version = " << m.version << "\n";
    out << "seed = " << m.seed << "\n";
    out << "wall_time_seconds = " << format_double(m.wall_time_seconds, 6) << "\n";
    out << "guard_horizon = " << format_double(m.guard_horizon) << "\n";
    out << "guard_exceeded = " << (m.guard_exceeded ? 1 : 0) << "\n";
    out << "wraparound_max = " << format_double(m.wraparound_max) << "\n";
    out << "cfl_worst = " << format_double(m.cfl_worst) << "\n";
    out << "outputs =";
    for (const auto& o : m.outputs) out << " " << o;
    out << "\n" << kConfigMarker << "\n" << m.config_echo_text;
}

std::string read_manifest_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line, config;
    bool in_config = false;
    while (std::getline(in, line)) {
        if (in_config)
            config += line + "\n";
        else if (line == kConfigMarker)
            in_config = true;
    }
    if (!in_config) throw std::runtime_error("no config echo in manifest: " + path);
    return config;
}

} // namespace bqc
