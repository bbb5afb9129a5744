#include "qcm/integrals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qcm {

namespace {

constexpr double kStoreZeroTol = 1e-14;  // entries below this are stored as exact zeros
constexpr double kDupTol = 1e-12;

struct Namelist {
    std::map<std::string, std::string> keys;
    int body_start_line = 0;
};

// Reads the "&NAME key=val,... /" (or "&END") header. Keys are
// case-insensitive; list values keep their commas consumed by the caller.
Namelist parse_namelist(std::istream& in) {
    Namelist nl;
    std::string header;
    std::string line;
    int lineno = 0;
    bool begun = false, done = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (!begun) {
            if (t[0] != '&') throw ParseError("expected namelist header starting with '&'", lineno);
            begun = true;
            // drop the "&FCI"/"&DIP" tag
            size_t sp = t.find_first_of(" \t");
            t = (sp == std::string::npos) ? "" : t.substr(sp + 1);
        }
        // terminator may share a line with keys
        size_t endpos = std::string::npos;
        std::string up = t;
        for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        size_t amp = up.find("&END");
        size_t slash = t.find('/');
        if (amp != std::string::npos) endpos = amp;
        if (slash != std::string::npos && (endpos == std::string::npos || slash < endpos))
            endpos = slash;
        if (endpos != std::string::npos) {
            t = t.substr(0, endpos);
            done = true;
        }
        header += " " + t;
        if (done) break;
    }
    if (!begun || !done) throw ParseError("unterminated namelist header (expected '/' or '&END')", lineno);
    nl.body_start_line = lineno;

    // split "KEY=VAL" pairs; list values (e.g. ORBSYM=1,1,) run until the
    // next KEY= token.
    std::string cur_key, cur_val;
    auto flush = [&]() {
        if (!cur_key.empty()) nl.keys[lower(trim(cur_key))] = trim(cur_val);
        cur_key.clear();
        cur_val.clear();
    };
    std::vector<std::string> tokens = split(header, ',');
    for (const std::string& tok : tokens) {
        std::string t = trim(tok);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq != std::string::npos) {
            flush();
            cur_key = t.substr(0, eq);
            cur_val = t.substr(eq + 1);
        } else {
            if (cur_key.empty()) throw ParseError("malformed namelist entry '" + t + "'", lineno);
            cur_val += "," + t;
        }
    }
    flush();
    return nl;
}

long require_int(const Namelist& nl, const std::string& key) {
    auto it = nl.keys.find(key);
    if (it == nl.keys.end())
        throw ParseError("missing required header key " + key, nl.body_start_line);
    try {
        return std::stol(it->second);
    } catch (const std::exception&) {
        throw ParseError("header key " + key + " is not an integer: " + it->second,
                         nl.body_start_line);
    }
}

struct BodyLine {
    double value;
    std::array<int, 4> idx;
};

bool read_body_line(const std::string& line, int lineno, int norb, BodyLine& out) {
    std::string t = trim(line);
    if (t.empty()) return false;
    std::istringstream ss(t);
    if (!(ss >> out.value >> out.idx[0] >> out.idx[1] >> out.idx[2] >> out.idx[3]))
        throw ParseError("malformed integral line: '" + t + "'", lineno);
    std::string rest;
    if (ss >> rest) throw ParseError("trailing tokens on integral line: '" + t + "'", lineno);
    for (int v : out.idx)
        if (v < 0 || v > norb)
            throw ParseError("orbital index " + std::to_string(v) + " out of range [0, " +
                                 std::to_string(norb) + "]",
                             lineno);
    return true;
}

// canonical representative among the 8 permutational images of (pq|rs)
std::array<int, 4> canonical_g(int p, int q, int r, int s) {
    auto pair_key = [](int a, int b) { return std::pair<int, int>(std::min(a, b), std::max(a, b)); };
    std::pair<int, int> pq = pair_key(p, q), rs = pair_key(r, s);
    if (pq < rs) std::swap(pq, rs);
    return {pq.first, pq.second, rs.first, rs.second};
}

}  // namespace

MolecularIntegrals parse_fcidump(std::istream& in) {
    Namelist nl = parse_namelist(in);
    MolecularIntegrals mi;
    mi.n_orb = static_cast<int>(require_int(nl, "norb"));
    mi.n_elec = static_cast<int>(require_int(nl, "nelec"));
    mi.ms2 = static_cast<int>(require_int(nl, "ms2"));
    if (mi.n_orb <= 0) throw ParseError("NORB must be positive", nl.body_start_line);
    if (mi.n_elec < 0 || mi.n_elec > 2 * mi.n_orb)
        throw ParseError("NELEC out of range [0, 2*NORB]", nl.body_start_line);
    if (auto it = nl.keys.find("orbsym"); it != nl.keys.end()) {
        for (const std::string& s : split(it->second, ',')) {
            std::string t = trim(s);
            if (!t.empty()) mi.orbsym.push_back(std::stoi(t));
        }
    }
    const int n = mi.n_orb;
    mi.h.assign(static_cast<size_t>(n) * n, 0.0);
    mi.g.assign(static_cast<size_t>(n) * n * n * n, 0.0);

    std::map<std::array<int, 4>, double> seen;  // canonical key -> first value
    auto record = [&](const std::array<int, 4>& key, double v, int lineno) {
        auto it = seen.find(key);
        if (it != seen.end()) {
            if (std::abs(it->second - v) > kDupTol)
                throw ParseError("inconsistent duplicate integral entry", lineno);
            return;
        }
        seen.emplace(key, v);
    };

    std::string line;
    int lineno = nl.body_start_line;
    bool have_core = false;
    while (std::getline(in, line)) {
        ++lineno;
        BodyLine bl;
        if (!read_body_line(line, lineno, n, bl)) continue;
        auto [i, j, k, l] = bl.idx;
        double v = std::abs(bl.value) < kStoreZeroTol ? 0.0 : bl.value;
        if (i == 0 && j == 0 && k == 0 && l == 0) {
            record({0, 0, 0, 0}, v, lineno);
            if (!have_core) mi.e_core = v;
            have_core = true;
        } else if (k == 0 && l == 0) {
            if (i == 0 || j == 0)
                throw ParseError("one-electron entry with a zero orbital index", lineno);
            record({-1, 0, std::min(i, j), std::max(i, j)}, v, lineno);
            mi.h_at(i - 1, j - 1) = v;
            mi.h_at(j - 1, i - 1) = v;
        } else if (i != 0 && j != 0 && k != 0 && l != 0) {
            record(canonical_g(i, j, k, l), v, lineno);
            int p = i - 1, q = j - 1, r = k - 1, s = l - 1;
            // all 8 permutational images
            mi.g_at(p, q, r, s) = v;
            mi.g_at(q, p, r, s) = v;
            mi.g_at(p, q, s, r) = v;
            mi.g_at(q, p, s, r) = v;
            mi.g_at(r, s, p, q) = v;
            mi.g_at(s, r, p, q) = v;
            mi.g_at(r, s, q, p) = v;
            mi.g_at(s, r, q, p) = v;
        } else {
            throw ParseError("mixed zero/nonzero index pattern in integral line", lineno);
        }
    }
    return mi;
}

MolecularIntegrals parse_fcidump_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
    return parse_fcidump(in);
}

DipoleIntegrals parse_dipole_file(std::istream& in) {
    Namelist nl = parse_namelist(in);
    DipoleIntegrals di;
    di.n_orb = static_cast<int>(require_int(nl, "norb"));
    if (di.n_orb <= 0) throw ParseError("NORB must be positive", nl.body_start_line);
    auto it = nl.keys.find("axis");
    if (it == nl.keys.end()) throw ParseError("missing AXIS declaration", nl.body_start_line);
    std::string ax = lower(trim(it->second));
    if (ax != "x" && ax != "y" && ax != "z")
        throw ParseError("AXIS must be one of X, Y, Z", nl.body_start_line);
    di.axis = ax[0];
    const int n = di.n_orb;
    di.f.assign(static_cast<size_t>(n) * n, 0.0);

    std::string line;
    int lineno = nl.body_start_line;
    while (std::getline(in, line)) {
        ++lineno;
        BodyLine bl;
        if (!read_body_line(line, lineno, n, bl)) continue;
        auto [i, j, k, l] = bl.idx;
        if (k != 0 || l != 0)
            throw ParseError("dipole entries are one-body; k and l must be 0", lineno);
        double v = std::abs(bl.value) < kStoreZeroTol ? 0.0 : bl.value;
        if (i == 0 && j == 0) {
            di.d_core = v;
        } else if (i != 0 && j != 0) {
            di.f_at(i - 1, j - 1) = v;
            di.f_at(j - 1, i - 1) = v;
        } else {
            throw ParseError("mixed zero/nonzero index pattern in dipole line", lineno);
        }
    }
    return di;
}

DipoleIntegrals parse_dipole_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dipole file: " + path);
    return parse_dipole_file(in);
}

std::string serialize_fcidump(const MolecularIntegrals& mi) {
    std::ostringstream os;
    os.precision(16);
    os << std::scientific;
    os << "&FCI NORB=" << mi.n_orb << ",NELEC=" << mi.n_elec << ",MS2=" << mi.ms2 << ",\n";
    if (!mi.orbsym.empty()) {
        os << "  ORBSYM=";
        for (int s : mi.orbsym) os << s << ",";
        os << "\n";
    }
    os << "&END\n";
    const int n = mi.n_orb;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            for (int k = 0; k <= i; ++k)
                for (int l = 0; l < (k == i ? j + 1 : k + 1); ++l) {
                    double v = mi.g_at(i, j, k, l);
                    if (v != 0.0)
                        os << v << " " << i + 1 << " " << j + 1 << " " << k + 1 << " " << l + 1
                           << "\n";
                }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            if (mi.h_at(i, j) != 0.0) os << mi.h_at(i, j) << " " << i + 1 << " " << j + 1 << " 0 0\n";
    os << mi.e_core << " 0 0 0 0\n";
    return os.str();
}

std::string serialize_dipole(const DipoleIntegrals& di) {
    std::ostringstream os;
    os.precision(16);
    os << std::scientific;
    os << "&DIP NORB=" << di.n_orb << ",AXIS="
       << static_cast<char>(std::toupper(static_cast<unsigned char>(di.axis))) << ",\n&END\n";
    for (int i = 0; i < di.n_orb; ++i)
        for (int j = 0; j <= i; ++j)
            if (di.f_at(i, j) != 0.0) os << di.f_at(i, j) << " " << i + 1 << " " << j + 1 << " 0 0\n";
    os << di.d_core << " 0 0 0 0\n";
    return os.str();
}

namespace {

std::vector<int> active_map(int n_orb, const std::vector<int>& frozen) {
    std::vector<bool> is_frozen(n_orb, false);
    for (int f : frozen) {
        if (f < 0 || f >= n_orb) throw std::runtime_error("frozen orbital index out of range");
        if (is_frozen[f]) throw std::runtime_error("duplicate frozen orbital index");
        is_frozen[f] = true;
    }
    std::vector<int> act;
    for (int p = 0; p < n_orb; ++p)
        if (!is_frozen[p]) act.push_back(p);
    return act;
}

}  // namespace

MolecularIntegrals freeze_core_integrals(const MolecularIntegrals& mi,
                                         const std::vector<int>& frozen) {
    std::vector<int> act = active_map(mi.n_orb, frozen);
    if (2 * static_cast<int>(frozen.size()) > mi.n_elec)
        throw std::runtime_error("cannot freeze more electron pairs than electrons present");

    MolecularIntegrals out;
    out.n_orb = static_cast<int>(act.size());
    out.n_elec = mi.n_elec - 2 * static_cast<int>(frozen.size());
    out.ms2 = mi.ms2;
    const int n = out.n_orb;
    out.h.assign(static_cast<size_t>(n) * n, 0.0);
    out.g.assign(static_cast<size_t>(n) * n * n * n, 0.0);
    if (!mi.orbsym.empty())
        for (int p : act) out.orbsym.push_back(mi.orbsym[p]);

    double e = mi.e_core;
    for (int i : frozen) e += 2.0 * mi.h_at(i, i);
    for (int i : frozen)
        for (int j : frozen) e += 2.0 * mi.g_at(i, i, j, j) - mi.g_at(i, j, j, i);
    out.e_core = e;

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double v = mi.h_at(act[a], act[b]);
            for (int i : frozen)
                v += 2.0 * mi.g_at(act[a], act[b], i, i) - mi.g_at(act[a], i, i, act[b]);
            out.h_at(a, b) = std::abs(v) < kStoreZeroTol ? 0.0 : v;
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    out.g_at(a, b, c, d) = mi.g_at(act[a], act[b], act[c], act[d]);
    return out;
}

DipoleIntegrals freeze_core_dipole(const DipoleIntegrals& di, const std::vector<int>& frozen) {
    std::vector<int> act = active_map(di.n_orb, frozen);
    DipoleIntegrals out;
    out.axis = di.axis;
    out.n_orb = static_cast<int>(act.size());
    out.f.assign(static_cast<size_t>(out.n_orb) * out.n_orb, 0.0);
    double d = di.d_core;
    for (int i : frozen) d += 2.0 * di.f_at(i, i);
    out.d_core = d;
    for (int a = 0; a < out.n_orb; ++a)
        for (int b = 0; b < out.n_orb; ++b) out.f_at(a, b) = di.f_at(act[a], act[b]);
    return out;
}

double determinant_energy(const MolecularIntegrals& mi, const std::vector<int>& occ) {
    double e = mi.e_core;
    for (int i : occ) e += 2.0 * mi.h_at(i, i);
    for (int i : occ)
        for (int j : occ) e += 2.0 * mi.g_at(i, i, j, j) - mi.g_at(i, j, j, i);
    return e;
}

double determinant_dipole(const DipoleIntegrals& di, const std::vector<int>& occ) {
    double d = di.d_core;
    for (int i : occ) d += 2.0 * di.f_at(i, i);
    return d;
}

}  // namespace qcm
