#pragma once

// JSON and CSV serialization.  JSON objects are emitted with sorted keys and
// shortest round-trip numbers, so identical inputs give byte-identical output.

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "todatri/flows.hpp"
#include "todatri/frame.hpp"
#include "todatri/operator.hpp"
#include "todatri/series.hpp"
#include "todatri/spectral.hpp"

namespace todatri {

using json = nlohmann::json;

inline json operator_to_json(const TriangularOperatord& L) {
    json rows = json::array();
    for (int i = 0; i < L.n; ++i) {
        json row = json::array();
        for (int j = 0; j < L.k; ++j) row.push_back(L.a(i, j));
        rows.push_back(row);
    }
    return json{{"n", L.n}, {"k", L.k}, {"a", rows}};
}

inline TriangularOperatord operator_from_json(const json& j) {
    try {
        TriangularOperatord L;
        L.n = j.at("n").get<int>();
        L.k = j.at("k").get<int>();
        const auto& rows = j.at("a");
        if (!rows.is_array() || static_cast<int>(rows.size()) != L.n)
            throw ParseError("'a' must be an array of n rows");
        L.a.resize(L.n, L.k);
        for (int i = 0; i < L.n; ++i) {
            if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != L.k)
                throw ParseError("row " + std::to_string(i + 1) + " must hold k numbers");
            for (int c = 0; c < L.k; ++c) L.a(i, c) = rows[i][c].get<double>();
        }
        return L;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad operator JSON: ") + e.what());
    }
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
}

inline TriangularOperatord load_operator(const std::string& path) {
    return operator_from_json(load_json(path));
}

inline json curve_to_json(const SpectralCurve& R) {
    json terms = json::array();
    for (const auto& [ij, v] : R.terms)  // std::map: sorted by (i, j)
        terms.push_back(json{{"i", ij.first}, {"j", ij.second}, {"r", v}});
    return json{{"n", R.n}, {"k", R.k}, {"terms", terms}};
}

inline json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline Complex complex_from_json(const json& j) {
    return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

inline json frame_to_json(const FramePair& F) {
    json W = json::array(), Phi = json::array();
    for (int l = 0; l < F.k(); ++l) {
        W.push_back(complex_to_json(F.W(l)));
        json row = json::array();
        for (int c = 0; c < F.n(); ++c) row.push_back(complex_to_json(F.Phi(l, c)));
        Phi.push_back(row);
    }
    return json{{"W", W}, {"Phi", Phi}};
}

inline FramePair frame_from_json(const json& j) {
    try {
        FramePair F;
        const auto& W = j.at("W");
        const auto& Phi = j.at("Phi");
        const int k = static_cast<int>(W.size());
        if (k < 1 || Phi.size() != W.size()) throw ParseError("W and Phi sizes disagree");
        const int n = static_cast<int>(Phi[0].size());
        F.W.resize(k);
        F.Phi.resize(k, n);
        for (int l = 0; l < k; ++l) {
            F.W(l) = complex_from_json(W[l]);
            if (static_cast<int>(Phi[l].size()) != n) throw ParseError("ragged Phi rows");
            for (int c = 0; c < n; ++c) F.Phi(l, c) = complex_from_json(Phi[l][c]);
        }
        return F;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad frame JSON: ") + e.what());
    }
}

inline json minus_series_to_json(const MinusSeries& ms) {
    json xi = json::array();
    for (int s = 0; s < ms.S; ++s) {
        json row = json::array();
        for (int i = 0; i < ms.n; ++i) row.push_back(ms.xi(s, i));
        xi.push_back(row);
    }
    json e = json::array();
    for (int s = 0; s < ms.S; ++s) e.push_back(ms.e(s));
    return json{{"e", e}, {"xiMinus", xi}};
}

inline json plus_series_to_json(const PlusSeries& ps) {
    json phi = json::array(), xi = json::array(), w = json::array();
    for (int i = 0; i < 2 * ps.n + 1; ++i) phi.push_back(ps.phi(i));
    for (int s = 0; s < ps.S; ++s) {
        json row = json::array();
        for (int i = 0; i < 2 * ps.n + 1; ++i) row.push_back(ps.xiPlus(s, i));
        xi.push_back(row);
        w.push_back(ps.w(s));
    }
    return json{{"phi", phi}, {"xiPlus", xi}, {"w", w}};
}

// full round-trip precision for CSV numbers
inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int n, int k) {
    out << "t";
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= k; ++j) out << ",a_" << i << "_" << j;
    out << "\n";
    for (std::size_t t = 0; t < traj.times.size(); ++t) {
        out << format_number(traj.times[t]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) out << "," << format_number(traj.states[t](i, j));
        out << "\n";
    }
}

inline void write_monitor_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,quantity,value\n";
    for (std::size_t t = 0; t < traj.times.size(); ++t)
        for (std::size_t q = 0; q < traj.monitorNames.size(); ++q)
            out << format_number(traj.times[t]) << "," << traj.monitorNames[q] << ","
                << format_number(traj.monitors[t](q)) << "\n";
}

inline json drift_to_json(const DriftReport& rep) {
    json per = json::object();
    for (std::size_t q = 0; q < rep.names.size(); ++q) per[rep.names[q]] = rep.drift(q);
    return json{{"drift", per}, {"maxDrift", rep.maxDrift}};
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace todatri
