/**
 * @file io.hpp
 * @brief JSON and CSV encodings of library results.
 *
 * Numbers are written with 12 significant digits. Covariance input JSON:
 * `{"names": [...], "V": [[...], ...], "rbar": [...]?, "r0": x?}`.
 */
#pragma once

#include "drfrontier/frontiers.hpp"
#include "drfrontier/mdp.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace drfrontier {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits; the JSON writer then emits the short form.
inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline Json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round12(x);
}

inline Json vector_json(const VectorXd& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

inline Json matrix_json(const MatrixXd& m) {
    Json a = Json::array();
    for (Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
    return a;
}

inline VectorXd vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
    VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw Error(ErrorCode::ParseError, std::string(what) + " has a non-numeric entry");
        }
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline AssetUniverse universe_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("V") || !j["V"].is_array()) {
        throw Error(ErrorCode::ParseError, "covariance JSON needs a \"V\" array of rows");
    }
    const Json& rows = j["V"];
    const auto n = static_cast<Index>(rows.size());
    Index cols = 0;
    for (const auto& r : rows) cols = std::max<Index>(cols, static_cast<Index>(r.size()));
    MatrixXd V = MatrixXd::Zero(n, cols);
    for (Index i = 0; i < n; ++i) {
        const VectorXd row = vector_from_json(rows[static_cast<std::size_t>(i)], "V row");
        if (row.size() != cols) throw Error(ErrorCode::NonSquare, "ragged covariance rows");
        V.row(i) = row.transpose();
    }
    std::optional<VectorXd> rbar;
    if (j.contains("rbar") && !j["rbar"].is_null()) rbar = vector_from_json(j["rbar"], "rbar");
    std::optional<double> r0;
    if (j.contains("r0") && !j["r0"].is_null()) r0 = j["r0"].get<double>();
    std::vector<std::string> names;
    if (j.contains("names")) names = j["names"].get<std::vector<std::string>>();
    return validate_universe(std::move(V), std::move(rbar), r0, std::move(names));
}

inline AssetUniverse load_universe_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    return universe_from_json(j);
}

inline Json universe_json(const AssetUniverse& u) {
    Json j;
    j["names"] = u.names();
    j["V"] = matrix_json(u.covariance());
    if (u.expected_returns()) j["rbar"] = vector_json(*u.expected_returns());
    if (u.risk_free_rate()) j["r0"] = number(*u.risk_free_rate());
    return j;
}

inline Json portfolio_json(const Portfolio& p) {
    Json j;
    j["weights"] = vector_json(p.weights);
    j["sigma"] = number(p.sigma());
    j["variance"] = number(p.variance);
    j["q"] = number(p.dr);
    if (p.centrality_sq) j["c"] = number(std::sqrt(std::max(*p.centrality_sq, 0.0)));
    if (p.expected_return) j["ret"] = number(*p.expected_return);
    return j;
}

inline Json special_portfolios_json(const SpecialPortfolios& sp, const AssetUniverse& u,
                                    const EdmEmbedding* emb) {
    Json j;
    j["names"] = u.names();
    j["a"] = number(sp.a);
    j["rho"] = number(sp.rho);
    if (emb) j["q_max"] = number(emb->q_max);
    j["mvp"] = portfolio_json(sp.mvp);
    j["mdrp"] = portfolio_json(sp.mdrp);
    if (sp.b) j["b"] = number(*sp.b);
    if (sp.w_o) j["w_o"] = vector_json(*sp.w_o);
    if (sp.q) {
        Json q = portfolio_json(sp.q->portfolio);
        q["eta_wo"] = number(sp.q->eta_wo);
        q["eta_wo_sign"] = std::string(to_string(sp.q->sign));
        j["q_portfolio"] = q;
    }
    if (sp.tangent) j["tangent"] = portfolio_json(*sp.tangent);
    j["notes"] = sp.notes;
    return j;
}

inline Json frontier_params_json(const FrontierParams& fp) {
    Json j;
    j["sigma_mvp"] = number(fp.sigma_mvp());
    j["sigma2_mvp"] = number(fp.sigma2_mvp);
    j["q_mvp"] = number(fp.q_mvp);
    j["rho"] = number(fp.rho);
    j["sigma_mdrp"] = number(fp.sigma_mdrp());
    j["sigma2_mdrp"] = number(fp.sigma2_mdrp);
    j["q_mdrp"] = number(fp.q_mdrp);
    j["degenerate_rho"] = fp.degenerate_rho;
    j["eta_wo"] = fp.eta_wo ? number(*fp.eta_wo) : Json(nullptr);
    j["eta_wo_sign"] = fp.eta_wo_sign ? Json(std::string(to_string(*fp.eta_wo_sign))) : Json(nullptr);
    j["tau_o"] = fp.tau_o ? number(*fp.tau_o) : Json(nullptr);
    j["ef_shape"] = std::string(to_string(fp.ef_shape));
    return j;
}

inline Json embedding_json(const EdmEmbedding& e, const AssetUniverse& u) {
    Json j;
    j["names"] = u.names();
    j["q_max"] = number(e.q_max);
    j["radius"] = number(e.radius());
    j["eigvals"] = vector_json(e.eigvals);
    j["s"] = vector_json(e.s);
    j["pseudo_inverse"] = e.used_pseudo_inverse;
    return j;
}

/// `asset,dim1,...,dimk` with one row per asset column of X.
inline std::string embedding_csv(const EdmEmbedding& e, const AssetUniverse& u) {
    std::ostringstream out;
    out << "asset";
    for (Index k = 0; k < e.rank(); ++k) out << ",dim" << (k + 1);
    out << '\n';
    for (Index i = 0; i < u.size(); ++i) {
        out << u.names()[static_cast<std::size_t>(i)];
        for (Index k = 0; k < e.rank(); ++k) out << ',' << fmt12(e.X(k, i));
        out << '\n';
    }
    return out.str();
}

inline constexpr const char* kCurveCsvHeader = "kind,sigma,q,ret,centrality,alpha,status";

inline std::string curve_csv(const FrontierCurve& c) {
    std::ostringstream out;
    out << kCurveCsvHeader << '\n';
    const auto opt = [](const std::optional<double>& v) { return v ? fmt12(*v) : std::string(); };
    for (const auto& r : c.rows) {
        out << to_string(c.kind) << ',' << fmt12(r.sigma) << ',' << (r.ok() ? fmt12(r.q) : "")
            << ',' << opt(r.expected_return) << ',' << opt(r.centrality) << ',' << opt(r.alpha)
            << ',' << (r.ok() ? std::string("ok") : std::string(to_string(*r.status))) << '\n';
    }
    return out.str();
}

inline Json curve_json(const FrontierCurve& c) {
    Json j;
    j["kind"] = std::string(to_string(c.kind));
    Json rows = Json::array();
    for (const auto& r : c.rows) {
        Json row;
        row["sigma"] = number(r.sigma);
        row["q"] = r.ok() ? number(r.q) : Json(nullptr);
        row["ret"] = r.expected_return ? number(*r.expected_return) : Json(nullptr);
        row["centrality"] = r.centrality ? number(*r.centrality) : Json(nullptr);
        row["alpha"] = r.alpha ? number(*r.alpha) : Json(nullptr);
        if (r.weights) row["weights"] = vector_json(*r.weights);
        row["status"] = r.ok() ? std::string("ok") : std::string(to_string(*r.status));
        if (r.beyond_mdrp) row["beyond_mdrp"] = true;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline Json mdp_json(const MdpAnalysis& a) {
    Json j;
    if (a.global) {
        j["w_mdp"] = vector_json(a.global->portfolio.weights);
        j["ratio"] = number(a.global->ratio);
        j["sweep_ratio"] = number(a.global->sweep_ratio);
        j["verified"] = a.global->verified;
        j["mdp"] = portfolio_json(a.global->portfolio);
    } else {
        j["w_mdp"] = nullptr;
    }
    j["d_max_lower"] = number(a.d_max.lower);
    j["d_max_upper"] = number(a.d_max.upper);
    j["d_max_argmax"] = vector_json(a.d_max.argmax);
    j["starts_used"] = a.d_max.starts_used;
    j["converged"] = a.d_max.converged;
    Json s = Json::array();
    for (const auto& r : a.sandwich) {
        Json x;
        x["sigma"] = number(r.sigma);
        x["requested"] = r.requested;
        x["accepted"] = r.accepted;
        x["attempts"] = r.attempts;
        if (r.empty) {
            x["status"] = "EmptySample";
        } else {
            x["status"] = "ok";
            x["max_eta_w"] = number(r.max_eta_w);
            x["max_sqrt_eta_w_sq"] = number(r.max_sqrt_eta_w_sq);
            x["gap"] = number(r.gap);
        }
        x["bound"] = number(r.bound);
        x["holds"] = r.holds;
        s.push_back(std::move(x));
    }
    j["sandwich"] = std::move(s);
    j["notes"] = a.notes;
    return j;
}

}  // namespace drfrontier
