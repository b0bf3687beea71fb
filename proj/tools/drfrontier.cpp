// drfrontier: portfolios, frontier curves, MDP report, embedding and ingest
// check from a covariance JSON or a price/return CSV panel.
//
// Exit codes: 0 ok, 2 input or validation error (JSON on stderr), 1 internal.

#include "drfrontier/edm.hpp"
#include "drfrontier/frontiers.hpp"
#include "drfrontier/ingest.hpp"
#include "drfrontier/io.hpp"
#include "drfrontier/mdp.hpp"
#include "drfrontier/special_portfolios.hpp"
#include "drfrontier/svg.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace drfrontier;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    bool log = false;
};

struct RunConfig {
    std::string command;
    std::string input;
    std::string format = "auto";
    bool log_returns = false;
    std::optional<double> riskfree;
    std::optional<std::string> grid;
    std::vector<std::string> kinds;
    std::string out = ".";
    std::uint64_t seed = 42;
    bool svg = false;
    bool require_returns = false;
    int starts = 100;
    std::size_t samples = 20000;
    std::vector<double> sandwich_sigmas;
};

/// Universe plus where it came from.
struct Loaded {
    AssetUniverse universe;
    Json provenance;
};

std::shared_ptr<spdlog::logger> logger() {
    static auto log = [] {
        auto l = std::make_shared<spdlog::logger>("drfrontier",
                                                  std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::warn);
        if (const char* env = std::getenv("DRFRONTIER_LOG")) {
            l->set_level(spdlog::level::from_str(env));
        }
        return l;
    }();
    return log;
}

GridSpec parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    const auto bad = [&] {
        return Error(ErrorCode::InvalidArgument, "--grid expects min:max:points[:log], got '" + spec + "'");
    };
    if (parts.size() != 3 && parts.size() != 4) throw bad();
    GridSpec g;
    try {
        std::size_t used = 0;
        g.min = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw bad();
        g.max = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw bad();
        g.points = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    if (parts.size() == 4) {
        if (parts[3] == "log") g.log = true;
        else if (parts[3] != "lin") throw bad();
    }
    if (g.points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
    return g;
}

bool looks_like_json(const std::string& path) {
    if (fs::path(path).extension() == ".json") return true;
    std::ifstream in(path);
    char ch = 0;
    while (in.get(ch)) {
        if (!std::isspace(static_cast<unsigned char>(ch))) return ch == '{';
    }
    return false;
}

Loaded load(const RunConfig& cfg) {
    if (!fs::exists(cfg.input)) throw Error(ErrorCode::IoError, "cannot open " + cfg.input);
    Json prov;
    prov["tool"] = std::string("drfrontier ") + kVersion;
    prov["command"] = cfg.command;
    prov["input"] = fs::path(cfg.input).filename().string();
    prov["fingerprint_fnv1a"] = file_fingerprint(cfg.input);

    std::string format = cfg.format;
    if (format == "auto") format = looks_like_json(cfg.input) ? "json" : "prices";
    prov["format"] = format;

    std::optional<AssetUniverse> u;
    if (format == "json") {
        u = load_universe_json(cfg.input);
    } else {
        const PanelFormat pf = format == "returns" ? PanelFormat::Returns : PanelFormat::Prices;
        const ReturnPanel panel = load_panel(cfg.input, pf, cfg.log_returns);
        AnnualizedUniverse a = annualize(panel);
        prov["log_returns"] = cfg.log_returns;
        prov["calendar_days"] = a.calendar_days;
        prov["observations"] = a.periods;
        prov["delta"] = number(a.delta);
        prov["dropped_rows"] = panel.dropped_rows;
        prov["rank_deficient"] = a.rank_deficient;
        if (a.rank_deficient) logger()->warn("sample covariance is rank deficient");
        logger()->info("{} assets, N = {} days, n_obs = {}, delta = {:.6g}", panel.assets.size(),
                       a.calendar_days, a.periods, a.delta);
        u = std::move(a.universe);
    }
    if (cfg.riskfree) {
        *u = u->with_returns(u->expected_returns(), *cfg.riskfree);
        prov["riskfree_override"] = number(*cfg.riskfree);
    }
    if (cfg.require_returns && !u->expected_returns()) {
        throw Error(ErrorCode::MissingReturns, "--require-returns set but the input has no expected returns");
    }
    prov["assets"] = u->size();
    prov["seed"] = cfg.seed;
    return {std::move(*u), std::move(prov)};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
    logger()->info("wrote {}", path.string());
    std::cout << path.string() << '\n';
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_out(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec || !fs::is_directory(cfg.out)) {
        throw Error(ErrorCode::IoError, "output directory " + cfg.out + " is not writable");
    }
    return fs::path(cfg.out);
}

std::optional<EdmEmbedding> try_embed(const AssetUniverse& u, Json& notes) {
    try {
        return embed(u);
    } catch (const Error& e) {
        logger()->warn("embedding unavailable: {}", e.what());
        notes.push_back(e.what());
        return std::nullopt;
    }
}

int cmd_portfolios(const RunConfig& cfg) {
    const Loaded in = load(cfg);
    const fs::path out = prepare_out(cfg);
    Json notes = Json::array();
    const auto emb = try_embed(in.universe, notes);
    Json j = special_portfolios_json(special_portfolios(in.universe, emb ? &*emb : nullptr),
                                     in.universe, emb ? &*emb : nullptr);
    j["frontier"] = frontier_params_json(frontier_params(in.universe));
    for (const auto& n : notes) j["notes"].push_back(n);
    write_json(out / "portfolios.json", j);
    write_json(out / "provenance.json", in.provenance);
    return 0;
}

std::vector<CurveKind> requested_kinds(const RunConfig& cfg, const AssetUniverse& u) {
    std::vector<CurveKind> kinds;
    if (!cfg.kinds.empty()) {
        for (const auto& name : cfg.kinds) {
            const auto k = curve_kind_from_string(name);
            if (!k) throw Error(ErrorCode::InvalidArgument, "unknown curve kind '" + name + "'");
            kinds.push_back(*k);
        }
        return kinds;
    }
    const bool has_r = u.expected_returns().has_value();
    const bool has_r0 = has_r && u.risk_free_rate().has_value();
    for (CurveKind k : kAllCurveKinds) {
        if ((k == CurveKind::MVEfficientDR || k == CurveKind::MVMeanReturn) && !has_r) continue;
        if (k == CurveKind::CML && !has_r0) continue;
        kinds.push_back(k);
    }
    return kinds;
}

bool riskless_kind(CurveKind k) {
    return k == CurveKind::CML || k == CurveKind::EfficientDRWithRiskFree;
}

struct XY {
    std::vector<double> x;
    std::vector<double> y;
};

XY column(const FrontierCurve& c, const std::function<std::optional<double>(const CurveRow&)>& f) {
    XY xy;
    for (const auto& r : c.rows) {
        if (!r.ok()) continue;
        if (const auto v = f(r)) {
            xy.x.push_back(r.sigma);
            xy.y.push_back(*v);
        }
    }
    return xy;
}

int cmd_frontier(const RunConfig& cfg) {
    const Loaded in = load(cfg);
    const AssetUniverse& u = in.universe;
    const fs::path out = prepare_out(cfg);
    const FrontierParams fp = frontier_params(u);
    Json notes = Json::array();
    const auto emb = try_embed(u, notes);
    const EdmEmbedding* ep = emb ? &*emb : nullptr;

    std::vector<double> grid;
    std::vector<double> riskless_grid;
    if (cfg.grid) {
        const GridSpec g = parse_grid(*cfg.grid);
        grid = sigma_grid(g.min, g.max, g.points, g.log);
        riskless_grid = grid;
    } else {
        grid = default_sigma_grid(fp, 200);
        riskless_grid = sigma_grid(0.0, grid.back(), 200);
    }

    std::vector<FrontierCurve> curves;
    std::size_t ok_rows = 0;
    std::optional<ErrorCode> first_failure;
    for (CurveKind k : requested_kinds(cfg, u)) {
        curves.push_back(sweep(u, k, riskless_kind(k) ? riskless_grid : grid, ep));
        for (const auto& r : curves.back().rows) {
            if (r.ok()) ++ok_rows;
            else if (!first_failure) first_failure = r.status;
        }
        write_text(out / ("frontier_" + std::string(to_string(k)) + ".csv"), curve_csv(curves.back()));
    }

    Json summary;
    summary["params"] = frontier_params_json(fp);
    summary["q_max"] = emb ? number(emb->q_max) : Json(nullptr);
    Json cj = Json::array();
    for (const auto& c : curves) {
        Json x;
        x["kind"] = std::string(to_string(c.kind));
        x["rows"] = c.rows.size();
        std::size_t failed = 0;
        for (const auto& r : c.rows) failed += r.ok() ? 0 : 1;
        x["failed_rows"] = failed;
        const auto peak = locate_peak(c);
        x["peak_sigma"] = peak ? number(c.rows[*peak].sigma) : Json(nullptr);
        x["peak_q"] = peak ? number(c.rows[*peak].q) : Json(nullptr);
        if (c.kind == CurveKind::MVEfficientDR) {
            const auto infl = locate_inflection(c);
            x["inflection_sigma_located"] = infl ? number(*infl) : Json(nullptr);
            x["inflection_sigma_closed_form"] = fp.tau_o ? number(*fp.tau_o) : Json(nullptr);
        }
        cj.push_back(std::move(x));
    }
    summary["curves"] = std::move(cj);
    summary["notes"] = notes;
    write_json(out / "frontier_summary.json", summary);

    if (cfg.svg) {
        const SpecialPortfolios sp = special_portfolios(u, ep);
        std::optional<Portfolio> mdp;
        try {
            mdp = mdp_global(u).portfolio;
        } catch (const Error& e) {
            logger()->info("no MDP marker: {}", e.what());
        }
        struct Mark {
            const char* label;
            const Portfolio* p;
        };
        std::vector<Mark> marks{{"MVP", &sp.mvp}, {"MDRP", &sp.mdrp}};
        if (sp.q) marks.push_back({"Q", &sp.q->portfolio});
        if (mdp) marks.push_back({"MDP", &*mdp});

        SvgPlot pq("Diversification return vs risk", "sigma", "q");
        SvgPlot pc("Centrality vs risk", "sigma", "c");
        SvgPlot pr("Expected return vs risk", "sigma", "expected return");
        // MVMeanReturn repeats MVEfficientDR's portfolios; it only belongs in the return plane.
        for (const auto& c : curves) {
            const std::string name(to_string(c.kind));
            if (c.kind != CurveKind::MVMeanReturn) {
                const XY q = column(c, [](const CurveRow& r) { return std::optional<double>(r.q); });
                pq.add_series(name, q.x, q.y);
                const XY cc = column(c, [](const CurveRow& r) { return r.centrality; });
                if (!cc.x.empty()) pc.add_series(name, cc.x, cc.y);
            }
            if (c.kind != CurveKind::MVEfficientDR) {
                const XY rr = column(c, [](const CurveRow& r) { return r.expected_return; });
                if (!rr.x.empty()) pr.add_series(name, rr.x, rr.y);
            }
        }
        pq.add_hline("q = 0", 0.0);
        for (const auto& m : marks) {
            pq.add_marker(m.label, m.p->sigma(), m.p->dr);
            if (emb) pc.add_marker(m.label, m.p->sigma(), std::sqrt(std::max(centrality_sq(*emb, m.p->weights), 0.0)));
            if (m.p->expected_return) pr.add_marker(m.label, m.p->sigma(), *m.p->expected_return);
        }
        if (emb) pc.add_hline("sqrt(q_max)", emb->radius());
        write_text(out / "sigma_q.svg", pq.render());
        write_text(out / "sigma_c.svg", pc.render());
        write_text(out / "sigma_R.svg", pr.render());
    }
    write_json(out / "provenance.json", in.provenance);

    if (ok_rows == 0) {
        throw Error(first_failure.value_or(ErrorCode::InvalidArgument), "every frontier row failed");
    }
    return 0;
}

int cmd_mdp(const RunConfig& cfg) {
    const Loaded in = load(cfg);
    const AssetUniverse& u = in.universe;
    const fs::path out = prepare_out(cfg);
    if (cfg.starts < 0) throw Error(ErrorCode::InvalidArgument, "--starts must be nonnegative");

    std::vector<double> sigmas = cfg.sandwich_sigmas;
    if (sigmas.empty()) {
        // long-only portfolios span roughly [sigma_mvp, max asset vol]
        const double lo = std::sqrt(1.0 / u.solve(VectorXd::Ones(u.size())).sum());
        const double hi = u.variances().cwiseSqrt().maxCoeff();
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) sigmas.push_back(lo + t * (hi - lo));
    }
    const MdpAnalysis a = analyze_mdp(u, cfg.starts, cfg.seed, sigmas, cfg.samples);
    if (!a.d_max.converged) logger()->warn("replicator ascent hit its iteration cap on some start");
    Json j = mdp_json(a);
    j["seed"] = cfg.seed;
    j["starts"] = cfg.starts;
    write_json(out / "mdp.json", j);
    write_json(out / "provenance.json", in.provenance);
    return 0;
}

int cmd_embed(const RunConfig& cfg) {
    const Loaded in = load(cfg);
    const fs::path out = prepare_out(cfg);
    const EdmEmbedding e = embed(in.universe);
    write_text(out / "embedding.csv", embedding_csv(e, in.universe));
    write_json(out / "embedding.json", embedding_json(e, in.universe));
    write_json(out / "provenance.json", in.provenance);
    return 0;
}

int cmd_ingest_check(const RunConfig& cfg) {
    const Loaded in = load(cfg);
    const fs::path out = prepare_out(cfg);
    Json j = in.provenance;
    j["universe"] = universe_json(in.universe);
    j["min_eigenvalue"] = number(in.universe.min_eigenvalue());
    j["nonsingular"] = in.universe.nonsingular();
    write_json(out / "ingest.json", j);
    write_json(out / "provenance.json", in.provenance);
    return 0;
}

int fail(std::string_view code, const std::string& message) {
    Json j;
    j["error"] = std::string(code);
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return 2;
}

/// Error::what() is "<Code>: <message>"; strip the code for the JSON message field.
std::string message_of(const Error& e) {
    const std::string w = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diversification-return portfolio analytics"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig cfg;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--input,-i", cfg.input, "covariance JSON or price/return CSV")->required();
        sub->add_option("--format", cfg.format, "auto, json, prices or returns")
            ->check(CLI::IsMember({"auto", "json", "prices", "returns"}));
        sub->add_flag("--log-returns", cfg.log_returns, "use log returns for CSV panels");
        sub->add_option("--riskfree", cfg.riskfree, "risk-free rate override");
        sub->add_option("--out,-o", cfg.out, "output directory");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_flag("--require-returns", cfg.require_returns, "fail when expected returns are absent");
    };

    auto* portfolios = app.add_subcommand("portfolios", "special portfolios to portfolios.json");
    common(portfolios);

    auto* frontier = app.add_subcommand("frontier", "frontier curves to frontier_<kind>.csv");
    common(frontier);
    frontier->add_option("--grid", cfg.grid, "sigma grid min:max:points[:log]");
    frontier->add_option("--kinds", cfg.kinds, "curve kinds (default: all applicable)")->delimiter(',');
    frontier->add_flag("--svg", cfg.svg, "also write sigma_q.svg, sigma_c.svg, sigma_R.svg");

    auto* mdp = app.add_subcommand("mdp", "diversification-ratio report to mdp.json");
    common(mdp);
    mdp->add_option("--starts", cfg.starts, "random starts for the d_max ascent");
    mdp->add_option("--samples", cfg.samples, "long-only samples per sandwich sigma");
    mdp->add_option("--sandwich-sigmas", cfg.sandwich_sigmas, "sigma levels for the sandwich check")
        ->delimiter(',');

    auto* emb = app.add_subcommand("embed", "EDM embedding to embedding.csv/json");
    common(emb);

    auto* ingest = app.add_subcommand("ingest-check", "parse and annualize an input, write ingest.json");
    common(ingest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("InvalidArgument", e.what());
    }

    const std::map<std::string, int (*)(const RunConfig&)> commands{
        {"portfolios", cmd_portfolios}, {"frontier", cmd_frontier}, {"mdp", cmd_mdp},
        {"embed", cmd_embed},           {"ingest-check", cmd_ingest_check}};
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        return commands.at(cfg.command)(cfg);
    } catch (const Error& e) {
        return fail(to_string(e.code()), message_of(e));
    } catch (const std::exception& e) {
        std::cerr << Json({{"error", "Internal"}, {"message", e.what()}}).dump() << '\n';
        return 1;
    }
}
