#include "cli.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flatmaj/channels.hpp"
#include "flatmaj/conditions.hpp"
#include "flatmaj/config.hpp"
#include "flatmaj/entropies.hpp"
#include "flatmaj/errors.hpp"
#include "flatmaj/feasibility.hpp"
#include "flatmaj/jordan.hpp"
#include "flatmaj/json_io.hpp"
#include "flatmaj/rates.hpp"

namespace flatmaj::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitMalformed = 3;
constexpr int kExitUndetermined = 4;

struct Ctx {
    RunConfig config;
    std::string output_override;
    std::ostream* out = nullptr;
};

void emit(const Ctx& ctx, const std::string& anchor, nlohmann::json payload) {
    const nlohmann::json report = make_report(anchor, ctx.config.to_json(), std::move(payload));
    const std::string text = stable_dump(report);
    const std::string path =
        ctx.output_override.empty() ? ctx.config.output_path : ctx.output_override;
    if (path.empty())
        (*ctx.out) << text;
    else
        write_text_file(path, text);
}

nlohmann::json point_json(const ParamPoint& pt) {
    nlohmann::json j;
    j["alpha"] = pt.alpha;
    j["tropical"] = pt.is_tropical();
    j["z"] = pt.is_tropical() ? nlohmann::json(nullptr) : json_number(pt.z);
    j["w"] = CompactParam::from_point(pt).w;
    return j;
}

nlohmann::json class_json(const PairClass& c) {
    nlohmann::json j;
    j["is_zero"] = c.is_zero;
    j["has_some_overlap"] = c.has_some_overlap;
    j["everywhere_overlapping"] = c.everywhere_overlapping;
    j["satisfies_pu1"] = c.satisfies_pu1;
    j["satisfies_pu2"] = c.satisfies_pu2;
    j["is_classical"] = c.is_classical;
    j["states_commute"] = c.states_commute;
    return j;
}

const char* verdict_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::strict: return "strict";
        case VerdictKind::fails: return "fails";
        default: return "non_strict";
    }
}

nlohmann::json verdict_json(const Verdict& v) {
    nlohmann::json j;
    j["verdict"] = verdict_name(v.kind);
    j["worst_margin"] = json_number(v.worst_margin);
    j["witness"] = point_json(v.witness.to_point());
    j["evaluations"] = v.grid_stats.evaluations;
    j["refinement_depth"] = v.grid_stats.refinement_depth;
    j["tau_strict"] = v.tau_strict;
    j["tau_zero"] = v.tau_zero;
    j["catalytic_applies"] = v.catalytic_applies;
    j["large_sample_applies"] = v.large_sample_applies;
    j["input_class"] = class_json(v.input_class);
    j["output_class"] = class_json(v.output_class);
    return j;
}

nlohmann::json rate_json(const RateReport& r) {
    nlohmann::json j;
    j["rate"] = json_number(r.rate);
    j["unbounded"] = r.unbounded;
    j["argmin"] = point_json(r.argmin.to_point());
    j["evaluations"] = r.stats.evaluations;
    j["refinement_depth"] = r.stats.refinement_depth;
    nlohmann::json ex = nlohmann::json::array();
    for (const ExcludedPoint& e : r.excluded) {
        nlohmann::json p;
        p["alpha"] = e.at.alpha;
        p["w"] = e.at.w;
        p["numerator"] = e.numerator;
        p["denominator"] = e.denominator;
        ex.push_back(std::move(p));
    }
    j["excluded"] = std::move(ex);
    j["excluded_truncated"] = r.excluded_truncated;
    return j;
}

const char* outcome_name(CertifyOutcome o) {
    switch (o) {
        case CertifyOutcome::achieved: return "achieved";
        case CertifyOutcome::refuted_by_rate: return "refuted_by_rate";
        case CertifyOutcome::inconclusive_band: return "inconclusive_band";
        case CertifyOutcome::trivial: return "trivial";
        default: return "not_found";
    }
}

FlatPair load_pair(const std::string& path) {
    return canonicalize(pair_from_json(load_json_file(path)));
}

int run_selftest(std::ostream& out) {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        out << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        FlatPair fp;
        fp.blocks = {Block(0.0, 0.0), Block(0.5, 0.5, 1e-15), Block(0.5, 0.5, 1.0 - 1e-15)};
        const FlatPair c = canonicalize(fp);
        bool ok = c.blocks.size() == 3;  // tiny overlap splits, zero row drops
        for (const Block& b : c.blocks)
            if (b.both_positive() && !b.classical_diagonal()) ok = false;
        check("canonical form drops zero rows, splits and snaps overlaps", ok);
    }
    {
        FlatPair fp;
        fp.blocks = {Block(1.0, 1.0, 0.5)};
        const double v = d_hat(fp, ParamPoint::finite(0.5, 1.0));
        const double t = d_hat(fp, ParamPoint::tropical());
        check("single-block divergence at alpha=1/2, z=1",
              std::abs(v - 0.5 * std::log(2.0)) < 1e-12);
        check("single-block tropical divergence", std::abs(t - std::log(2.0)) < 1e-12);
    }
    {
        FlatPair fp;
        fp.blocks = {Block(0.6, 0.3, 0.5), Block(0.4, 0.7, 1.0)};
        const FlatPair rt = flat_pair_from_dense(realize_dense(fp));
        check("dense realization round-trips through extraction",
              approx_equal(canonicalize(fp), rt, 1e-9));
    }
    {
        bool ok = false;
        try {
            const ChannelRep ch = uhlmann_channel(0.25, 0.5);
            Matrix a = Matrix::Zero(2, 2);
            a(0, 0) = 1.0;
            Vector b_in(2), b_out(2);
            b_in << std::sqrt(0.25), std::sqrt(0.75);
            b_out << std::sqrt(0.5), std::sqrt(0.5);
            ok = ch.tp_residual() < 1e-9 && (ch.apply(a) - a).norm() < 1e-5 &&
                 (ch.apply(b_in * b_in.adjoint()) - b_out * b_out.adjoint()).norm() < 1e-5;
        } catch (const NumericalFailure&) {
        }
        check("overlap-raising channel synthesis", ok);
    }
    {
        Eigen::VectorXd p(2), q(2), p2(2), q2(2);
        p << 0.75, 0.25;
        q << 0.25, 0.75;
        p2 << 0.625, 0.375;
        q2 << 0.375, 0.625;
        const auto fwd = solve_classical(p, q, p2, q2);
        const auto rev = solve_classical(p2, q2, p, q, 1e-9, 4000);
        check("classical mixing is feasible toward the center",
              fwd.status == FeasStatus::feasible);
        check("classical anti-mixing stays undetermined",
              rev.status == FeasStatus::undetermined);
    }
    {
        FlatPair tgt;
        tgt.blocks = {Block(0.5, 0.25, 0.81), Block(0.5, 0.75, 0.64)};
        bool ok = false;
        try {
            const PowerProtocolResult res = power_universal_protocol(tgt, 0.5);
            ok = res.materialized && res.m == 2 && res.channel &&
                 res.channel->tp_residual() < 1e-9;
        } catch (const NumericalFailure&) {
        }
        check("measure-and-rotate protocol on the two-block target", ok);
    }

    out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? kExitOk : kExitSelftest;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"flat-pair convertibility toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_path;
    app.add_option("--config", config_path, "JSON run configuration file");
    app.add_option("--output", output_path, "write the report to this file instead of stdout");

    auto* entropy =
        app.add_subcommand("entropy", "evaluate the block functional at one parameter point");
    std::string e_pair;
    double e_alpha = 0.5;
    double e_z = 0.0;
    double e_w = 0.0;
    bool e_tropical = false;
    bool e_experimental = false;
    entropy->add_option("--pair", e_pair, "flat pair JSON file")->required();
    entropy->add_option("--alpha", e_alpha, "alpha in [0, 1]");
    auto* opt_z = entropy->add_option("--z", e_z, "z >= max(alpha, 1-alpha)");
    auto* opt_w = entropy->add_option("--w", e_w, "compact coordinate in (0, 1]");
    auto* opt_t = entropy->add_flag("--tropical", e_tropical, "evaluate the tropical functional");
    entropy->add_flag("--experimental", e_experimental,
                      "allow alpha in {0,1} with z in (0,1), outside the validated family");
    opt_z->excludes(opt_w);
    opt_z->excludes(opt_t);
    opt_w->excludes(opt_t);

    auto* chk = app.add_subcommand("check", "decide the divergence conditions for a conversion");
    std::string c_in, c_out;
    std::string c_mode = "exact";
    int c_grid = 0;
    chk->add_option("--in", c_in, "input pair JSON file")->required();
    chk->add_option("--out", c_out, "output pair JSON file")->required();
    chk->add_option("--mode", c_mode, "exact (closed domain) or asymptotic (collar inset)")
        ->check(CLI::IsMember({"exact", "asymptotic"}));
    auto* opt_grid = chk->add_option("--grid", c_grid, "grid size override");

    auto* rate = app.add_subcommand("rate", "optimal conversion rate between two pairs");
    std::string r_in, r_out;
    rate->add_option("--in", r_in, "input pair JSON file")->required();
    rate->add_option("--out", r_out, "output pair JSON file")->required();

    auto* certify = app.add_subcommand("certify", "search for a channel witness at a given rate");
    std::string y_in, y_out, y_rate;
    int y_nmax = 0;
    certify->add_option("--in", y_in, "input pair JSON file")->required();
    certify->add_option("--out", y_out, "output pair JSON file")->required();
    certify->add_option("--rate", y_rate, "requested rate as a fraction NUM/DEN")->required();
    auto* opt_nmax = certify->add_option("--nmax", y_nmax, "input copy count cap");

    auto* jordan = app.add_subcommand("jordan", "two-projection decomposition and extraction");
    std::string j_p, j_q;
    bool j_weighted = false;
    jordan->add_option("--p", j_p, "first matrix JSON file")->required();
    jordan->add_option("--q", j_q, "second matrix JSON file")->required();
    jordan->add_flag("--weighted", j_weighted,
                     "treat inputs as PSD states and extract the weighted pair");

    auto* channel = app.add_subcommand("channel", "construct explicit channels");
    channel->require_subcommand(1);
    auto* uhl = channel->add_subcommand("uhlmann", "overlap-raising 2x2 channel");
    double u_fin = 0.0, u_fout = 0.0, u_tol = 1e-8;
    int u_iters = 40000;
    uhl->add_option("--fin", u_fin, "input squared overlap")->required();
    uhl->add_option("--fout", u_fout, "output squared overlap")->required();
    uhl->add_option("--tol", u_tol, "synthesis tolerance");
    uhl->add_option("--iters", u_iters, "synthesis iteration cap");
    auto* pow = channel->add_subcommand("power-universal",
                                        "measure-and-rotate protocol from pure copies");
    std::string p_target;
    double p_f = 0.0;
    int p_mcap = 64;
    pow->add_option("--target", p_target, "target pair JSON file")->required();
    pow->add_option("--F", p_f, "source squared overlap in [0, 1)")->required();
    pow->add_option("--m-cap", p_mcap, "largest copy count materialized");

    auto* smooth = app.add_subcommand("smooth", "rotate overlaps up within a fidelity budget");
    std::string s_pair;
    double s_eps = 0.0;
    smooth->add_option("--target", s_pair, "flat pair JSON file")->required();
    smooth->add_option("--eps", s_eps, "fidelity budget in [0, 1]")->required();

    auto* oracle = app.add_subcommand("oracle", "channel feasibility between tensor powers");
    std::string o_in, o_out;
    int o_n = 1, o_m = 1;
    double o_tol = 0.0;
    int o_iters = 0;
    bool o_emit = false;
    oracle->add_option("--in", o_in, "input pair JSON file")->required();
    oracle->add_option("--out", o_out, "output pair JSON file")->required();
    oracle->add_option("--n", o_n, "input copy count");
    oracle->add_option("--m", o_m, "output copy count");
    auto* opt_otol = oracle->add_option("--tol", o_tol, "feasibility tolerance override");
    auto* opt_oiters = oracle->add_option("--iters", o_iters, "iteration cap override");
    oracle->add_flag("--emit-channel", o_emit, "include the Kraus family in the report");

    auto* selftest = app.add_subcommand("selftest", "run the built-in verification battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitMalformed;
    }

    try {
        Ctx ctx;
        if (!config_path.empty()) ctx.config = RunConfig::from_json(load_json_file(config_path));
        ctx.output_override = output_path;
        ctx.out = &out;

        if (selftest->parsed()) return run_selftest(out);

        if (entropy->parsed()) {
            const FlatPair pair = load_pair(e_pair);
            ParamPoint pt;
            if (e_tropical)
                pt = ParamPoint::tropical();
            else if (opt_w->count() > 0)
                pt = CompactParam{e_alpha, e_w}.to_point();
            else if (opt_z->count() > 0)
                pt = e_experimental ? ParamPoint::experimental_point(e_alpha, e_z)
                                    : ParamPoint::finite(e_alpha, e_z);
            else
                throw MalformedInput("provide one of --z, --w, --tropical");
            nlohmann::json payload;
            payload["point"] = point_json(pt);
            payload["phi"] = json_number(phi(pair, pt));
            payload["log_phi"] = json_number(log_phi(pair, pt));
            payload["d_hat"] = json_number(d_hat(pair, pt));
            emit(ctx, "eq:alphazexplicit", std::move(payload));
            return kExitOk;
        }

        if (chk->parsed()) {
            if (opt_grid->count() > 0) {
                ctx.config.grid_size = c_grid;
                ctx.config.validate();
            }
            const FlatPair in = load_pair(c_in);
            const FlatPair o = load_pair(c_out);
            const CheckOptions opts = ctx.config.check_options();
            const bool asymptotic = c_mode == "asymptotic";
            const Verdict v = asymptotic ? check_asymptotic(in, o, opts)
                                         : check_exact(in, o, opts);
            emit(ctx, asymptotic ? "thm:approximateLS" : "thm:LS", verdict_json(v));
            return kExitOk;
        }

        if (rate->parsed()) {
            const RateReport rep =
                optimal_rate(load_pair(r_in), load_pair(r_out), ctx.config.minimize_options());
            emit(ctx, "thm:rates", rate_json(rep));
            return kExitOk;
        }

        if (certify->parsed()) {
            if (opt_nmax->count() > 0) {
                ctx.config.n_max = y_nmax;
                ctx.config.validate();
            }
            int y_num = 0, y_den = 0;
            const auto slash = y_rate.find('/');
            try {
                size_t used_n = 0, used_d = 0;
                if (slash == std::string::npos) throw std::invalid_argument("no slash");
                y_num = std::stoi(y_rate.substr(0, slash), &used_n);
                y_den = std::stoi(y_rate.substr(slash + 1), &used_d);
                if (used_n != slash || used_d != y_rate.size() - slash - 1)
                    throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw MalformedInput("--rate expects a fraction NUM/DEN, got '" + y_rate + "'");
            }
            const CertifyReport rep = certify_achievable(load_pair(y_in), load_pair(y_out),
                                                         y_num, y_den,
                                                         ctx.config.certify_options());
            nlohmann::json payload;
            payload["outcome"] = outcome_name(rep.outcome);
            payload["n_found"] = rep.n_found;
            payload["m_found"] = rep.m_found;
            payload["rate"] = rate_json(rep.rate);
            payload["channel"] =
                rep.channel ? channel_to_json(*rep.channel) : nlohmann::json(nullptr);
            payload["detail"] = rep.detail;
            emit(ctx, "thm:rates", std::move(payload));
            const bool conclusive = rep.outcome == CertifyOutcome::achieved ||
                                    rep.outcome == CertifyOutcome::refuted_by_rate ||
                                    rep.outcome == CertifyOutcome::trivial;
            return conclusive ? kExitOk : kExitUndetermined;
        }

        if (jordan->parsed()) {
            const Matrix p = matrix_from_json(load_json_file(j_p));
            const Matrix q = matrix_from_json(load_json_file(j_q));
            nlohmann::json payload;
            if (j_weighted) {
                payload["pair"] = pair_to_json(flat_pair_from_dense({p, q}));
                payload["residual"] = nlohmann::json(nullptr);
                payload["blocks"] = nlohmann::json(nullptr);
            } else {
                const JordanDecomposition jd = jordan_decompose(p, q);
                payload["pair"] = pair_to_json(flat_pair_from_projections(p, q));
                payload["residual"] = jd.residual;
                nlohmann::json blocks = nlohmann::json::array();
                for (const JordanBlock& blk : jd.blocks) {
                    nlohmann::json b;
                    b["subspace_dim"] = blk.subspace_dim();
                    b["a_rank"] = blk.a_rank();
                    b["b_rank"] = blk.b_rank();
                    b["overlap_sq"] = blk.overlap_sq;
                    blocks.push_back(std::move(b));
                }
                payload["blocks"] = std::move(blocks);
            }
            emit(ctx, "jordan-lemma", std::move(payload));
            return kExitOk;
        }

        if (uhl->parsed()) {
            const ChannelRep ch = uhlmann_channel(u_fin, u_fout, u_tol, u_iters);
            nlohmann::json payload;
            payload["channel"] = channel_to_json(ch);
            payload["tp_residual"] = ch.tp_residual();
            emit(ctx, "propo:Uhlmann", std::move(payload));
            return kExitOk;
        }

        if (pow->parsed()) {
            const PowerProtocolResult res =
                power_universal_protocol(load_pair(p_target), p_f, p_mcap);
            nlohmann::json payload;
            payload["materialized"] = res.materialized;
            payload["m"] = res.materialized ? nlohmann::json(res.m) : nlohmann::json(nullptr);
            payload["m_bound"] =
                res.materialized ? nlohmann::json(nullptr) : nlohmann::json(res.m_bound);
            payload["channel"] =
                res.channel ? channel_to_json(*res.channel) : nlohmann::json(nullptr);
            emit(ctx, "prop:puS", std::move(payload));
            return kExitOk;
        }

        if (smooth->parsed()) {
            const SmoothResult res = epsilon_smooth(load_pair(s_pair), s_eps);
            nlohmann::json payload;
            payload["pair"] = pair_to_json(res.pair);
            payload["eta"] = res.eta;
            payload["fidelity_bound"] = res.fidelity_bound;
            emit(ctx, "thm:approximateLS", std::move(payload));
            return kExitOk;
        }

        if (oracle->parsed()) {
            if (opt_otol->count() > 0) ctx.config.feas_tolerance = o_tol;
            if (opt_oiters->count() > 0) ctx.config.feas_max_iters = o_iters;
            ctx.config.validate();
            FeasibilityProblem pr = tensor_instance(load_pair(o_in), load_pair(o_out), o_n, o_m,
                                                    ctx.config.dimension_cap);
            pr.tolerance = ctx.config.feas_tolerance;
            pr.max_iters = ctx.config.feas_max_iters;
            const FeasibilityResult res = solve(pr);
            nlohmann::json payload;
            payload["status"] =
                res.status == FeasStatus::feasible ? "feasible" : "undetermined";
            payload["residual"] = res.residual;
            payload["iterations"] = res.iterations;
            payload["channel"] = res.channel && o_emit ? channel_to_json(*res.channel)
                                                       : nlohmann::json(nullptr);
            emit(ctx, "eq:maj", std::move(payload));
            return res.status == FeasStatus::feasible ? kExitOk : kExitUndetermined;
        }

        throw MalformedInput("no subcommand selected");
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violation: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const MalformedInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitUndetermined;
    }
}

}  // namespace flatmaj::cli
