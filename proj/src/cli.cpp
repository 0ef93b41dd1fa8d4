#include "persuasion/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "persuasion/equilibrium.hpp"
#include "persuasion/extensions.hpp"
#include "persuasion/run_config.hpp"

namespace persuasion::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double snap_to_grid(double mu, int grid_points) {
    double step = 1.0 / (grid_points - 1);
    return std::round(mu / step) * step;
}

json dist_json(const BeliefDistribution& d) {
    json j;
    j["points"] = d.points();
    j["weights"] = d.weights();
    j["mean"] = d.mean();
    return j;
}

json report_json(const EquilibriumReport& rep) {
    json j;
    j["verdict"] = to_string(rep.verdict);
    j["closed_form_equilibrium"] = rep.closed_form_equilibrium;
    j["sender_payoffs"] = {rep.sender1_payoff, rep.sender2_payoff};
    j["receiver_value"] = rep.receiver_value;
    j["margin"] = rep.margin;
    j["margin_favorable"] = rep.margin_favorable;
    j["region_note"] = rep.region_note;
    if (rep.best_deviation) {
        json d;
        d["sender"] = rep.best_deviation->sender;
        d["distribution"] = dist_json(rep.best_deviation->dist);
        d["gain"] = rep.best_deviation->gain_neutral;
        d["gain_favorable"] = rep.best_deviation->gain_favorable;
        d["response_trace"] = rep.best_deviation->trace;
        j["best_deviation"] = d;
    }
    return j;
}

json strategy_json(const ReceiverStrategy& s) {
    json j;
    j["visits_anyone"] = s.visits_anyone;
    j["first_visit_prob"] = s.first_visit_prob;
    j["stage1"] = dist_json(s.stage1.dist);
    json entries = json::array();
    for (const auto& e : s.stage2) {
        json je;
        je["stage1_belief"] = e.stage1_belief;
        je["weight"] = e.weight;
        je["action"] = e.action == StopAction::SelectVisited ? "select_visited"
                       : e.action == StopAction::SelectOther ? "select_other"
                                                             : "continue";
        je["stage2_garbling"] = dist_json(e.garbling.dist);
        je["select_visited_prob"] = e.select_first_prob;
        entries.push_back(je);
    }
    j["stage2"] = entries;
    j["value"] = s.value;
    j["value_decomposition"] = {{"gross", s.gross_value},
                                {"stage1_cost", s.stage1_cost},
                                {"stage2_cost", s.stage2_cost}};
    j["sender_payoffs"] = {s.sender1_payoff, s.sender2_payoff};
    return j;
}

struct ProfileSpec {
    enum class Kind { Full, None, Binary, File } kind = Kind::Full;
    double l = 0.0, h = 1.0;
    std::string path;
};

ProfileSpec parse_profile(const std::string& s) {
    ProfileSpec p;
    if (s == "full") {
        p.kind = ProfileSpec::Kind::Full;
    } else if (s == "none") {
        p.kind = ProfileSpec::Kind::None;
    } else if (s.rfind("binary:", 0) == 0) {
        p.kind = ProfileSpec::Kind::Binary;
        auto body = s.substr(7);
        auto comma = body.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("profile: expected binary:l,h");
        p.l = std::stod(body.substr(0, comma));
        p.h = std::stod(body.substr(comma + 1));
    } else if (s.rfind("file:", 0) == 0) {
        p.kind = ProfileSpec::Kind::File;
        p.path = s.substr(5);
    } else {
        throw std::invalid_argument(
            "profile: expected full | none | binary:l,h | file:<path>");
    }
    return p;
}

BeliefDistribution materialize(const ProfileSpec& p, double mu) {
    switch (p.kind) {
        case ProfileSpec::Kind::Full:
            return BeliefDistribution::full_information(mu);
        case ProfileSpec::Kind::None:
            return BeliefDistribution::point_mass(mu);
        case ProfileSpec::Kind::Binary:
            return BeliefDistribution::binary(p.l, p.h, mu);
        case ProfileSpec::Kind::File: {
            std::ifstream in(p.path);
            if (!in)
                throw std::invalid_argument("profile: cannot open '" + p.path + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            return distribution_from_text(ss.str());
        }
    }
    throw std::invalid_argument("profile: unreachable");
}

CostModel load_cost_schedule(const std::string& path, double mu) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cost schedule: cannot open '" + path + "'");
    double k_floor = -1.0;
    std::vector<std::pair<BeliefDistribution, double>> steps;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("cost schedule: expected 'key = value' lines");
        std::string key = line.substr(a, eq - a);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::string val = line.substr(eq + 1);
        if (key == "k_F" || key == "k_floor") {
            k_floor = std::stod(val);
        } else if (key == "step") {
            auto comma = val.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument(
                    "cost schedule: step expects 'radius, coefficient'");
            double r = std::stod(val.substr(0, comma));
            double k = std::stod(val.substr(comma + 1));
            if (r < 0.0) throw std::invalid_argument("cost schedule: negative radius");
            double lo = std::max(0.0, mu - r), hi = std::min(1.0, mu + r);
            BeliefDistribution ref = r == 0.0
                                         ? BeliefDistribution::point_mass(mu)
                                         : BeliefDistribution::binary(lo, hi, mu);
            steps.emplace_back(std::move(ref), k);
        } else {
            throw std::invalid_argument("cost schedule: unknown key '" + key + "'");
        }
    }
    if (k_floor < 0.0)
        throw std::invalid_argument("cost schedule: missing k_F");
    return CostModel::experiment_dependent(k_floor, std::move(steps));
}

void parse_range(const std::string& s, double& lo, double& hi) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("range: expected 'lo,hi'");
    lo = std::stod(s.substr(0, comma));
    hi = std::stod(s.substr(comma + 1));
    if (!(lo < hi)) throw std::invalid_argument("range: need lo < hi");
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) { out_ << "# schema=1\n"; }
    void header(const std::string& h) { out_ << h << "\n"; }
    template <typename... T>
    void row(T... cells) {
        bool first = true;
        (void)std::initializer_list<int>{(cell(cells, first), 0)...};
        out_ << "\n";
    }

private:
    void cell(double v, bool& first) {
        if (!first) out_ << ",";
        out_ << num(v);
        first = false;
    }
    void cell(const std::string& v, bool& first) {
        if (!first) out_ << ",";
        out_ << v;
        first = false;
    }
    std::ostream& out_;
};

struct CommonOpts {
    RunConfig cfg;
    std::string out_path;
    std::string config_path;
};

DeviationSearchConfig search_config(const RunConfig& cfg) {
    DeviationSearchConfig s;
    s.support_step = cfg.deviation_step;
    s.profit_threshold = cfg.profit_threshold;
    s.grid_points = cfg.grid_points;
    s.tie_rule = cfg.tie_rule;
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out_stream,
        std::ostream& err) {
    CLI::App app{"Two-sender competitive persuasion with a rationally inattentive receiver"};
    app.require_subcommand(1);
    // global flags may appear after the subcommand name
    app.fallthrough();

    CommonOpts common;
    std::string tie_rule_str, format_str;
    app.add_option("--config", common.config_path, "config file (key = value lines)");
    app.add_option("--out", common.out_path, "write output to this file");
    auto* gp = app.add_option("--grid-points", common.cfg.grid_points,
                              "envelope grid points (odd, >= 3)");
    auto* ds = app.add_option("--deviation-step", common.cfg.deviation_step,
                              "deviation support grid step");
    auto* pt = app.add_option("--profit-threshold", common.cfg.profit_threshold,
                              "deviation gain significance threshold");
    auto* tr = app.add_option("--tie-rule", tie_rule_str, "first|second|split");
    auto* of = app.add_option("--format", format_str, "csv|json");
    auto* pl = app.add_flag("--parallel", "parallelize sweeps");
    auto* sd = app.add_option("--seed", common.cfg.seed, "sweep seed");

    // check
    auto* c_check = app.add_subcommand("check", "verify or refute an equilibrium profile")->fallthrough();
    double k = 1.0, mu = 0.5;
    std::string profile_str = "full";
    c_check->add_option("--k", k, "attention cost coefficient")->required();
    c_check->add_option("--mu", mu, "common prior mean")->required();
    c_check->add_option("--profile", profile_str,
                        "full | none | binary:l,h | file:<path>");

    // region
    auto* c_region = app.add_subcommand("region", "full-information verdict sweep (CSV)")->fallthrough();
    std::string mu_range_str = "0,1", k_range_str;
    int steps = 99, k_steps = 1;
    double region_k = 1.0;
    c_region->add_option("--k", region_k, "single k value");
    c_region->add_option("--k-range", k_range_str, "k sweep range lo,hi");
    c_region->add_option("--k-steps", k_steps, "number of k values in the range");
    c_region->add_option("--mu-range", mu_range_str, "mu sweep range lo,hi");
    c_region->add_option("--steps", steps, "number of interior mu points");

    // best-response
    auto* c_br = app.add_subcommand("best-response", "receiver best response to a profile")->fallthrough();
    std::string profile2_str;
    c_br->add_option("--k", k, "attention cost coefficient")->required();
    c_br->add_option("--mu", mu, "common prior mean")->required();
    c_br->add_option("--profile", profile_str, "sender 1 offer (both, unless --profile2)");
    c_br->add_option("--profile2", profile2_str, "sender 2 offer");

    // hetero
    auto* c_het = app.add_subcommand("hetero", "heterogeneous prior means (k = 1)")->fallthrough();
    double mu1 = 0.5, mu2 = 0.5;
    std::string mu1_range_str, mu2_range_str;
    c_het->add_option("--mu1", mu1, "sender 1 prior mean");
    c_het->add_option("--mu2", mu2, "sender 2 prior mean");
    c_het->add_option("--mu1-range", mu1_range_str, "mu1 sweep range lo,hi");
    c_het->add_option("--mu2-range", mu2_range_str, "mu2 sweep range lo,hi");
    c_het->add_option("--steps", steps, "interior points per axis");

    // variant
    auto* c_var = app.add_subcommand("variant", "experiment-dependent attention costs")->fallthrough();
    std::string schedule_path;
    c_var->add_option("--mu", mu, "common prior mean");
    c_var->add_option("--cost-schedule", schedule_path, "schedule file")->required();
    c_var->add_option("--mu-range", mu_range_str, "mu sweep range lo,hi");
    c_var->add_option("--steps", steps, "number of interior mu points");
    bool variant_sweep = false;
    c_var->add_flag("--sweep", variant_sweep, "emit a CSV sweep over mu");

    // single-sender
    auto* c_ss = app.add_subcommand("single-sender", "single-sender benchmark")->fallthrough();
    double lambda_threshold = 0.6;
    std::string offer_str;
    c_ss->add_option("--lambda", lambda_threshold, "acceptance threshold")->required();
    c_ss->add_option("--mu", mu, "prior mean")->required();
    c_ss->add_option("--k", k, "attention cost coefficient")->required();
    c_ss->add_option("--offer", offer_str,
                     "evaluate a given offer instead of solving (profile syntax)");

    // k0
    auto* c_k0 = app.add_subcommand("k0", "costless-attention benchmarks")->fallthrough();
    std::string k0_mode = "uniform";
    double lambda_visit = 0.5;
    int k0_n = 10;
    c_k0->add_option("--mode", k0_mode, "uniform | atom | fullinfo")->required();
    c_k0->add_option("--mu", mu, "prior mean")->required();
    c_k0->add_option("--lambda-visit", lambda_visit, "first-visit probability (atom mode)");
    c_k0->add_option("--n", k0_n, "deviation family index (fullinfo mode)");

    // envelope-dump
    auto* c_env = app.add_subcommand("envelope-dump", "stage-2 payoff and envelope samples (CSV)")->fallthrough();
    double env_x = 0.5, env_l = 0.0, env_h = 1.0;
    c_env->add_option("--k", k, "attention cost coefficient")->required();
    c_env->add_option("--mu", mu, "prior mean")->required();
    c_env->add_option("--x", env_x, "stage-1 belief")->required();
    c_env->add_option("--lo", env_l, "support lower bound");
    c_env->add_option("--hi", env_h, "support upper bound");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out_stream << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        // Config file first, then explicit flags override.
        if (!common.config_path.empty()) {
            RunConfig file_cfg = load_config(common.config_path);
            RunConfig flags = common.cfg;
            common.cfg = file_cfg;
            if (gp->count()) common.cfg.grid_points = flags.grid_points;
            if (ds->count()) common.cfg.deviation_step = flags.deviation_step;
            if (pt->count()) common.cfg.profit_threshold = flags.profit_threshold;
            if (sd->count()) common.cfg.seed = flags.seed;
        }
        if (tr->count()) {
            if (tie_rule_str == "first") common.cfg.tie_rule = TieRule::FirstVisited;
            else if (tie_rule_str == "second") common.cfg.tie_rule = TieRule::SecondVisited;
            else if (tie_rule_str == "split") common.cfg.tie_rule = TieRule::SplitEven;
            else throw std::invalid_argument("--tie-rule: expected first/second/split");
        }
        if (of->count()) {
            if (format_str == "csv") common.cfg.output_format = OutputFormat::Csv;
            else if (format_str == "json") common.cfg.output_format = OutputFormat::Json;
            else throw std::invalid_argument("--format: expected csv/json");
        }
        if (pl->count()) common.cfg.parallel = true;
        common.cfg.validate();

        std::ofstream file_out;
        std::ostream* sink = &out_stream;
        if (!common.out_path.empty()) {
            file_out.open(common.out_path);
            if (!file_out)
                throw std::invalid_argument("--out: cannot open '" + common.out_path + "'");
            sink = &file_out;
        }
        std::ostream& out = *sink;
        DeviationSearchConfig scfg = search_config(common.cfg);

        if (*c_check) {
            ModelParams mp{k, mu, 0.0, 1.0};
            ProfileSpec prof = parse_profile(profile_str);
            EquilibriumReport rep;
            if (prof.kind == ProfileSpec::Kind::Full) {
                rep = check_full_info(mp, scfg);
            } else if (prof.kind == ProfileSpec::Kind::None) {
                rep = check_uninformative(mp);
            } else {
                BeliefDistribution p = materialize(prof, mu);
                if (p.binary_support())
                    rep = check_binary_symmetric(p, mp, scfg);
                else
                    rep = check_outcome_equivalent(p, p, mp);
            }
            json j;
            j["k"] = k;
            j["mu"] = mu;
            j["mu_snapped"] = snap_to_grid(mu, common.cfg.grid_points);
            j["profile"] = profile_str;
            j["report"] = report_json(rep);
            out << j.dump(2) << "\n";
            return rep.out_of_region ? 3 : 0;
        }

        if (*c_region) {
            std::vector<double> ks;
            if (!k_range_str.empty()) {
                double klo, khi;
                parse_range(k_range_str, klo, khi);
                if (k_steps < 1) throw std::invalid_argument("--k-steps must be >= 1");
                for (int i = 0; i < k_steps; ++i)
                    ks.push_back(k_steps == 1 ? klo
                                              : klo + (khi - klo) * i / (k_steps - 1));
            } else {
                ks.push_back(region_k);
            }
            double mlo, mhi;
            parse_range(mu_range_str, mlo, mhi);
            CsvWriter csv(out);
            csv.header("mu,k,verdict,margin");
            for (double kv : ks) {
                auto cells = region_sweep(kv, mlo, mhi, steps, scfg,
                                          common.cfg.parallel);
                for (const auto& c : cells)
                    csv.row(c.mu, c.k, to_string(c.verdict), c.margin);
            }
            return 0;
        }

        if (*c_br) {
            ModelParams mp{k, mu, 0.0, 1.0};
            BeliefDistribution p1 = materialize(parse_profile(profile_str), mu);
            BeliefDistribution p2 = profile2_str.empty()
                                        ? p1
                                        : materialize(parse_profile(profile2_str), mu);
            OracleConfig ocfg{common.cfg.grid_points, common.cfg.deviation_step};
            ReceiverStrategy s = best_response(p1, p2, mp, common.cfg.tie_rule, ocfg);
            json j;
            j["k"] = k;
            j["mu"] = mu;
            j["mu_snapped"] = snap_to_grid(mu, common.cfg.grid_points);
            j["strategy"] = strategy_json(s);
            out << j.dump(2) << "\n";
            return 0;
        }

        if (*c_het) {
            bool sweep = !mu1_range_str.empty() || !mu2_range_str.empty();
            if (!sweep) {
                HeteroParams hp{mu1, mu2, 1.0};
                EquilibriumReport rep = check_hetero_fullinfo(hp);
                json j;
                j["mu1"] = mu1;
                j["mu2"] = mu2;
                j["report"] = report_json(rep);
                try {
                    j["hetero_value"] = hetero_value(hp);
                    auto s1 = hetero_stage1(hp, 2);
                    json set = json::array();
                    for (auto& iv : s1.support) set.push_back({iv.lo, iv.hi});
                    j["stage1_case"] = s1.case_id;
                    j["stage1_support_set"] = set;
                } catch (const out_of_region_error&) {
                    j["hetero_value"] = nullptr;
                }
                out << j.dump(2) << "\n";
                return rep.out_of_region ? 3 : 0;
            }
            double lo1, hi1, lo2, hi2;
            parse_range(mu1_range_str.empty() ? "0,1" : mu1_range_str, lo1, hi1);
            parse_range(mu2_range_str.empty() ? "0,1" : mu2_range_str, lo2, hi2);
            CsvWriter csv(out);
            csv.header("mu1,mu2,verdict,value");
            for (int i = 0; i < steps; ++i) {
                for (int jx = 0; jx < steps; ++jx) {
                    double m1 = lo1 + (i + 0.5) * (hi1 - lo1) / steps;
                    double m2 = lo2 + (jx + 0.5) * (hi2 - lo2) / steps;
                    HeteroParams hp{m1, m2, 1.0};
                    EquilibriumReport rep = check_hetero_fullinfo(hp);
                    double val = std::numeric_limits<double>::quiet_NaN();
                    if (!rep.out_of_region) val = rep.receiver_value;
                    csv.row(m1, m2, to_string(rep.verdict), val);
                }
            }
            return 0;
        }

        if (*c_var) {
            if (!variant_sweep) {
                CostModel cm = load_cost_schedule(schedule_path, mu);
                EquilibriumReport rep = check_costvariant_fullinfo(mu, cm, scfg);
                json j;
                j["mu"] = mu;
                j["schedule"] = schedule_path;
                auto full = BeliefDistribution::full_information(mu);
                j["k_floor"] = cm.coefficient(&full);
                j["report"] = report_json(rep);
                out << j.dump(2) << "\n";
                return rep.out_of_region ? 3 : 0;
            }
            double mlo, mhi;
            parse_range(mu_range_str, mlo, mhi);
            CsvWriter csv(out);
            csv.header("mu,k_floor,verdict,margin");
            for (int i = 0; i < steps; ++i) {
                double m = mlo + (i + 0.5) * (mhi - mlo) / steps;
                CostModel cm = load_cost_schedule(schedule_path, m);
                EquilibriumReport rep = check_costvariant_fullinfo(m, cm, scfg);
                auto full = BeliefDistribution::full_information(m);
                csv.row(m, cm.coefficient(&full), to_string(rep.verdict), rep.margin);
            }
            return 0;
        }

        if (*c_ss) {
            SingleSenderParams ssp{lambda_threshold, k, mu};
            json j;
            j["lambda"] = lambda_threshold;
            j["mu"] = mu;
            j["k"] = k;
            if (!offer_str.empty()) {
                BeliefDistribution offer = materialize(parse_profile(offer_str), mu);
                auto [garbling, acc] = single_sender_response(
                    offer, ssp, common.cfg.grid_points);
                j["offer"] = dist_json(offer);
                j["receiver_garbling"] = dist_json(garbling);
                j["acceptance"] = acc;
            } else {
                SingleSenderSolution sol = single_sender_solve(
                    ssp, common.cfg.deviation_step, common.cfg.grid_points);
                j["sender_distribution"] = dist_json(sol.sender_distribution);
                j["receiver_garbling"] = dist_json(sol.receiver_garbling);
                j["acceptance"] = sol.acceptance;
            }
            out << j.dump(2) << "\n";
            return 0;
        }

        if (*c_k0) {
            json j;
            j["mu"] = mu;
            if (k0_mode == "uniform") {
                auto rep = kzero_uniform_check(mu, 0.01);
                j["mode"] = "uniform";
                j["on_path_payoff"] = rep.on_path_payoff;
                j["max_abs_dev_from_half"] = rep.max_abs_dev_from_half;
                j["deviations_checked"] = rep.deviations_checked;
                j["equilibrium"] = rep.equilibrium;
            } else if (k0_mode == "atom") {
                auto rep = kzero_atom_check(mu, lambda_visit, 0.01);
                j["mode"] = "atom";
                j["lambda_visit"] = lambda_visit;
                j["on_path_payoff1"] = rep.on_path_payoff1;
                j["zero_one_gain1"] = rep.zero_one_gain1;
                j["zero_one_gain2"] = rep.zero_one_gain2;
                j["max_abs_binary_dev_from_half"] = rep.max_abs_binary_dev_from_half;
                j["equilibrium"] = rep.equilibrium;
            } else if (k0_mode == "fullinfo") {
                auto rep = kzero_fullinfo_refute(mu, k0_n);
                j["mode"] = "fullinfo";
                j["n"] = rep.n;
                j["eta"] = rep.eta;
                j["epsilon"] = rep.epsilon;
                j["lhs"] = rep.lhs;
                j["profitable"] = rep.profitable;
                j["smallest_profitable_n"] = rep.smallest_profitable_n;
            } else {
                throw std::invalid_argument("k0 --mode: expected uniform/atom/fullinfo");
            }
            out << j.dump(2) << "\n";
            return 0;
        }

        if (*c_env) {
            double mu_s = snap_to_grid(mu, common.cfg.grid_points);
            ModelParams mp{k, mu_s, env_l, env_h};
            mp.validate();
            auto bps = stage2_case_breakpoints(mp);
            bps.push_back(env_x);
            auto f = SampledFunction::sample(
                [&](double y) { return stage2_payoff(y, env_x, mp); }, env_l,
                env_h, common.cfg.grid_points, bps);
            EnvelopeSolution env = concave_envelope(f);
            CsvWriter csv(out);
            csv.header("y,f,envelope");
            for (std::size_t i = 0; i < f.grid.size(); ++i)
                csv.row(f.grid[i], f.values[i], env.value_at(f.grid[i]));
            return 0;
        }

        err << "no subcommand selected\n";
        return 2;
    } catch (const out_of_region_error& e) {
        err << "out of characterized region: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace persuasion::cli
