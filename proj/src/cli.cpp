#include "curvelab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "curvelab/errors.hpp"
#include "curvelab/oracle.hpp"

namespace curvelab {

namespace {

using json = nlohmann::ordered_json;

Rat coeff_from_json(const json& v) {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
    throw ParseError("coefficient must be an integer or a \"p/q\" string");
}

json char_json(const CharData& ch) {
    json out;
    out["genus"] = ch.genus;
    out["char_exponents"] = ch.beta;
    out["semigroup_generators"] = ch.beta_bar;
    out["gcd_chain"] = ch.e;
    out["n_seq"] = ch.n_seq;
    out["conductor"] = ch.conductor;
    return out;
}

// Box dump capped so reports stay reviewable; larger sets keep the summary
// fields and drop the member list.
json value_set_dump(const BoxedValueSet& e) {
    json out;
    out["r"] = e.r;
    out["box_min"] = e.box_min;
    out["box_max"] = e.box_max;
    out["tail_conductor"] = e.tail_conductor;
    out["box_member_count"] = e.box_member_count();
    if (e.volume() <= 4096) {
        json members = json::array();
        ValueVector w = e.box_min;
        for (;;) {
            if (e.member(w)) members.push_back(w);
            std::size_t k = 0;
            while (k < w.size() && ++w[k] > e.box_max[k]) {
                w[k] = e.box_min[k];
                ++k;
            }
            if (k == w.size()) break;
        }
        out["members"] = std::move(members);
    } else {
        out["members_omitted"] = true;
    }
    return out;
}

std::string dump_text(const json& j) { return j.dump(2) + "\n"; }

bool same_branch(const Parametrization& a, const Parametrization& b) {
    if (a.n != b.n || a.axis_swap != b.axis_swap) return false;
    const std::size_t m = std::max(a.y.c.size(), b.y.c.size());
    for (std::size_t i = 0; i < m; ++i) {
        const Rat ca = i < a.y.c.size() ? a.y.c[i] : Rat(0);
        const Rat cb = i < b.y.c.size() ? b.y.c[i] : Rat(0);
        if (!(ca == cb)) return false;
    }
    return true;
}

std::uint64_t parse_u64(const json& v, const char* what) {
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ParseError(std::string(what) + " must be a nonnegative integer");
    const long long x = v.get<long long>();
    if (x < 0) throw ParseError(std::string(what) + " must be a nonnegative integer");
    return static_cast<std::uint64_t>(x);
}

} // namespace

ParsedSpec parse_spec_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("spec JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("spec must be a JSON object");
    ParsedSpec ps;
    if (j.contains("options")) {
        const auto& o = j.at("options");
        if (!o.is_object()) throw ParseError("options must be an object");
        if (o.contains("oracle")) {
            const std::string v = o.at("oracle").get<std::string>();
            if (v != "on" && v != "off") throw ParseError("options.oracle must be \"on\" or \"off\"");
            ps.oracle = (v == "on");
        }
        if (o.contains("truncation_cap"))
            ps.truncation_cap = static_cast<unsigned>(parse_u64(o.at("truncation_cap"), "truncation_cap"));
        if (o.contains("modular_primes"))
            ps.modular_primes = static_cast<unsigned>(parse_u64(o.at("modular_primes"), "modular_primes"));
    }
    if (j.contains("branches")) {
        if (!j.at("branches").is_array()) throw ParseError("branches must be an array");
        for (const auto& b : j.at("branches")) {
            SpecEntry entry;
            if (b.contains("param") == b.contains("poly"))
                throw ParseError("each branch needs exactly one of \"param\" or \"poly\"");
            if (b.contains("param")) {
                const auto& p = b.at("param");
                const unsigned n = static_cast<unsigned>(parse_u64(p.at("n"), "param.n"));
                std::vector<std::pair<unsigned, Rat>> terms;
                for (const auto& t : p.at("y")) {
                    if (!t.is_array() || t.size() != 2)
                        throw ParseError("param.y entries must be [exponent, coefficient]");
                    terms.emplace_back(static_cast<unsigned>(parse_u64(t.at(0), "exponent")),
                                       coeff_from_json(t.at(1)));
                }
                const bool swap = p.value("axis_swap", false);
                entry.param = make_parametrization(n, terms, swap);
            } else {
                entry.poly = parse_bivar(b.at("poly").get<std::string>());
            }
            ps.entries.push_back(std::move(entry));
        }
    }
    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        ExperimentFamily fam;
        for (const auto& g : e.at("generators")) fam.generators.push_back(parse_u64(g, "generator"));
        if (e.contains("targets"))
            for (const auto& t : e.at("targets")) fam.targets.push_back(parse_u64(t, "target"));
        else if (e.contains("target"))
            fam.targets.push_back(parse_u64(e.at("target"), "target"));
        else
            throw ParseError("experiment needs \"target\" or \"targets\"");
        if (e.contains("samples")) fam.samples = static_cast<unsigned>(parse_u64(e.at("samples"), "samples"));
        if (e.contains("retries")) fam.retries = static_cast<unsigned>(parse_u64(e.at("retries"), "retries"));
        ps.experiment = std::move(fam);
    }
    return ps;
}

CurveSpec assemble_curve(const ParsedSpec& ps, unsigned trunc_hint) {
    CurveSpec spec;
    std::vector<BivarPoly> entry_polys;
    bool product_known = true;
    for (const auto& entry : ps.entries) {
        if (entry.param) {
            spec.branches.push_back(*entry.param);
            if (entry.param->exact) {
                BivarPoly f = implicitize(*entry.param);
                spec.branch_polys.push_back(f);
                entry_polys.push_back(f);
            } else {
                spec.branch_polys.push_back(BivarPoly::zero());
                product_known = false;
            }
        } else {
            BranchList bl = newton_puiseux(*entry.poly, trunc_hint);
            for (const auto& b : bl) {
                spec.branches.push_back(b);
                if (bl.size() == 1)
                    spec.branch_polys.push_back(bivar_normalize(*entry.poly));
                else
                    spec.branch_polys.push_back(b.exact ? implicitize(b) : BivarPoly::zero());
            }
            entry_polys.push_back(*entry.poly);
        }
    }
    for (std::size_t i = 0; i < spec.branches.size(); ++i)
        for (std::size_t k = i + 1; k < spec.branches.size(); ++k)
            if (spec.branches[i].exact && spec.branches[k].exact &&
                same_branch(spec.branches[i], spec.branches[k]))
                throw Error("branches are not distinct");
    if (product_known && !entry_polys.empty()) {
        BivarPoly f = BivarPoly::constant(Rat(1));
        for (const auto& g : entry_polys) f = f * g;
        spec.product = std::move(f);
    }
    return spec;
}

std::string analyze_report(const InvariantReport& rep, const CurveData& cd, std::uint64_t seed) {
    json r;
    r["schema"] = "curvelab-report/1";
    r["seed"] = seed;
    json branches = json::array();
    for (std::size_t i = 0; i < rep.chars.size(); ++i) {
        json b = char_json(rep.chars[i]);
        b["milnor"] = rep.branch_milnor[i];
        b["delta"] = rep.branch_delta[i];
        b["tjurina"] = rep.branch_tjurina[i];
        branches.push_back(std::move(b));
    }
    r["branches"] = std::move(branches);
    r["pairwise_intersections"] = rep.inter;
    json c;
    c["milnor"] = rep.milnor;
    c["delta"] = rep.delta;
    c["semigroup_conductor"] = rep.cs;
    c["tjurina_berger"] = rep.tjurina_berger;
    c["tjurina_closed"] = rep.tjurina_closed ? json(*rep.tjurina_closed) : json(nullptr);
    c["tjurina_oracle"] = rep.tjurina_oracle ? json(*rep.tjurina_oracle) : json(nullptr);
    c["theta"] = rep.theta;
    c["lambda_conductor"] = rep.lambda_conductor;
    c["ratio"] = to_string(rep.ratio);
    r["curve"] = std::move(c);
    json verdicts = json::object();
    bool all = true;
    for (const auto& [name, ok] : rep.verdicts) {
        verdicts[name] = ok;
        all = all && ok;
    }
    r["verdicts"] = std::move(verdicts);
    r["all_passed"] = all;
    std::uint64_t vol = 1;
    bool small = true;
    for (long long x : cd.cs) {
        vol *= static_cast<std::uint64_t>(x + 1);
        if (vol > 4096) { small = false; break; }
    }
    if (small) {
        r["semigroup_values"] = value_set_dump(semigroup_values(cd, seed + 1));
        r["kahler_values"] = value_set_dump(kahler_values(cd, seed + 2));
    }
    return dump_text(r);
}

std::string semigroup_report(const CurveData& cd, const BoxedValueSet& s) {
    json r;
    r["schema"] = "curvelab-semigroup/1";
    json branches = json::array();
    for (const auto& ch : cd.chars) branches.push_back(char_json(ch));
    r["branches"] = std::move(branches);
    r["pairwise_intersections"] = cd.inter;
    r["semigroup_conductor"] = cd.cs;
    r["value_set"] = value_set_dump(s);
    return dump_text(r);
}

std::string lambda_report(const CurveData& cd, const BoxedValueSet& lam) {
    json r;
    r["schema"] = "curvelab-lambda/1";
    r["semigroup_conductor"] = cd.cs;
    r["conductor"] = conductor(lam);
    auto mx = maximals(lam);
    json m;
    m["maximals"] = mx.maximals;
    m["relative_maximals"] = mx.relative_maximals;
    m["absolute_maximals"] = mx.absolute_maximals;
    r["maximals"] = std::move(m);
    r["value_set"] = value_set_dump(lam);
    return dump_text(r);
}

std::string experiment_report_json(const ExperimentResult& res) {
    json r;
    r["schema"] = "curvelab-experiment/1";
    json rows = json::array();
    for (const auto& row : res.rows) {
        json x;
        x["instance"] = row.instance;
        x["target"] = row.target;
        x["generated"] = row.generated;
        if (!row.generated) {
            x["failure"] = row.failure;
        } else {
            x["intersection"] = row.intersection;
            x["tau_berger"] = row.tau_berger;
            x["tau_oracle"] = row.tau_oracle ? json(*row.tau_oracle) : json(nullptr);
        }
        rows.push_back(std::move(x));
    }
    r["rows"] = std::move(rows);
    json sums = json::array();
    for (const auto& s : res.summaries) {
        json x;
        x["target"] = s.target;
        x["min_tau_berger"] = s.any ? json(s.min_tau) : json(nullptr);
        x["reference_2I_plus_c"] = s.reference;
        sums.push_back(std::move(x));
    }
    r["summaries"] = std::move(sums);
    return dump_text(r);
}

std::string experiment_report_table(const ExperimentResult& res) {
    std::ostringstream out;
    out << "instance\ttarget\tintersection\ttau_berger\ttau_oracle\n";
    for (const auto& row : res.rows) {
        out << row.instance << '\t' << row.target << '\t';
        if (!row.generated) {
            out << "-\t-\t-\t# " << row.failure << '\n';
            continue;
        }
        out << row.intersection << '\t' << row.tau_berger << '\t';
        if (row.tau_oracle)
            out << *row.tau_oracle;
        else
            out << '-';
        out << '\n';
    }
    for (const auto& s : res.summaries) {
        out << "# target " << s.target << ": min tau_berger ";
        if (s.any)
            out << s.min_tau;
        else
            out << '-';
        out << ", reference 2I+c " << s.reference << '\n';
    }
    return out.str();
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"invariants of plane curve singularities"};
    app.require_subcommand(1);

    std::string spec_path, out_path;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    unsigned truncation = 0;
    std::string oracle_flag = "default";
    bool json_flag = false;

    auto add_common = [&](CLI::App* c) {
        c->add_option("spec", spec_path, "curve spec file (JSON)")->required();
        c->add_option("--out", out_path, "write the report here instead of stdout");
        c->add_option("--jobs", jobs, "worker threads for independent checks");
        c->add_option("--seed", seed, "seed for modular primes and experiments");
        c->add_option("--truncation", truncation, "series truncation hint (0 = automatic)");
        c->add_option("--oracle", oracle_flag, "enable the quotient-dimension routes")
            ->check(CLI::IsMember({"on", "off", "default"}));
        c->add_flag("--json", json_flag, "JSON output for the experiment table");
    };
    CLI::App* cmd_analyze = app.add_subcommand("analyze", "full invariant report with verdicts");
    CLI::App* cmd_semigroup = app.add_subcommand("semigroup", "value semigroup data");
    CLI::App* cmd_lambda = app.add_subcommand("lambda", "differential value set data");
    CLI::App* cmd_experiment = app.add_subcommand("experiment", "random equisingular pair sweep");
    for (CLI::App* c : {cmd_analyze, cmd_semigroup, cmd_lambda, cmd_experiment}) add_common(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        std::ifstream in(spec_path);
        if (!in) throw Error("cannot read spec file: " + spec_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        ParsedSpec ps = parse_spec_text(buf.str());

        const bool use_oracle = oracle_flag == "default" ? ps.oracle : (oracle_flag == "on");
        const unsigned trunc_eff = truncation ? truncation : ps.truncation_cap;

        std::string output;
        int code = 0;
        if (cmd_experiment->parsed()) {
            if (!ps.experiment) throw Error("spec has no experiment section");
            ExperimentResult res = run_experiment(*ps.experiment, seed, use_oracle);
            output = json_flag ? experiment_report_json(res) : experiment_report_table(res);
        } else {
            CurveSpec spec = assemble_curve(ps, trunc_eff);
            if (spec.branches.empty()) throw Error("spec has no branches");
            if (cmd_analyze->parsed()) {
                VerifyOptions vo;
                vo.seed = seed;
                vo.jobs = jobs;
                vo.oracle = use_oracle;
                InvariantReport rep = verify_all(spec, vo);
                const CurveData cd = curve_data(spec.branches);
                output = analyze_report(rep, cd, seed);
                for (const auto& [name, ok] : rep.verdicts)
                    if (!ok) code = 2;
            } else if (cmd_semigroup->parsed()) {
                const CurveData cd = curve_data(spec.branches);
                output = semigroup_report(cd, semigroup_values(cd, seed + 1));
            } else {
                const CurveData cd = curve_data(spec.branches);
                output = lambda_report(cd, kahler_values(cd, seed + 2));
            }
        }

        if (out_path.empty()) {
            std::cout << output;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw Error("cannot write output file: " + out_path);
            out << output;
        }
        return code;
    } catch (const TruncationTooSmall& e) {
        std::cerr << "error: truncation too small ("
                  << (truncation ? std::to_string(truncation) : std::string("automatic"))
                  << "): " << e.what() << "\n";
        return 1;
    } catch (const NonReducedInput& e) {
        std::cerr << "error: branches are not distinct: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace curvelab
