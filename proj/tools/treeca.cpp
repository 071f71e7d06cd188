// treeca: reversibility, evolution, orbits, and rendering of linear cellular
// automata on finite d-ary trees with periodic boundary condition over Z_m.
//
// Exit codes: check uses 0 = reversible, 1 = irreversible, 2 = error;
// verify exits 1 when any formula/oracle disagreement appears; everything
// else uses 0 = ok, 2 = error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "treeca/treeca.hpp"

namespace {

std::uint64_t node_cap_from_env() {
    if (const char* env = std::getenv("TREECA_NODE_CAP")) {
        try {
            const unsigned long long v = std::stoull(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        throw treeca::Error(std::string("bad TREECA_NODE_CAP value: ") + env);
    }
    return treeca::default_node_cap;
}

std::vector<std::uint32_t> parse_coeff_list(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw treeca::Error("empty entry in coefficient list '" + text + "'");
        out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    }
    if (out.empty()) throw treeca::Error("empty coefficient list");
    return out;
}

// "a..b" or a single "a"
std::pair<long, long> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const long v = std::stol(text);
        return {v, v};
    }
    const long lo = std::stol(text.substr(0, dots));
    const long hi = std::stol(text.substr(dots + 2));
    if (hi < lo) throw treeca::Error("empty range '" + text + "'");
    return {lo, hi};
}

treeca::Configuration load_configuration(const std::string& path, std::uint64_t cap) {
    std::ifstream in(path);
    if (!in) throw treeca::Error("cannot open " + path);
    return treeca::parse_configuration(in, cap);
}

void store_configuration(const treeca::Configuration& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw treeca::Error("cannot write " + path);
    treeca::write_configuration(t, out);
}

void print_report(const treeca::LinearRule& rule, const treeca::TreeShape& shape,
                  const treeca::ReversibilityReport& report) {
    std::cout << "rule: m=" << rule.modulus() << " d=" << rule.arity()
              << " n=" << shape.height() << " b=" << rule.center() << " c=";
    for (std::size_t i = 0; i < rule.child_coeffs().size(); ++i) {
        if (i != 0) std::cout << ',';
        std::cout << rule.child_coeffs()[i];
    }
    std::cout << '\n';
    std::cout << "reversible: " << (report.reversible ? "yes" : "no") << '\n';
    std::cout << "det: " << report.det << " (mod " << rule.modulus() << ")\n";
    std::cout << "gcd(det, m): " << report.det_gcd << '\n';
    std::cout << "factors: sign=" << (report.factor_sign > 0 ? "+1" : "-1")
              << " (b+K)=" << report.factor_bc << " b^E=" << report.factor_bpow
              << " g(K)=" << report.factor_g << '\n';
    std::cout << "decided_by: " << treeca::to_string(report.decided_by) << '\n';
}

struct RuleFlags {
    std::uint32_t m = 2;
    int d = 2;
    int n = 2;
    std::uint32_t b = 1;
    std::string c_text = "1,1";

    treeca::LinearRule rule() const {
        auto coeffs = parse_coeff_list(c_text);
        if (static_cast<int>(coeffs.size()) != d) {
            throw treeca::Error("expected " + std::to_string(d) + " child coefficients, got " +
                                std::to_string(coeffs.size()));
        }
        return treeca::LinearRule(m, b, std::move(coeffs));
    }
};

void add_rule_flags(CLI::App* cmd, RuleFlags& flags, bool with_shape) {
    cmd->add_option("--m", flags.m, "modulus")->required();
    cmd->add_option("--d", flags.d, "tree arity")->required();
    if (with_shape) cmd->add_option("--n", flags.n, "tree height")->required();
    cmd->add_option("--b", flags.b, "center coefficient")->required();
    cmd->add_option("--c", flags.c_text, "child coefficients c1,c2,...")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear cellular automata on trees with periodic boundary"};
    app.require_subcommand(1);

    // check
    RuleFlags check_flags;
    std::string check_mode = "auto";
    auto* cmd_check = app.add_subcommand("check", "decide reversibility of a rule");
    add_rule_flags(cmd_check, check_flags, true);
    cmd_check->add_option("--mode", check_mode, "formula|oracle|auto")
        ->check(CLI::IsMember({"formula", "oracle", "auto"}));

    // det
    RuleFlags det_flags;
    std::string det_mode = "both";
    std::string det_dump;
    auto* cmd_det = app.add_subcommand("det", "determinant of the update matrix");
    add_rule_flags(cmd_det, det_flags, true);
    cmd_det->add_option("--mode", det_mode, "formula|oracle|both")
        ->check(CLI::IsMember({"formula", "oracle", "both"}));
    cmd_det->add_option("--dump", det_dump, "write the built matrix to this file");

    // verify
    std::string verify_m = "2..4", verify_d = "2", verify_n = "2..5";
    std::uint64_t verify_max_tuples = 100000, verify_seed = 0, verify_oracle_cap = 1024;
    std::string verify_criteria = "none";
    auto* cmd_verify = app.add_subcommand("verify", "formula-vs-oracle sweep, CSV to stdout");
    cmd_verify->add_option("--m", verify_m, "modulus range, e.g. 2..8");
    cmd_verify->add_option("--d", verify_d, "arity range");
    cmd_verify->add_option("--n", verify_n, "height range");
    cmd_verify->add_option("--max-tuples", verify_max_tuples,
                           "coefficient tuples per (m,d,n) cell; sampled beyond");
    cmd_verify->add_option("--seed", verify_seed, "sampling seed");
    cmd_verify->add_option("--oracle-cap", verify_oracle_cap,
                           "skip the dense oracle above this node count");
    cmd_verify->add_option("--criteria", verify_criteria, "none|p2|p3|pow2")
        ->check(CLI::IsMember({"none", "p2", "p3", "pow2"}));

    // evolve
    std::string evolve_in, evolve_out;
    std::uint64_t evolve_steps = 1;
    bool evolve_backward = false;
    std::uint32_t evolve_b = 1;
    std::string evolve_c = "1,1";
    auto* cmd_evolve = app.add_subcommand("evolve", "step a configuration file");
    cmd_evolve->add_option("--in", evolve_in, "input configuration file")->required();
    cmd_evolve->add_option("--out", evolve_out, "output configuration file")->required();
    cmd_evolve->add_option("--steps", evolve_steps, "number of steps");
    cmd_evolve->add_option("--b", evolve_b, "center coefficient")->required();
    cmd_evolve->add_option("--c", evolve_c, "child coefficients")->required();
    cmd_evolve->add_flag("--backward", evolve_backward,
                         "step backwards via preimages (reversible rules only)");

    // orbit
    std::string orbit_in;
    std::uint64_t orbit_max_steps = 1000000;
    std::uint32_t orbit_b = 1;
    std::string orbit_c = "1,1";
    auto* cmd_orbit = app.add_subcommand("orbit", "transient and period of a configuration");
    cmd_orbit->add_option("--in", orbit_in, "input configuration file")->required();
    cmd_orbit->add_option("--b", orbit_b, "center coefficient")->required();
    cmd_orbit->add_option("--c", orbit_c, "child coefficients")->required();
    cmd_orbit->add_option("--max-steps", orbit_max_steps, "iteration bound");

    // global-period
    RuleFlags period_flags;
    std::uint64_t period_max_steps = 1000000;
    auto* cmd_period = app.add_subcommand("global-period", "eventual period of the whole map");
    add_rule_flags(cmd_period, period_flags, true);
    cmd_period->add_option("--max-steps", period_max_steps, "iteration bound");

    // render
    std::string render_in, render_out;
    std::uint64_t render_steps = 0;
    std::uint32_t render_b = 1;
    std::string render_c;
    double render_radius_step = 26.0, render_node_radius = 8.0;
    auto* cmd_render = app.add_subcommand("render", "radial SVG of a configuration");
    cmd_render->add_option("--in", render_in, "input configuration file")->required();
    cmd_render->add_option("--out", render_out, "output SVG file")->required();
    cmd_render->add_option("--steps", render_steps,
                           "also render this many evolution steps as a strip");
    cmd_render->add_option("--b", render_b, "center coefficient (with --steps)");
    cmd_render->add_option("--c", render_c, "child coefficients (with --steps)");
    cmd_render->add_option("--radius-step", render_radius_step, "ring spacing");
    cmd_render->add_option("--node-radius", render_node_radius, "disk radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or the help text
        return code == 0 ? 0 : 2;
    }

    try {
        const std::uint64_t cap = node_cap_from_env();

        if (cmd_check->parsed()) {
            const auto rule = check_flags.rule();
            const treeca::TreeShape shape(check_flags.d, check_flags.n, cap);
            const auto mode = check_mode == "formula" ? treeca::CheckMode::formula
                              : check_mode == "oracle" ? treeca::CheckMode::oracle
                                                       : treeca::CheckMode::automatic;
            const auto report = treeca::is_reversible(rule, shape, mode);
            print_report(rule, shape, report);
            return report.reversible ? 0 : 1;
        }

        if (cmd_det->parsed()) {
            const auto rule = det_flags.rule();
            const treeca::TreeShape shape(det_flags.d, det_flags.n, cap);
            if (det_mode != "oracle") {
                std::cout << "det_formula=" << treeca::det_formula(rule, shape).det << '\n';
            }
            if (det_mode != "formula") {
                const auto mat = treeca::build_matrix(rule, shape);
                std::cout << "det_oracle=" << treeca::det_exact_mod(mat) << '\n';
                if (!det_dump.empty()) {
                    std::ofstream out(det_dump);
                    if (!out) throw treeca::Error("cannot write " + det_dump);
                    treeca::write_matrix(mat, out);
                }
            } else if (!det_dump.empty()) {
                std::ofstream out(det_dump);
                if (!out) throw treeca::Error("cannot write " + det_dump);
                treeca::write_matrix(treeca::build_matrix(rule, shape), out);
            }
            return 0;
        }

        if (cmd_verify->parsed()) {
            treeca::SweepOptions opt;
            const auto [m_lo, m_hi] = parse_range(verify_m);
            const auto [d_lo, d_hi] = parse_range(verify_d);
            const auto [n_lo, n_hi] = parse_range(verify_n);
            opt.m_lo = static_cast<std::uint32_t>(m_lo);
            opt.m_hi = static_cast<std::uint32_t>(m_hi);
            opt.d_lo = static_cast<int>(d_lo);
            opt.d_hi = static_cast<int>(d_hi);
            opt.n_lo = static_cast<int>(n_lo);
            opt.n_hi = static_cast<int>(n_hi);
            opt.max_tuples = verify_max_tuples;
            opt.seed = verify_seed;
            opt.oracle_cap = verify_oracle_cap;
            opt.node_cap = cap;
            opt.criteria = verify_criteria == "p2"     ? treeca::SweepCriteria::p2
                           : verify_criteria == "p3"   ? treeca::SweepCriteria::p3
                           : verify_criteria == "pow2" ? treeca::SweepCriteria::pow2
                                                       : treeca::SweepCriteria::none;
            const auto result = treeca::run_sweep(opt);
            treeca::write_csv(result, std::cout, opt.criteria != treeca::SweepCriteria::none);
            return result.disagreements == 0 ? 0 : 1;
        }

        if (cmd_evolve->parsed()) {
            auto t = load_configuration(evolve_in, cap);
            const treeca::LinearRule rule(t.modulus(), evolve_b, parse_coeff_list(evolve_c));
            for (std::uint64_t i = 0; i < evolve_steps; ++i) {
                t = evolve_backward ? treeca::preimage(t, rule) : treeca::evolve(t, rule);
            }
            store_configuration(t, evolve_out);
            return 0;
        }

        if (cmd_orbit->parsed()) {
            const auto t = load_configuration(orbit_in, cap);
            const treeca::LinearRule rule(t.modulus(), orbit_b, parse_coeff_list(orbit_c));
            const auto summary = treeca::orbit(t, rule, orbit_max_steps);
            if (!summary) {
                std::cerr << "no repeat within " << orbit_max_steps << " steps\n";
                return 2;
            }
            std::cout << "transient=" << summary->transient << ", period=" << summary->period
                      << '\n';
            return 0;
        }

        if (cmd_period->parsed()) {
            const auto rule = period_flags.rule();
            const treeca::TreeShape shape(period_flags.d, period_flags.n, cap);
            const auto order = treeca::global_period(rule, shape, period_max_steps);
            if (!order) {
                std::cerr << "no repeat within " << period_max_steps << " steps\n";
                return 2;
            }
            std::cout << "preperiod=" << order->preperiod << ", period=" << order->period << '\n';
            return 0;
        }

        if (cmd_render->parsed()) {
            const auto t = load_configuration(render_in, cap);
            const auto palette = treeca::Palette::standard(t.modulus());
            treeca::RenderGeometry geo;
            geo.radius_step = render_radius_step;
            geo.node_radius = render_node_radius;
            std::string svg;
            if (render_steps == 0) {
                svg = treeca::render_svg(t, palette, geo);
            } else {
                if (render_c.empty()) {
                    throw treeca::Error("--steps needs the rule: pass --b and --c");
                }
                const treeca::LinearRule rule(t.modulus(), render_b, parse_coeff_list(render_c));
                std::vector<treeca::Configuration> frames{t};
                for (std::uint64_t i = 0; i < render_steps; ++i) {
                    frames.push_back(treeca::evolve(frames.back(), rule));
                }
                svg = treeca::render_strip(frames, palette, geo);
            }
            std::ofstream out(render_out);
            if (!out) throw treeca::Error("cannot write " + render_out);
            out << svg;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
