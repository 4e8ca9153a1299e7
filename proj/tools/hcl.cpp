// hcl: command-line driver for sampling, projection, detection, recovery and sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "hcl/hcl.hpp"

namespace {

using hcl::Mode;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSelftest = 3;

// Raw flag values; applied over the config file through the same key parser.
struct Flags {
    std::string config;
    std::map<std::string, std::string> values;
    bool wall_time = false;
    bool quick = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key = value configuration file");
    const std::pair<const char*, const char*> keys[] = {
        {"--n", "n"},         {"--d", "d"},           {"--k", "k"},       {"--k-scale", "k_scale"},
        {"--p", "p"},         {"--reps", "reps"},     {"--seed", "seed"}, {"--c-const", "c"},
        {"--alpha", "alpha"}, {"--out", "out"},       {"--workers", "workers"}, {"--tol", "tol"},
        {"--max-iter", "max_iter"}, {"--calibration-reps", "calibration_reps"},
        {"--centering", "centering"}, {"--input", "input"}};
    for (const auto& [flag, key] : keys) {
        const std::string k = key;
        sub->add_option_function<std::string>(flag, [&f, k](const std::string& v) { f.values[k] = v; },
                                              "sets '" + k + "' (comma lists allowed for n, k, k-scale, p)");
    }
    sub->add_flag("--wall-time", f.wall_time, "record per-replicate wall time (breaks byte-identical output)");
}

hcl::ExperimentSpec build_spec(hcl::Mode mode, const Flags& f) {
    hcl::ExperimentSpec spec;
    if (!f.config.empty()) spec = hcl::parse_config_file(f.config);
    spec.mode = mode;
    for (const auto& [k, v] : f.values) hcl::apply_setting(spec, k, v);
    if (f.wall_time) spec.record_wall_time = true;
    spec.validate();
    return spec;
}

bool out_given(const Flags& f, const hcl::ExperimentSpec& spec) { return f.values.count("out") || spec.out_dir != "."; }

std::string out_path(const hcl::ExperimentSpec& spec, const std::string& name) {
    std::filesystem::create_directories(spec.out_dir);
    return (std::filesystem::path(spec.out_dir) / name).string();
}

hcl::ModelParams single_params(const hcl::ExperimentSpec& spec) {
    if (spec.n_grid.size() != 1 || spec.p_grid.size() != 1 || spec.k_grid.size() != 1 || spec.k_relative)
        throw hcl::ConfigError("this command needs a single n, k and p");
    hcl::ModelParams params{spec.n_grid[0], spec.d, static_cast<std::uint32_t>(spec.k_grid[0]), spec.p_grid[0]};
    params.validate();
    return params;
}

// Loads --input as an adjacency matrix; hypergraph files also yield their sample.
struct LoadedInput {
    hcl::AdjacencyMatrix a;
    std::optional<hcl::HypergraphSample> sample;
};

LoadedInput load_input(const hcl::ExperimentSpec& spec) {
    LoadedInput in;
    if (hcl::looks_like_hypergraph(spec.input)) {
        in.sample = hcl::read_hypergraph_file(spec.input, spec.p_grid.at(0));
        in.a = hcl::project(*in.sample);
    } else {
        in.a = hcl::read_matrix_file(spec.input);
    }
    return in;
}

int cmd_sample(const hcl::ExperimentSpec& spec, const Flags& f) {
    const auto params = single_params(spec);
    for (int rep = 0; rep < spec.reps; ++rep) {
        const auto s = hcl::sample_hpc(params, hcl::replicate_seed(spec.master_seed, 0, static_cast<std::size_t>(rep)));
        const auto text = hcl::write_hypergraph(s);
        if (!out_given(f, spec) && spec.reps == 1) {
            std::cout << text;
        } else {
            hcl::write_text_file(out_path(spec, "sample_" + std::to_string(rep) + ".hg"), text);
        }
    }
    return 0;
}

int cmd_project(const hcl::ExperimentSpec& spec, const Flags& f) {
    hcl::AdjacencyMatrix a;
    if (!spec.input.empty()) {
        a = load_input(spec).a;
    } else {
        a = hcl::project(hcl::sample_hpc(single_params(spec), hcl::replicate_seed(spec.master_seed, 0, 0)));
    }
    const auto text = hcl::write_matrix(a);
    if (out_given(f, spec)) hcl::write_text_file(out_path(spec, "matrix.csv"), text);
    else std::cout << text;
    return 0;
}

void write_sweep(const hcl::ExperimentResult& res) {
    const auto& spec = res.spec;
    hcl::write_text_file(out_path(spec, "trials.csv"), hcl::emit_csv(res.records));
    hcl::write_text_file(out_path(spec, "summary.csv"), hcl::emit_summary_csv(res));
    if (spec.mode == Mode::calibrate) return;
    for (std::size_t i = 0; i < spec.p_grid.size(); ++i) {
        const auto name = spec.p_grid.size() == 1 ? std::string("heatmap.svg") : "heatmap_p" + std::to_string(i) + ".svg";
        hcl::write_text_file(out_path(spec, name), hcl::emit_svg_heatmap(hcl::heatmap_from(res, spec.p_grid[i])));
    }
}

int cmd_sweep(const hcl::ExperimentSpec& spec) {
    const auto res = hcl::run_experiment(spec);
    write_sweep(res);
    std::cout << hcl::emit_summary_csv(res);
    return 0;
}

int cmd_detect_input(const hcl::ExperimentSpec& spec) {
    const auto in = load_input(spec);
    hcl::ModelParams null{in.a.dim(), in.sample ? in.sample->d() : spec.d, 0, spec.p_grid.at(0)};
    double c = 0.0;
    if (spec.c) {
        c = *spec.c;
    } else {
        c = hcl::calibrate_C(null, spec.alpha, spec.calibration_reps, spec.master_seed, spec.solver,
                             hcl::resolve_workers(spec.workers));
    }
    const auto o = hcl::run_test(in.a, hcl::DetectionConfig{null, c, spec.solver, spec.alpha}, spec.master_seed);
    std::cout << "stat=" << hcl::format_real(o.statistic) << " threshold=" << hcl::format_real(o.threshold)
              << " c=" << hcl::format_real(c) << " reject=" << (o.reject ? 1 : 0) << '\n';
    return 0;
}

int cmd_recover_input(const hcl::ExperimentSpec& spec) {
    const auto in = load_input(spec);
    const int d = in.sample ? in.sample->d() : spec.d;
    // a file without a planted set takes k from the flags
    const bool planted = in.sample && in.sample->params().k > 0;
    const auto k = planted ? in.sample->params().k : static_cast<std::uint32_t>(spec.k_grid.at(0));
    auto o = hcl::spectral_recover(in.a, k, d, spec.p_grid.at(0), spec.solver, spec.master_seed, spec.centering);
    std::cout << "S_hat:";
    for (auto v : o.s_hat) std::cout << ' ' << v + 1;
    std::cout << '\n';
    if (planted) {
        hcl::score(o, in.sample->planted());
        std::cout << "exact=" << (o.exact ? 1 : 0) << " overlap=" << hcl::format_real(o.overlap) << '\n';
    }
    return 0;
}

int cmd_selftest(const hcl::ExperimentSpec& spec, const Flags& f) {
    const auto rep = hcl::run_selftest(spec.master_seed, hcl::resolve_workers(spec.workers), f.quick);
    const auto text = hcl::selftest_text(rep);
    std::cout << text;
    hcl::write_text_file(out_path(spec, "selftest.txt"), text);
    hcl::write_text_file(out_path(spec, "selftest.csv"), hcl::selftest_csv(rep));
    return rep.ok() ? 0 : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planted-clique hypergraph toolkit"};
    app.require_subcommand(1);
    Flags flags;
    const std::pair<const char*, const char*> modes[] = {
        {"sample", "draw hypergraphs and write them in text format"},
        {"project", "write the adjacency matrix of a hypergraph"},
        {"detect", "run or sweep the spectral-norm test"},
        {"recover", "run or sweep spectral top-k recovery"},
        {"calibrate", "estimate the test constant from null replicates"},
        {"phase", "sweep recovery over n and k / recovery_scale"},
        {"selftest", "run the diagnostic battery"}};
    std::map<CLI::App*, Mode> sub_modes;
    for (const auto& [name, help] : modes) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, flags);
        if (std::string(name) == "selftest") sub->add_flag("--quick", flags.quick, "fewer Monte Carlo replicates");
        sub_modes[sub] = hcl::parse_mode(name);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    Mode mode = Mode::recover;
    for (const auto& [sub, m] : sub_modes)
        if (sub->parsed()) mode = m;

    hcl::ExperimentSpec spec;
    try {
        spec = build_spec(mode, flags);
    } catch (const hcl::ConfigError& e) {
        std::cerr << "hcl: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        switch (mode) {
            case Mode::sample: return cmd_sample(spec, flags);
            case Mode::project: return cmd_project(spec, flags);
            case Mode::selftest: return cmd_selftest(spec, flags);
            case Mode::detect:
                if (!spec.input.empty()) return cmd_detect_input(spec);
                return cmd_sweep(spec);
            case Mode::recover:
                if (!spec.input.empty()) return cmd_recover_input(spec);
                return cmd_sweep(spec);
            case Mode::calibrate:
            case Mode::phase: return cmd_sweep(spec);
        }
    } catch (const hcl::ConfigError& e) {
        std::cerr << "hcl: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "hcl: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
