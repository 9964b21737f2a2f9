// Command-line front end: kernel/partition validation, Frobenius formulas
// and cut search, the MM optimizer, KL reports, and the Curie-Weiss
// experiment runners. Machine output is CSV on stdout unless --out is given.
//
// Exit codes: 0 success, 2 invariant violation, 3 infeasible problem size,
// 1 anything else (bad usage, unreadable files).

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "addmix/addmix.hpp"

namespace {

using namespace addmix;

Kernel load_kernel(const std::string& kernel_path, const std::string& pi_path) {
    return validate_kernel(read_matrix_csv(std::filesystem::path(kernel_path)),
                           Distribution(read_distribution_csv(std::filesystem::path(pi_path))));
}

// Applies config file entries first, then any flags the user set on the
// command line, so flags win.
struct ExperimentFlags {
    std::string config_path;
    int d = 4;
    std::vector<double> T;
    std::vector<double> h;
    std::vector<std::string> samplers;
    std::vector<double> alpha_grid;
    std::vector<int> horizons;
    std::string cut_spec;
    std::string out_dir;
    unsigned long long seed = 0;  // reserved; the pipeline is deterministic

    void register_on(CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");  // frees -h for the field flag
        cmd->add_option("--config", config_path, "flat key=value config file");
        cmd->add_option("--d", d, "spin count (state space 2^d)");
        cmd->add_option("--T", T, "temperature grid")->delimiter(',');
        cmd->add_option("--h", h, "external field grid")->delimiter(',');
        cmd->add_option("--samplers", samplers, "subset of P,GP,GPG,A")->delimiter(',');
        cmd->add_option("--alpha-grid", alpha_grid, "mixture weights")->delimiter(',');
        cmd->add_option("--horizons", horizons, "time horizons")->delimiter(',');
        cmd->add_option("--cut", cut_spec, "mag | opt | bitmask:<int>");
        cmd->add_option("--out", out_dir, "output directory for CSV files");
        cmd->add_option("--seed", seed, "reserved (unused; everything is exact)");
    }

    ExperimentConfig build(const CLI::App* cmd) const {
        ExperimentConfig cfg;
        if (!config_path.empty()) apply_config_entries(parse_config_file(config_path), cfg);
        if (cmd->count("--d")) cfg.d = d;
        if (cmd->count("--T")) cfg.temperatures = T;
        if (cmd->count("--h")) cfg.fields = h;
        if (cmd->count("--samplers")) cfg.samplers = samplers;
        if (cmd->count("--alpha-grid")) cfg.alpha_grid = alpha_grid;
        if (cmd->count("--horizons")) cfg.horizons = horizons;
        if (cmd->count("--cut")) {
            const auto [mode, mask] = parse_cut_spec(cut_spec);
            cfg.cut_mode = mode;
            cfg.cut_bitmask = mask;
        }
        if (cmd->count("--out")) cfg.output_dir = out_dir;
        if (cfg.output_dir.empty()) cfg.output_dir = "out";
        return cfg;
    }
};

// Writes to the given file, or stdout when the path is empty.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    if (path.empty()) {
        emit(std::cout);
    } else {
        auto out = detail::open_output(path);
        emit(out);
        std::cerr << "wrote " << path << "\n";
    }
}

CutObjective parse_objective(const std::string& name) {
    if (name == "frobA") return CutObjective::frobenius_A;
    if (name == "gmax") return CutObjective::g_max;
    if (name == "gmin") return CutObjective::g_min;
    if (name == "hmax") return CutObjective::h_max;
    if (name == "trGP") return CutObjective::trace_GP;
    if (name == "trGPG") return CutObjective::trace_GPG;
    throw invariant_error("unknown search objective '" + name +
                          "' (expected frobA|gmax|gmin|hmax|trGP|trGPG)");
}

int run(int argc, char** argv) {
    CLI::App app{"Additive mixtures of a Markov kernel with a Gibbs kernel: "
                 "trace formulas, cut optimization, KL reports, Curie-Weiss experiments"};
    app.require_subcommand(1);

    // ---- validate -------------------------------------------------------
    auto* validate = app.add_subcommand("validate", "check kernel/partition invariants");
    struct {
        std::string kernel, pi, partition;
    } vfl;
    validate->add_option("--kernel", vfl.kernel, "kernel CSV")->required();
    validate->add_option("--pi", vfl.pi, "distribution CSV")->required();
    validate->add_option("--partition", vfl.partition, "partition CSV");
    validate->callback([&] {
        const Kernel k = load_kernel(vfl.kernel, vfl.pi);
        std::cout << "kernel: n=" << k.n() << " row-stochastic=ok stationary=ok reversible="
                  << (k.reversible ? "yes" : "no") << "\n";
        if (!vfl.partition.empty()) {
            const Partition part = read_partition_csv(std::filesystem::path(vfl.partition));
            if (part.n() != k.n()) {
                throw invariant_error("partition covers " + std::to_string(part.n()) +
                                      " states, kernel has " + std::to_string(k.n()));
            }
            std::cout << "partition: k=" << part.k() << " block masses=";
            const Vector masses = part.block_masses(k.pi);
            for (int b = 0; b < part.k(); ++b) std::cout << (b ? "," : "") << masses[b];
            std::cout << "\n";
        }
    });

    // ---- frobenius ------------------------------------------------------
    auto* frob = app.add_subcommand("frobenius", "trace formulas and brute-force cut search");
    struct {
        std::string kernel, pi, partition, search, out;
        std::uint64_t cut_mask = 0;
        double alpha = 0.5;
        std::vector<double> alpha_grid;
    } ffl;
    frob->add_option("--kernel", ffl.kernel, "kernel CSV")->required();
    frob->add_option("--pi", ffl.pi, "distribution CSV")->required();
    frob->add_option("--partition", ffl.partition, "partition CSV");
    frob->add_option("--cut", ffl.cut_mask, "two-block cut bitmask");
    frob->add_option("--alpha", ffl.alpha, "mixture weight");
    frob->add_option("--alpha-grid", ffl.alpha_grid, "mixture weights")->delimiter(',');
    frob->add_option("--search", ffl.search, "frobA|gmax|gmin|hmax|trGP|trGPG");
    frob->add_option("--out", ffl.out, "output CSV path (default stdout)");
    frob->callback([&] {
        const Kernel k = load_kernel(ffl.kernel, ffl.pi);
        if (!ffl.search.empty()) {
            const CutSearchResult r = brute_force_cut(k, ffl.alpha, parse_objective(ffl.search));
            with_output(ffl.out, [&](std::ostream& out) {
                write_cut_search_csv_header(out);
                write_cut_search_csv_row(out, r);
            });
            write_cheeger_csv(std::cerr, cheeger_constants(k));
            return;
        }
        const Partition part = !ffl.partition.empty()
                                   ? read_partition_csv(std::filesystem::path(ffl.partition))
                               : frob->count("--cut")
                                   ? Partition::from_cut(Cut(ffl.cut_mask, k.n()))
                                   : Partition::singletons(k.n());
        const std::vector<double> grid =
            ffl.alpha_grid.empty() ? std::vector<double>{ffl.alpha} : ffl.alpha_grid;
        with_output(ffl.out, [&](std::ostream& out) {
            write_breakdown_csv_header(out);
            for (double alpha : grid) {
                write_breakdown_csv_row(out, frobenius_mixture_formula(k, part, alpha));
            }
        });
    });

    // ---- mm ---------------------------------------------------------------
    auto* mm = app.add_subcommand("mm", "majorize-minimize cut optimization trace");
    struct {
        std::string kernel, pi, out;
        double alpha = 0.5;
        std::uint64_t start = 0;
        int max_iters = 50;
    } mfl;
    mm->add_option("--kernel", mfl.kernel, "kernel CSV")->required();
    mm->add_option("--pi", mfl.pi, "distribution CSV")->required();
    mm->add_option("--alpha", mfl.alpha, "mixture weight in (0,1)");
    mm->add_option("--start", mfl.start, "starting cut bitmask (default: h-optimal singleton)");
    mm->add_option("--max-iters", mfl.max_iters, "iteration cap");
    mm->add_option("--out", mfl.out, "output CSV path (default stdout)");
    mm->callback([&] {
        const Kernel k = load_kernel(mfl.kernel, mfl.pi);
        const Cut start = mm->count("--start") ? Cut(mfl.start, k.n()) : singleton_argmax(k);
        const MMTrace trace = mm_optimize(k, mfl.alpha, start, mfl.max_iters);
        with_output(mfl.out, [&](std::ostream& out) { write_mm_trace_csv(out, trace); });
        std::cerr << (trace.converged ? "converged" : "iteration cap reached") << " after "
                  << trace.iterates.size() << " iterates\n";
    });

    // ---- kl ----------------------------------------------------------------
    auto* kl = app.add_subcommand("kl", "KL divergence reports for additive mixtures");
    struct {
        std::string kernel, pi, partition, out;
        int optimal_k = 0;
        double alpha = 0.5;
        std::vector<double> alpha_grid;
    } kfl;
    kl->add_option("--kernel", kfl.kernel, "kernel CSV")->required();
    kl->add_option("--pi", kfl.pi, "distribution CSV")->required();
    kl->add_option("--partition", kfl.partition, "partition CSV");
    kl->add_option("--optimal-k", kfl.optimal_k, "use the entropy-optimal k-partition");
    kl->add_option("--alpha", kfl.alpha, "mixture weight");
    kl->add_option("--alpha-grid", kfl.alpha_grid, "mixture weights")->delimiter(',');
    kl->add_option("--out", kfl.out, "output CSV path (default stdout)");
    kl->callback([&] {
        const Kernel k = load_kernel(kfl.kernel, kfl.pi);
        const Partition part =
            !kfl.partition.empty() ? read_partition_csv(std::filesystem::path(kfl.partition))
            : kfl.optimal_k > 0    ? optimal_entropy_partition(k.pi, kfl.optimal_k)
                                   : Partition::singletons(k.n());
        const std::vector<double> grid =
            kfl.alpha_grid.empty() ? std::vector<double>{kfl.alpha} : kfl.alpha_grid;
        with_output(kfl.out, [&](std::ostream& out) {
            write_kl_csv_header(out);
            for (double alpha : grid) write_kl_csv_row(out, kl_report(k, part, alpha));
        });
    });

    // ---- Curie-Weiss experiments -------------------------------------------
    auto* compare = app.add_subcommand(
        "cw-compare", "P vs GP vs GPG vs A under a fixed cut (per-regime TV curves)");
    ExperimentFlags cmpf;
    cmpf.register_on(compare);
    compare->callback([&] {
        ExperimentConfig cfg = cmpf.build(compare);
        if (cfg.cut_mode == CutMode::frobenius_optimal) {
            throw invariant_error("cw-compare needs a fixed cut (mag or bitmask:<int>)");
        }
        run_fixed_cut_comparison(cfg);
        std::cerr << "fixed-cut comparison written to " << cfg.output_dir.string() << "\n";
    });

    auto* optcuts = app.add_subcommand(
        "cw-optcuts", "each sampler at its own Frobenius-optimal cut (d <= 4)");
    ExperimentFlags optf;
    optf.register_on(optcuts);
    optcuts->callback([&] {
        ExperimentConfig cfg = optf.build(optcuts);
        run_optimal_cut_comparison(cfg);
        std::cerr << "optimal-cut comparison written to " << cfg.output_dir.string() << "\n";
    });

    auto* alpha_cmd = app.add_subcommand(
        "cw-alpha", "TV curves and fixed-horizon slices across the alpha grid");
    ExperimentFlags alphaf;
    alphaf.register_on(alpha_cmd);
    alpha_cmd->callback([&] {
        ExperimentConfig cfg = alphaf.build(alpha_cmd);
        if (cfg.cut_mode == CutMode::frobenius_optimal) {
            throw invariant_error("cw-alpha needs a fixed cut (mag or bitmask:<int>)");
        }
        run_alpha_sweep(cfg);
        std::cerr << "alpha sweep written to " << cfg.output_dir.string() << "\n";
    });

    auto* profile = app.add_subcommand(
        "profile", "magnetisation histogram of a cut (mag, bitmask, or per-sampler opt)");
    ExperimentFlags proff;
    proff.register_on(profile);
    profile->callback([&] {
        ExperimentConfig cfg = proff.build(profile);
        const int n = 1 << cfg.d;
        for (double T : cfg.temperatures) {
            for (double h : cfg.fields) {
                const Distribution pi = gibbs_distribution(ModelParams{cfg.d, T, h});
                const std::string tag = detail::regime_tag(T, h);
                if (cfg.cut_mode == CutMode::frobenius_optimal) {
                    ExperimentConfig one = cfg;
                    one.temperatures = {T};
                    one.fields = {h};
                    one.horizons = {0};
                    one.output_dir.clear();
                    const OptimalCutComparison r = run_optimal_cut_comparison(one);
                    for (const OptimalCutRow& row : r.cuts) {
                        const auto rows =
                            magnetisation_profile(Cut(row.cut_bitmask, n), cfg.d, pi);
                        auto out = detail::open_output(
                            cfg.output_dir / ("profile_" + row.sampler + "_" + tag + ".csv"));
                        write_profile_csv(out, rows);
                    }
                } else {
                    const Cut cut = cfg.cut_mode == CutMode::magnetisation
                                        ? magnetisation_cut(cfg.d)
                                        : Cut(cfg.cut_bitmask, n);
                    const auto rows = magnetisation_profile(cut, cfg.d, pi);
                    auto out = detail::open_output(cfg.output_dir / ("profile_" + tag + ".csv"));
                    write_profile_csv(out, rows);
                }
            }
        }
        std::cerr << "profiles written to " << cfg.output_dir.string() << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const addmix::infeasible_error& e) {
        std::cerr << "error (infeasible size): " << e.what() << "\n";
        return 3;
    } catch (const addmix::invariant_error& e) {
        std::cerr << "error (invariant violation): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
