#pragma once
// Experiment runner for the Curie-Weiss comparisons: the four-sampler
// hierarchy under a fixed cut, Frobenius-optimal cuts per sampler, alpha
// sweeps with fixed-horizon slices, and magnetisation profiles. Everything
// is computed exactly (no sampling) and emitted as CSV.

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "addmix/csv.hpp"
#include "addmix/curie_weiss.hpp"
#include "addmix/frobenius.hpp"
#include "addmix/partition_opt.hpp"

namespace addmix {

enum class CutMode { magnetisation, frobenius_optimal, explicit_bitmask };

struct ExperimentConfig {
    int d = 4;
    std::vector<double> temperatures{2.0, 15.0};
    std::vector<double> fields{0.0, 2.0};
    std::vector<std::string> samplers{"P", "GP", "GPG", "A"};
    std::vector<double> alpha_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> alpha_slice_grid;  // defaults to 0, 0.05, ..., 1
    std::vector<int> horizons;             // defaults to 0..30
    std::vector<int> slice_horizons{3, 5, 10};
    CutMode cut_mode = CutMode::magnetisation;
    std::uint64_t cut_bitmask = 0;
    std::filesystem::path output_dir;  // empty: nothing is written
};

inline std::vector<int> default_horizons() {
    std::vector<int> t(31);
    for (int i = 0; i <= 30; ++i) t[i] = i;
    return t;
}

inline std::vector<double> default_fine_alpha_grid() {
    std::vector<double> a;
    for (int i = 0; i <= 20; ++i) a.push_back(i * 0.05);
    return a;
}

inline void validate_config(const ExperimentConfig& c) {
    if (c.d < 1) throw invariant_error("config: d must be >= 1");
    for (double T : c.temperatures) {
        if (!(T > 0.0)) throw invariant_error("config: temperatures must be positive");
    }
    if (c.temperatures.empty() || c.fields.empty()) {
        throw invariant_error("config: empty (T, h) grid");
    }
    for (double a : c.alpha_grid) {
        if (!(a >= 0.0 && a <= 1.0)) throw invariant_error("config: alpha grid outside [0,1]");
    }
    const auto& t = c.horizons;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0) throw invariant_error("config: horizons must be nonnegative");
        if (i > 0 && t[i] <= t[i - 1]) {
            throw invariant_error("config: horizons must be sorted strictly ascending");
        }
    }
    for (const auto& s : c.samplers) {
        if (s != "P" && s != "GP" && s != "GPG" && s != "A") {
            throw invariant_error("config: unknown sampler '" + s + "'");
        }
    }
}

/// Worst-case TV distance per horizon for one sampler in one regime.
struct TvCurve {
    std::string sampler;
    double T;
    double h;
    double alpha;  // NaN for samplers without a mixture weight
    std::vector<std::pair<int, double>> rows;
};

/// The multiplicative group-averaged kernels and the even mixture for a cut.
struct CompositeKernels {
    Kernel GP;
    Kernel GPG;
    Kernel A_half;
};

inline CompositeKernels composite_kernels(const Kernel& P, const Cut& S) {
    const Kernel G = gibbs_kernel(P.pi, Partition::from_cut(S));
    Kernel gp = validate_kernel(G.matrix * P.matrix, P.pi);
    Kernel gpg = validate_kernel(G.matrix * P.matrix * G.matrix, P.pi);
    Kernel a = additive_mixture(P, G, 0.5);
    return CompositeKernels{std::move(gp), std::move(gpg), std::move(a)};
}

namespace detail {

inline double worst_tv_from_point_masses(const Distribution& pi) {
    return 1.0 - pi.probs().minCoeff();
}

inline TvCurve tv_curve(const Kernel& K, const std::vector<int>& horizons,
                        std::string sampler, double T, double h, double alpha) {
    TvCurve curve{std::move(sampler), T, h, alpha, {}};
    for (int t : horizons) {
        const double tv = t == 0 ? worst_tv_from_point_masses(K.pi) : worst_case_tv(K, t);
        curve.rows.emplace_back(t, tv);
    }
    for (std::size_t i = 1; i < curve.rows.size(); ++i) {
        if (curve.rows[i].second > curve.rows[i - 1].second + 1e-12) {
            throw invariant_error("TV curve for sampler " + curve.sampler +
                                  " is not non-increasing");
        }
    }
    return curve;
}

inline std::string regime_tag(double T, double h) {
    std::ostringstream os;
    os << "T" << T << "_h" << h;
    return os.str();
}

inline bool wants(const ExperimentConfig& c, const std::string& sampler) {
    for (const auto& s : c.samplers) {
        if (s == sampler) return true;
    }
    return false;
}

inline std::vector<int> horizons_of(const ExperimentConfig& c) {
    return c.horizons.empty() ? default_horizons() : c.horizons;
}

inline Cut fixed_cut_of(const ExperimentConfig& c) {
    switch (c.cut_mode) {
        case CutMode::magnetisation: return magnetisation_cut(c.d);
        case CutMode::explicit_bitmask: return Cut(c.cut_bitmask, 1 << c.d);
        case CutMode::frobenius_optimal:
            throw invariant_error("this experiment needs a fixed cut (mag or bitmask)");
    }
    throw invariant_error("unknown cut mode");
}

}  // namespace detail

inline void write_curves_csv(std::ostream& out, const std::vector<TvCurve>& curves) {
    out << "T,h,sampler,alpha,t,tv\n" << std::setprecision(17);
    for (const TvCurve& c : curves) {
        for (const auto& [t, tv] : c.rows) {
            out << c.T << "," << c.h << "," << c.sampler << "," << c.alpha << "," << t << ","
                << tv << "\n";
        }
    }
}

inline void write_curves_csv(const std::filesystem::path& path,
                             const std::vector<TvCurve>& curves) {
    auto out = detail::open_output(path);
    write_curves_csv(out, curves);
}

/// Section-6.1-style comparison: P, GP, GPG and A(S) under one fixed cut
/// for every (T, h) regime. Emits one curves CSV per regime when an output
/// directory is configured.
inline std::vector<TvCurve> run_fixed_cut_comparison(const ExperimentConfig& config) {
    validate_config(config);
    const auto horizons = detail::horizons_of(config);
    const Cut S = detail::fixed_cut_of(config);
    std::vector<TvCurve> all;
    const double na = std::numeric_limits<double>::quiet_NaN();
    for (double T : config.temperatures) {
        for (double h : config.fields) {
            const Kernel P = glauber_kernel(ModelParams{config.d, T, h});
            const CompositeKernels comps = composite_kernels(P, S);
            std::vector<TvCurve> regime;
            if (detail::wants(config, "P")) {
                regime.push_back(detail::tv_curve(P, horizons, "P", T, h, na));
            }
            if (detail::wants(config, "GP")) {
                regime.push_back(detail::tv_curve(comps.GP, horizons, "GP", T, h, na));
            }
            if (detail::wants(config, "GPG")) {
                regime.push_back(detail::tv_curve(comps.GPG, horizons, "GPG", T, h, na));
            }
            if (detail::wants(config, "A")) {
                regime.push_back(detail::tv_curve(comps.A_half, horizons, "A", T, h, 0.5));
            }
            if (!config.output_dir.empty()) {
                write_curves_csv(config.output_dir /
                                     ("tv_fixed_" + detail::regime_tag(T, h) + ".csv"),
                                 regime);
            }
            for (auto& c : regime) all.push_back(std::move(c));
        }
    }
    return all;
}

/// One optimal-cut row of the section-6.2 comparison.
struct OptimalCutRow {
    double T;
    double h;
    std::string sampler;
    std::uint64_t cut_bitmask;
    double pi_S;
    double objective;
};

struct OptimalCutComparison {
    std::vector<TvCurve> curves;
    std::vector<OptimalCutRow> cuts;
};

inline void write_optimal_cuts_csv(std::ostream& out, const std::vector<OptimalCutRow>& rows) {
    out << "T,h,sampler,cut_bitmask,pi_S,objective\n" << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.T << "," << r.h << "," << r.sampler << "," << r.cut_bitmask << "," << r.pi_S
            << "," << r.objective << "\n";
    }
}

/// Section-6.2-style comparison: each partition-dependent sampler paired
/// with its own Frobenius-optimal cut, found by brute force over all
/// nontrivial cuts. The trace objectives are Tr(P G P), Tr(GPGPG) and
/// (1/4) Tr(P^2 + PG + GP + G), each equal to the respective squared
/// Frobenius distance plus one.
inline OptimalCutComparison run_optimal_cut_comparison(const ExperimentConfig& config) {
    validate_config(config);
    if (config.d > 4) {
        throw infeasible_error("optimal-cut brute force requires d <= 4");
    }
    const auto horizons = detail::horizons_of(config);
    const int n = 1 << config.d;
    const double na = std::numeric_limits<double>::quiet_NaN();
    OptimalCutComparison result;
    for (double T : config.temperatures) {
        for (double h : config.fields) {
            const Kernel P = glauber_kernel(ModelParams{config.d, T, h});
            const Matrix p2 = P.matrix * P.matrix;
            const double trace_p2 = trace_of_square(P.matrix);
            CutMinimizer best_gp, best_gpg, best_a;
            sweep_nontrivial_cuts(
                P.pi, {&P.matrix, &p2},
                [&](std::uint64_t mask, double mass, const std::vector<CutFlowStats>& st) {
                    best_gp.offer(mask, detail::trace_gibbs_times(st[1], mass));
                    best_gpg.offer(mask, detail::trace_pbar_sq(st[0], mass));
                    best_a.offer(mask, 0.25 * (trace_p2 +
                                               2.0 * detail::trace_gibbs_times(st[0], mass) +
                                               2.0));
                });
            const Cut cut_gp(best_gp.mask(), n);
            const Cut cut_gpg(best_gpg.mask(), n);
            const Cut cut_a(best_a.mask(), n);

            std::vector<TvCurve> regime;
            if (detail::wants(config, "P")) {
                regime.push_back(detail::tv_curve(P, horizons, "P", T, h, na));
            }
            if (detail::wants(config, "GP")) {
                regime.push_back(detail::tv_curve(composite_kernels(P, cut_gp).GP, horizons,
                                                  "GP", T, h, na));
                result.cuts.push_back(OptimalCutRow{
                    T, h, "GP", cut_gp.mask(), P.pi.mass(cut_gp.mask()),
                    evaluate_cut_objective(P, 0.5, CutObjective::trace_GP, cut_gp)});
            }
            if (detail::wants(config, "GPG")) {
                regime.push_back(detail::tv_curve(composite_kernels(P, cut_gpg).GPG, horizons,
                                                  "GPG", T, h, na));
                result.cuts.push_back(OptimalCutRow{
                    T, h, "GPG", cut_gpg.mask(), P.pi.mass(cut_gpg.mask()),
                    evaluate_cut_objective(P, 0.5, CutObjective::trace_GPG, cut_gpg)});
            }
            if (detail::wants(config, "A")) {
                regime.push_back(detail::tv_curve(composite_kernels(P, cut_a).A_half, horizons,
                                                  "A", T, h, 0.5));
                const double tr_gp =
                    detail::trace_gibbs_times(compute_cut_stats(P.pi, P.matrix, cut_a.mask()),
                                              P.pi.mass(cut_a.mask()));
                result.cuts.push_back(OptimalCutRow{T, h, "A", cut_a.mask(),
                                                    P.pi.mass(cut_a.mask()),
                                                    0.25 * (trace_p2 + 2.0 * tr_gp + 2.0)});
            }
            if (!config.output_dir.empty()) {
                write_curves_csv(config.output_dir /
                                     ("tv_optcut_" + detail::regime_tag(T, h) + ".csv"),
                                 regime);
            }
            for (auto& c : regime) result.curves.push_back(std::move(c));
        }
    }
    if (!config.output_dir.empty()) {
        auto out = detail::open_output(config.output_dir / "optimal_cuts.csv");
        write_optimal_cuts_csv(out, result.cuts);
    }
    return result;
}

/// TV against alpha at one fixed horizon; rows are (alpha, tv).
struct AlphaSlice {
    double T;
    double h;
    int t;
    std::vector<std::pair<double, double>> rows;
};

struct AlphaSweepResult {
    std::vector<TvCurve> curves;  // TV against t, one curve per alpha
    std::vector<AlphaSlice> slices;
};

inline void write_alpha_slices_csv(std::ostream& out, const std::vector<AlphaSlice>& slices) {
    out << "T,h,sampler,alpha,t,tv\n" << std::setprecision(17);
    for (const AlphaSlice& s : slices) {
        for (const auto& [alpha, tv] : s.rows) {
            out << s.T << "," << s.h << ",A," << alpha << "," << s.t << "," << tv << "\n";
        }
    }
}

/// Section-6.3-style sweep: TV-vs-t curves of A_alpha(S) over the alpha
/// grid, plus TV-vs-alpha slices at the fixed slice horizons on a finer
/// grid (0, 0.05, ..., 1 by default).
inline AlphaSweepResult run_alpha_sweep(const ExperimentConfig& config) {
    validate_config(config);
    const auto horizons = detail::horizons_of(config);
    const auto fine =
        config.alpha_slice_grid.empty() ? default_fine_alpha_grid() : config.alpha_slice_grid;
    const Cut S = detail::fixed_cut_of(config);
    AlphaSweepResult result;
    for (double T : config.temperatures) {
        for (double h : config.fields) {
            const Kernel P = glauber_kernel(ModelParams{config.d, T, h});
            const Kernel G = gibbs_kernel(P.pi, Partition::from_cut(S));
            std::vector<TvCurve> regime;
            for (double alpha : config.alpha_grid) {
                const Kernel A = additive_mixture(P, G, alpha);
                regime.push_back(detail::tv_curve(A, horizons, "A", T, h, alpha));
            }
            std::vector<AlphaSlice> slices;
            for (int t : config.slice_horizons) {
                AlphaSlice slice{T, h, t, {}};
                slice.rows.reserve(fine.size());
                for (double alpha : fine) {
                    const Kernel A = additive_mixture(P, G, alpha);
                    const double tv = t == 0 ? detail::worst_tv_from_point_masses(P.pi)
                                             : worst_case_tv(A, t);
                    slice.rows.emplace_back(alpha, tv);
                }
                slices.push_back(std::move(slice));
            }
            if (!config.output_dir.empty()) {
                write_curves_csv(config.output_dir /
                                     ("tv_alpha_" + detail::regime_tag(T, h) + ".csv"),
                                 regime);
                auto out = detail::open_output(
                    config.output_dir / ("tv_alpha_slices_" + detail::regime_tag(T, h) + ".csv"));
                write_alpha_slices_csv(out, slices);
            }
            for (auto& c : regime) result.curves.push_back(std::move(c));
            for (auto& s : slices) result.slices.push_back(std::move(s));
        }
    }
    return result;
}

/// Per-magnetisation-level membership counts and stationary mass of a cut.
struct ProfileBin {
    int m;
    int count_in;
    int count_out;
    double mass_in;
    double mass_out;
};

inline std::vector<ProfileBin> magnetisation_profile(const Cut& cut, int d,
                                                     const Distribution& pi) {
    const int n = 1 << d;
    if (cut.n() != n || pi.size() != n) {
        throw invariant_error("profile: cut/distribution size does not match 2^d");
    }
    std::map<int, ProfileBin> bins;
    for (int m = -d; m <= d; m += 2) bins[m] = ProfileBin{m, 0, 0, 0.0, 0.0};
    for (int idx = 0; idx < n; ++idx) {
        const int m = magnetisation(SpinConfig{static_cast<std::uint32_t>(idx), d});
        ProfileBin& bin = bins.at(m);
        if (cut.contains(idx)) {
            bin.count_in += 1;
            bin.mass_in += pi(idx);
        } else {
            bin.count_out += 1;
            bin.mass_out += pi(idx);
        }
    }
    std::vector<ProfileBin> rows;
    rows.reserve(bins.size());
    for (const auto& [m, bin] : bins) rows.push_back(bin);
    return rows;
}

inline void write_profile_csv(std::ostream& out, const std::vector<ProfileBin>& rows) {
    out << "m,count_in,count_out,pi_in,pi_out\n" << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.m << "," << r.count_in << "," << r.count_out << "," << r.mass_in << ","
            << r.mass_out << "\n";
    }
}

/// Flat key = value configuration file: '#' starts a comment, blank lines
/// are skipped. Keys: d, T, h, samplers, alphas, horizons, cut, out.
inline std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw invariant_error("cannot open config file " + path.string());
    std::map<std::string, std::string> entries;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw invariant_error("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        }
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
    return out;
}

inline std::vector<std::string> parse_string_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace detail

/// Parses "mag", "opt" or "bitmask:<int>" into a cut mode.
inline std::pair<CutMode, std::uint64_t> parse_cut_spec(const std::string& spec) {
    if (spec == "mag") return {CutMode::magnetisation, 0};
    if (spec == "opt") return {CutMode::frobenius_optimal, 0};
    if (spec.rfind("bitmask:", 0) == 0) {
        try {
            return {CutMode::explicit_bitmask, std::stoull(spec.substr(8))};
        } catch (const std::exception&) {
            throw invariant_error("bad bitmask in cut spec '" + spec + "'");
        }
    }
    throw invariant_error("cut spec must be mag, opt or bitmask:<int>, got '" + spec + "'");
}

inline void apply_config_entries(const std::map<std::string, std::string>& entries,
                                 ExperimentConfig& config) {
    for (const auto& [key, value] : entries) {
        try {
            if (key == "d") config.d = std::stoi(value);
            else if (key == "T") config.temperatures = detail::parse_double_list(value);
            else if (key == "h") config.fields = detail::parse_double_list(value);
            else if (key == "samplers") config.samplers = detail::parse_string_list(value);
            else if (key == "alphas") config.alpha_grid = detail::parse_double_list(value);
            else if (key == "horizons") config.horizons = detail::parse_int_list(value);
            else if (key == "cut") {
                const auto [mode, mask] = parse_cut_spec(value);
                config.cut_mode = mode;
                config.cut_bitmask = mask;
            } else if (key == "out") {
                config.output_dir = value;
            } else {
                throw invariant_error("unknown config key '" + key + "'");
            }
        } catch (const invariant_error&) {
            throw;
        } catch (const std::exception&) {
            throw invariant_error("cannot parse config value for '" + key + "'");
        }
    }
}

}  // namespace addmix
