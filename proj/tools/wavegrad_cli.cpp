// wavegrad command-line driver: run convergence presets, list them, or run
// the built-in invariant checks.
//
// Exit codes: 0 success, 1 run failure, 2 bad arguments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wavegrad/experiments.hpp"
#include "wavegrad/report_io.hpp"
#include "wavegrad/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitBadArguments = 2;

void print_summary(const wavegrad::RunReport& report) {
    std::printf("preset %s: %dD n=%zu, weights (%g, %g, %g), db%d, %d levels\n", report.preset_id.c_str(),
                report.dim, report.n, report.weights.h_minus_one, report.weights.kl, report.weights.dirichlet,
                report.wavelet_order, report.levels);
    if (report.h1_nnz + report.h2_nnz > 0) {
        std::printf("  precomputation: nnz(H1)=%zu nnz(H2)=%zu in %.3fs\n", report.h1_nnz, report.h2_nnz,
                    report.precomp_seconds);
    }
    for (const auto& run : report.runs) {
        const auto name = std::string(wavegrad::metric_name(run.metric));
        if (!run.history) {
            std::printf("  %-12s FAILED: %s\n", name.c_str(), run.error.c_str());
            continue;
        }
        const auto& h = *run.history;
        const double rel = h.initial_gap() > 0 ? h.final_gap() / h.initial_gap() : 0.0;
        std::printf("  %-12s %-9s iterations=%-5zu gap=%.3e rel_gap=%.3e time=%.2fs\n", name.c_str(),
                    std::string(wavegrad::status_name(h.status)).c_str(), h.iterations(), h.final_gap(), rel,
                    run.seconds);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet-diagonal natural gradient experiments"};
    app.require_subcommand(1);

    std::string preset_id;
    std::optional<int> wavelet_order;
    std::optional<int> levels;
    std::optional<std::size_t> max_iter;
    std::optional<double> gap_tol;
    std::optional<double> rel_gap_tol;
    std::string kl_form = "corrected";
    std::string out_dir = ".";
    std::vector<std::string> metric_names;
    bool svg = false;

    auto* run = app.add_subcommand("run", "Run one preset and write CSV histories");
    run->add_option("--preset", preset_id, "Preset id (see list-presets)")->required();
    run->add_option("--wavelet-order", wavelet_order, "Daubechies order (1-10)")->check(CLI::Range(1, 10));
    run->add_option("--levels", levels, "Decomposition levels (0 = full)")->check(CLI::NonNegativeNumber);
    run->add_option("--max-iter", max_iter, "Iteration cap per metric");
    run->add_option("--gap-tol", gap_tol, "Absolute stopping tolerance on E(p) - E(mu)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--rel-gap-tol", rel_gap_tol, "Stopping tolerance relative to the initial gap")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--kl-form", kl_form, "KL form")->check(CLI::IsMember({"plain", "corrected"}));
    run->add_option("--metrics", metric_names, "Subset of metrics to run (default: the preset's)")
        ->check(CLI::IsMember({"wasserstein", "fisher-rao", "mahalanobis", "combined"}));
    run->add_option("--out-dir", out_dir, "Output directory");
    run->add_flag("--svg", svg, "Also write <preset>.svg");

    auto* list = app.add_subcommand("list-presets", "List the available presets");
    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadArguments;
    }

    if (*list) {
        for (const auto& p : wavegrad::experiment_presets()) {
            std::printf("%-5s %dD n=%-4zu weights=(%g, %g, %g) metrics=", p.id.c_str(), p.dim, p.n,
                        p.weights.h_minus_one, p.weights.kl, p.weights.dirichlet);
            for (std::size_t i = 0; i < p.metrics.size(); ++i) {
                std::printf("%s%s", i ? "," : "", std::string(wavegrad::metric_name(p.metrics[i])).c_str());
            }
            std::printf("  # %s\n", p.description.c_str());
        }
        return kExitOk;
    }

    if (*selftest) {
        bool ok = true;
        for (const auto& c : wavegrad::run_selftest()) {
            std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
            ok = ok && c.passed;
        }
        return ok ? kExitOk : kExitRunFailure;
    }

    wavegrad::ExperimentPreset preset;
    try {
        preset = wavegrad::load_preset(preset_id);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArguments;
    }

    wavegrad::ExperimentOverrides ov;
    ov.wavelet_order = wavelet_order;
    ov.levels = levels;
    ov.max_iterations = max_iter;
    ov.gap_tolerance = gap_tol;
    ov.relative_gap_tolerance = rel_gap_tol;
    if (!metric_names.empty()) {
        std::vector<wavegrad::MetricKind> kinds;
        for (const auto& m : metric_names) kinds.push_back(wavegrad::parse_metric_kind(m));
        ov.metrics = kinds;
    }
    ov.kl_form = kl_form == "plain" ? wavegrad::KlForm::plain : wavegrad::KlForm::mass_corrected;

    try {
        const auto report = wavegrad::run_experiment(preset, ov);
        print_summary(report);
        for (const auto& path : wavegrad::write_csv(report, out_dir)) {
            std::printf("  wrote %s\n", path.string().c_str());
        }
        if (svg) {
            const auto path = std::filesystem::path(out_dir) / (report.preset_id + ".svg");
            wavegrad::write_svg(report, path);
            std::printf("  wrote %s\n", path.string().c_str());
        }
        return report.all_succeeded() ? kExitOk : kExitRunFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRunFailure;
    }
}
