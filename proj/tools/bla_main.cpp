#include "bla/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"bootstrap learning experiment runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand(
        "run", "train the configured optimizers over a seed grid and write CSV tables");
    std::string config_path, generator, optimizer, seeds, report_epochs, out_dir, r_policy;
    std::string epochs, step_factor, delta_start, delta_floor, timing;
    run->add_option("--config", config_path, "key=value config file, flags override it");
    auto* o_gen = run->add_option("--generator", generator,
                                  "f1|f2|f3|stochastic_net|multi_input|"
                                  "bernoulli_step|bernoulli_cosine");
    auto* o_opt = run->add_option("--optimizer", optimizer,
                                  "comma list from bla,bla2,gd,adam");
    auto* o_epochs = run->add_option("--epochs", epochs, "training epochs");
    auto* o_seeds = run->add_option("--seeds", seeds, "comma list of run seeds");
    auto* o_out = run->add_option("--out", out_dir, "output directory");
    auto* o_report = run->add_option("--report-epochs", report_epochs,
                                     "comma list of epochs for the aggregate tables");
    auto* o_rpol = run->add_option("--r-policy", r_policy,
                                   "first_batch_zero|first_epoch_zero");
    auto* o_step = run->add_option("--step-factor", step_factor, "richardson gain numerator");
    auto* o_dstart = run->add_option("--delta-start", delta_start, "initial candidate count");
    auto* o_dfloor = run->add_option("--delta-floor", delta_floor, "candidate count floor");
    auto* o_timing = run->add_option("--timing", timing,
                                     "true to record wall times (breaks rerun byte-identity)");

    auto* plot = app.add_subcommand("plot-data",
                                    "merge history CSVs into one long-format CSV");
    std::vector<std::string> history_files;
    std::string plot_out, plot_epochs;
    plot->add_option("files", history_files, "history_<optimizer>_<seed>.csv files")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "output CSV path")->required();
    auto* o_pepochs = plot->add_option("--report-epochs", plot_epochs,
                                       "comma list; keep only these epochs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            bla::ExperimentConfig cfg;
            if (!config_path.empty()) cfg = bla::parse_config_file(config_path);
            auto over = [&cfg](CLI::Option* opt, const std::string& key,
                               const std::string& value) {
                if (opt->count() > 0) {
                    bla::apply_config_kv(cfg, key, value, opt->get_name() + ":");
                }
            };
            over(o_gen, "generator", generator);
            over(o_opt, "optimizers", optimizer);
            over(o_epochs, "epochs", epochs);
            over(o_seeds, "seeds", seeds);
            over(o_out, "out", out_dir);
            over(o_report, "report_epochs", report_epochs);
            over(o_rpol, "r_policy", r_policy);
            over(o_step, "step_factor", step_factor);
            over(o_dstart, "delta_start", delta_start);
            over(o_dfloor, "delta_floor", delta_floor);
            over(o_timing, "timing", timing);
            auto outcome = bla::run_experiment(cfg);
            if (outcome.failures > 0) {
                std::cerr << outcome.failures << " run(s) failed\n";
                return 1;
            }
            return 0;
        }
        std::vector<int> keep;
        if (o_pepochs->count() > 0) {
            bla::ExperimentConfig scratch;
            bla::apply_config_kv(scratch, "report_epochs", plot_epochs, "--report-epochs:");
            keep = scratch.report_epochs;
        }
        bla::emit_plot_data(history_files, plot_out, keep);
        return 0;
    } catch (const bla::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
