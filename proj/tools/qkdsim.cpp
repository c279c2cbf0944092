#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qkd/harness.hpp"

namespace {

int run_reference_subcommand() {
    const qkd::ReferenceCheck check = qkd::run_reference_check();
    if (check.passed) {
        std::cout << "reference check: " << check.sweeps << " sweeps, PASS\n";
        return 0;
    }
    std::cout << "reference check: FAIL (" << check.diffs.size() << " diffs over " << check.sweeps
              << " sweeps)\n";
    for (const qkd::ReferenceDiff& d : check.diffs) {
        std::cout << "  row=" << d.row << " cell=" << d.cell << " expected=" << d.expected
                  << " actual=" << d.actual << "\n";
    }
    return 1;
}

int run_recovery_subcommand() {
    const qkd::RecoveryCheck check = qkd::run_recovery_check();
    if (check.passed) {
        std::cout << "recovery check: " << check.cases << " cases, PASS\n";
        return 0;
    }
    std::cout << "recovery check: FAIL (" << check.failures.size() << " failures over "
              << check.cases << " cases)\n";
    for (const std::string& f : check.failures) std::cout << "  " << f << "\n";
    return 1;
}

void write_trial_zero_transcript(const qkd::ExperimentConfig& config, const std::string& path) {
    using qkd::derive_seed;
    qkd::SessionRecord record;
    switch (config.protocol) {
        case qkd::ProtocolKind::bb84: {
            qkd::RandomSource src_a(derive_seed(config.master_seed, 0, qkd::party_tag::alice));
            qkd::RandomSource src_b(derive_seed(config.master_seed, 0, qkd::party_tag::bob));
            record = qkd::record_bb84_session(qkd::run_bb84_session(
                config.pulses, src_a, src_b, config.channel, config.adversary, config.session));
            break;
        }
        case qkd::ProtocolKind::seed: {
            qkd::RandomSource src_a(derive_seed(config.master_seed, 0, qkd::party_tag::alice));
            qkd::RandomSource src_b(derive_seed(config.master_seed, 0, qkd::party_tag::bob));
            record = qkd::record_seed_session(qkd::run_seed_protocol(
                config.pulses, src_a, src_b, config.channel, config.adversary, config.session));
            break;
        }
        case qkd::ProtocolKind::swap: {
            qkd::RandomSource src_c(derive_seed(config.master_seed, 0, qkd::party_tag::central));
            qkd::RandomSource src_a(
                derive_seed(config.master_seed, 0, qkd::party_tag::recipient_a));
            qkd::RandomSource src_b(
                derive_seed(config.master_seed, 0, qkd::party_tag::recipient_b));
            record = qkd::record_swap_session(qkd::run_swap(
                config.pulses, src_c, src_a, src_b, config.channel, config.adversary,
                config.swap));
            break;
        }
    }
    qkd::write_transcript_file(path, record);
    std::cerr << "wrote transcript of trial 0 to " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for seeded quantum key distribution protocols"};
    app.require_subcommand(1);

    std::string protocol = "seed";
    std::size_t pulses = 1024;
    std::size_t trials = 1;
    double flip = 0.0;
    double loss = 0.0;
    std::string eve = "none";
    double eve_fraction = 0.0;
    double sacrifice = 0.5;
    double threshold = 0.11;
    std::uint64_t master_seed = 1;
    bool reuse_states = false;
    std::string out_path;
    std::string transcript_path;

    CLI::App* run = app.add_subcommand("run", "Run a Monte Carlo experiment");
    run->add_option("--protocol", protocol, "Protocol: bb84, seed or swap")
        ->check(CLI::IsMember({"bb84", "seed", "swap"}));
    run->add_option("--n", pulses, "Pulses per session");
    run->add_option("--trials", trials, "Independent trials")->check(CLI::PositiveNumber);
    run->add_option("--flip", flip, "Per-pulse value flip probability")
        ->check(CLI::Range(0.0, 1.0));
    run->add_option("--loss", loss, "Per-pulse loss probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--eve", eve, "Adversary: none, ir-random, ir-fixed0 or ir-fixed1")
        ->check(CLI::IsMember({"none", "ir-random", "ir-fixed0", "ir-fixed1"}));
    run->add_option("--eve-fraction", eve_fraction,
                    "Fraction of pulses the adversary intercepts (default 1 when --eve is set)")
        ->check(CLI::Range(0.0, 1.0));
    run->add_option("--sacrifice", sacrifice,
                    "Key fraction disclosed for error estimation (0 disables)")
        ->check(CLI::Range(0.0, 1.0));
    run->add_option("--threshold", threshold, "Abort when any measured error rate exceeds this")
        ->check(CLI::Range(0.0, 1.0));
    run->add_option("--seed", master_seed, "Master seed for all randomness");
    run->add_flag("--reuse-states", reuse_states,
                  "swap only: reuse the centre's strings in both sessions");
    run->add_option("--out", out_path, "Write the full report as JSON to this file");
    run->add_option("--transcript", transcript_path,
                    "Write a session transcript of trial 0 to this file");

    CLI::App* golden =
        app.add_subcommand("golden", "Check the library against its built-in reference vector");
    CLI::App* oracle =
        app.add_subcommand("oracle", "Exhaustive single-index recovery check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (golden->parsed()) return run_reference_subcommand();
        if (oracle->parsed()) return run_recovery_subcommand();

        qkd::ExperimentConfig config;
        config.protocol = qkd::protocol_from_name(protocol);
        config.pulses = pulses;
        config.trials = trials;
        config.channel = {flip, loss};
        config.adversary.strategy =
            qkd::eve_strategy_from_name(eve, &config.adversary.fixed_basis);
        if (config.adversary.strategy != qkd::EveStrategy::none &&
            run->count("--eve-fraction") == 0) {
            eve_fraction = 1.0;
        }
        config.adversary.attack_fraction = eve_fraction;
        config.session.sacrifice_fraction = sacrifice;
        config.session.abort_threshold = threshold;
        config.swap.reuse_states = reuse_states;
        config.master_seed = master_seed;

        if (config.protocol == qkd::ProtocolKind::swap &&
            (run->count("--sacrifice") != 0 || run->count("--threshold") != 0)) {
            std::cerr << "warning: swap sessions run without sacrifice; "
                         "--sacrifice/--threshold are ignored\n";
        }
        if (config.protocol != qkd::ProtocolKind::swap && reuse_states) {
            std::cerr << "warning: --reuse-states only affects swap runs\n";
        }

        const qkd::ExperimentReport report = qkd::run_experiment(config);
        std::cout << qkd::report_text(report);
        if (!out_path.empty()) {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
            out << qkd::report_json(report);
            std::cerr << "wrote report to " << out_path << "\n";
        }
        if (!transcript_path.empty()) {
            write_trial_zero_transcript(config, transcript_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
