#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "homog/commands.hpp"
#include "homog/errors.hpp"

extern char** environ;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
};

nlohmann::json load_document(const Flags& flags)
{
    nlohmann::json doc = nlohmann::json::object();
    if (!flags.config.empty()) {
        std::ifstream in(flags.config);
        if (!in) throw homog::IoError("cannot read config file " + flags.config);
        doc = nlohmann::json::parse(in, nullptr, false, true);
        if (doc.is_discarded()) throw homog::ValidationError("config file is not valid JSON", "config");
    }
    std::vector<std::string> env;
    for (char** e = environ; e && *e; ++e) env.emplace_back(*e);
    doc = homog::apply_env_overrides(std::move(doc), env);
    if (flags.seed) doc["master_seed"] = *flags.seed;
    if (flags.threads) doc["threads"] = *flags.threads;
    if (flags.out) doc["output"] = *flags.out;
    return doc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Periodic-box homogenization experiments"};
    app.require_subcommand(1);

    Flags flags;
    using Command = std::vector<std::filesystem::path> (*)(const homog::RunConfig&);
    const std::pair<const char*, Command> commands[] = {
        {"sample-field", homog::cmd_sample_field},
        {"estimate", homog::cmd_estimate},
        {"rate-study", homog::cmd_rate_study},
        {"decay-study", homog::cmd_decay_study},
        {"sweep", homog::cmd_sweep},
    };
    const char* help[] = {
        "Sample one coefficient field and write it to disk",
        "Monte Carlo estimates of the effective coefficient",
        "Paired systematic error versus T and its log-log slope",
        "Ensemble decay of the parabolic solution",
        "Systematic and statistical error over box sizes and T",
    };
    Command selected = nullptr;
    std::string selected_name;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        auto* sub = app.add_subcommand(commands[i].first, help[i]);
        sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "Master seed (overrides master_seed)");
        sub->add_option("--threads", flags.threads, "Worker threads (overrides threads)")->check(CLI::PositiveNumber);
        sub->add_option("--out", flags.out, "Output directory (overrides output)");
        sub->callback([&, i] {
            selected = commands[i].second;
            selected_name = commands[i].first;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const homog::RunConfig config = homog::parse_config(load_document(flags));
        for (const auto& p : selected(config)) std::cout << p.string() << '\n';
    } catch (const homog::ValidationError& e) {
        std::cerr << "homog " << selected_name << ": invalid config: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "homog " << selected_name << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
