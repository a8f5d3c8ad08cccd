#include <CLI11.hpp>

#include <iostream>

#include "fairpost/errors.hpp"
#include "fairpost/synthdata.hpp"

// Generates the benchmark-shaped synthetic datasets plus their schema files.
int main(int argc, char** argv) {
    CLI::App app{"datagen: write synthetic benchmark-shaped datasets"};
    std::string dataset;
    std::size_t rows = 0;
    std::uint64_t seed = 2024;
    std::string csv_out;
    std::string schema_out;
    app.add_option("--dataset", dataset, "adult, communities, or lawschool")->required();
    app.add_option("--rows", rows, "row count (default: size of the imitated dataset)");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--csv-out", csv_out, "dataset CSV path")->required();
    app.add_option("--schema-out", schema_out, "schema config path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto kind = fairpost::parse_synth_kind(dataset);
        if (rows == 0) rows = fairpost::synth_default_rows(kind);
        fairpost::write_synth_files(csv_out, schema_out, kind, rows, seed);
        std::cout << "wrote " << rows << " rows to " << csv_out << '\n';
    } catch (const fairpost::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
