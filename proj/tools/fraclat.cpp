// Copyright 2026 The fraclat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// fraclat: batch front end. Exit codes: 0 success, 1 property or tolerance
// failure, 2 usage or configuration error.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fraclat/cli.hpp"

namespace cli = fraclat::cli;

int main(int argc, char** argv) {
    CLI::App app{"fraclat: lattice fractional Laplacians, random Schroedinger operators and Lifshitz tails"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0: machine parallelism)")->check(CLI::NonNegativeNumber);

    cli::KernelOptions kopt;
    auto* kernel = app.add_subcommand("kernel", "compute a kernel table");
    kernel->add_option("--dim", kopt.dim, "lattice dimension")->required();
    kernel->add_option("--alpha", kopt.alpha, "fractional power in (0, 1]")->required();
    kernel->add_option("--radius", kopt.radius, "table radius |z|_inf")->required();
    kernel->add_option("--method", kopt.method, "fourier | subordination | dft | both")->capture_default_str();
    kernel->add_option("--tol", kopt.tol, "quadrature / grid tolerance")->capture_default_str();
    kernel->add_option("--out", kopt.out, "table file")->required();
    kernel->add_option("--compare", kopt.compare, "comparison CSV for --method both (default <out>.compare.csv)");
    kernel->add_option("--cache", kopt.cache, "cache directory (default $FRACLAT_CACHE_DIR)");

    cli::RunOptions iopt;
    auto* ids = app.add_subcommand("ids", "estimate the integrated density of states");
    ids->add_option("config", iopt.config, "JSON run configuration")->required();
    ids->add_flag("--sandwich", iopt.sandwich, "Dirichlet / free / Neumann curves with ordering check");
    ids->add_option("--out", iopt.out, "output CSV (overrides config)");
    ids->add_option("--cache", iopt.cache, "cache directory (default $FRACLAT_CACHE_DIR)");

    cli::RunOptions lopt;
    auto* lif = app.add_subcommand("lifshitz", "fit the Lifshitz tail exponent");
    lif->add_option("config", lopt.config, "JSON run configuration")->required();
    lif->add_flag("--synthetic", lopt.synthetic, "fit exp(-gamma E^-exponent) from the config's 'synthetic' block");
    lif->add_option("--out", lopt.out, "output JSON (overrides config)");
    lif->add_option("--cache", lopt.cache, "cache directory (default $FRACLAT_CACHE_DIR)");

    cli::VerifyOptions vopt;
    bool quick = false;
    auto* ver = app.add_subcommand("verify", "run the property suites");
    auto* qflag = ver->add_flag("--quick", quick, "small instance counts (default)");
    ver->add_flag("--full", vopt.full, "full instance counts")->excludes(qflag);
    ver->add_option("--seed", vopt.seed, "master seed")->capture_default_str();
    ver->add_option("--kernel", vopt.kernel_file, "also check this kernel table file");
    ver->add_option("--out", vopt.out, "write the JSON summary here as well");

    cli::ContinuumOptions copt;
    auto* cont = app.add_subcommand("continuum", "far-field ratios of the continuum fractional Laplacian");
    cont->add_option("--dim", copt.dim, "1 or 2")->capture_default_str();
    cont->add_option("--alpha", copt.alpha, "fractional power in (0, 1)")->required();
    cont->add_option("--function", copt.function, "gaussian | gaussian_narrow")->capture_default_str();
    cont->add_option("--x", copt.x, "distances |x|, ascending")->delimiter(',');
    cont->add_option("--tol", copt.tol, "absolute quadrature tolerance")->capture_default_str();
    cont->add_option("--out", copt.out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kSuccess : cli::kUsage;
    }

    try {
        if (*kernel) {
            kopt.threads = threads;
            return cli::cmd_kernel(kopt);
        }
        if (*ids) {
            iopt.threads = threads;
            return cli::cmd_ids(iopt);
        }
        if (*lif) {
            lopt.threads = threads;
            return cli::cmd_lifshitz(lopt);
        }
        if (*ver) {
            vopt.threads = threads;
            return cli::cmd_verify(vopt);
        }
        if (*cont) return cli::cmd_continuum(copt);
    } catch (const cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kUsage;
    } catch (const fraclat::PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kUsage;
    } catch (const fraclat::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kUsage;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return cli::kFailure;
    }
    return cli::kUsage;
}
