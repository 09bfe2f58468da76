// Acceptance-criteria runner: one PASS/FAIL line per criterion, exit code 0
// only when every row passes. See README for the suite catalogue.
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "gendiff/acceptance.hpp"
#include "gendiff/errors.hpp"

int main(int argc, char** argv) {
    std::string suite = "full";
    std::uint64_t seed = 20260810;
    int threads = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&](const char* what) -> const char* {
            if (i + 1 >= argc) {
                std::cerr << "missing value for " << what << "\n";
                std::exit(gendiff::kExitConfig);
            }
            return argv[++i];
        };
        if (arg == "--suite")
            suite = next("--suite");
        else if (arg == "--seed")
            seed = std::strtoull(next("--seed"), nullptr, 10);
        else if (arg == "--threads")
            threads = std::atoi(next("--threads"));
        else {
            std::cerr << "usage: gendiff_acceptance [--suite full|analytic|mc-small]"
                         " [--seed N] [--threads N]\n";
            return gendiff::kExitConfig;
        }
    }

    try {
        gendiff::AcceptOptions opts;
        opts.threads = threads;
        gendiff::Report rep = gendiff::run_acceptance(suite, seed, opts);
        for (const auto& r : rep.rows)
            std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id
                      << "  estimate=" << r.estimate << " target=" << r.target
                      << " gap=" << r.gap << " tol=" << r.tolerance << "  (" << r.note
                      << ")\n";
        std::cout << (rep.pass() ? "ALL PASS" : "SUITE FAILED") << " [" << rep.suite
                  << ", seed=" << rep.seed << ", " << rep.wall_seconds << " s]\n";
        return rep.pass() ? gendiff::kExitPass : gendiff::kExitFail;
    } catch (const gendiff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return gendiff::kExitConfig;
    } catch (const gendiff::NonConvergence& e) {
        std::cerr << "numerical non-convergence: " << e.what() << '\n';
        return gendiff::kExitNonConvergence;
    }
}
