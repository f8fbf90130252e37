// Acceptance driver: runs every verification criterion and prints one
// PASS/FAIL line each; exits nonzero when any fails.
#include "fiocalc/verify.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
    fiocalc::VerifyOptions opts;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            opts.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            opts.only.push_back(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--seed N] [--only A1 ...]\n";
            return 1;
        }
    }
    const auto results = fiocalc::verify_suite(opts, std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return fiocalc::all_passed(results) ? 0 : 2;
}
