// Acceptance driver: runs every verification criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion.  Exit status 0 iff
// all criteria pass.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "todatri/verify.hpp"

int main(int argc, char** argv) {
    todatri::VerifyConfig cfg;
    for (int a = 1; a + 1 < argc; a += 2) {
        if (std::strcmp(argv[a], "--seed") == 0) cfg.seed = std::strtoull(argv[a + 1], nullptr, 10);
        if (std::strcmp(argv[a], "--trials") == 0) cfg.trials = std::atoi(argv[a + 1]);
    }
    if (const char* env = std::getenv("TODA_TRI_TOL_SCALE")) {
        const double s = std::atof(env);
        if (s > 0.0) cfg.tolScale = s;
    }

    const auto [report, ok] = todatri::run_verification(cfg);
    for (const auto& c : report.at("criteria")) {
        std::printf("%s  %-28s maxDeviation=%-12.4e tolerance=%-10.3e instances=%d\n",
                    c.at("passed").get<bool>() ? "PASS" : "FAIL",
                    c.at("name").get<std::string>().c_str(),
                    c.at("maxDeviation").get<double>(), c.at("tolerance").get<double>(),
                    c.at("instances").get<int>());
    }
    std::printf("%s\n", ok ? "ALL CRITERIA PASSED" : "SUITE FAILED");
    return ok ? 0 : 1;
}
