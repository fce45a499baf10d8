// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
//   acceptance [ids...]    e.g. "acceptance 3 5" runs criteria 3 and 5 only
#include <cstdio>
#include <cstdlib>
#include <string>

#include "perieig/verify.hpp"

int main(int argc, char** argv) {
    perieig::VerifyOptions opt;
    opt.fixture_dir = PERIEIG_FIXTURE_DIR;
    for (int k = 1; k < argc; ++k) opt.only.insert(std::atoi(argv[k]));
    opt.on_result = [](const perieig::CriterionReport& r) {
        std::printf("%s\n", perieig::format_report(r).c_str());
        std::fflush(stdout);
    };
    int failed = 0;
    for (const auto& r : perieig::run_verify(opt)) failed += r.pass() ? 0 : 1;
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
