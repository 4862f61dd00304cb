// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// usage: acceptance [config.json] [filter]

#include "verify.hpp"

#include <cstdio>
#include <exception>

int main(int argc, char** argv)
{
    using namespace nlsdist;
    try {
        Config cfg = argc > 1 && argv[1][0] ? load_config(argv[1]) : Config{};
        std::string filter = argc > 2 ? argv[2] : "";
        VerifyReport rep = run_verification(cfg, filter, [](const CriterionResult& r) {
            std::printf("%s\n", format_result_line(r).c_str());
            std::fflush(stdout);
        });
        std::size_t failed = rep.failed_ids().size();
        std::printf("%zu/%zu criteria passed\n", rep.results.size() - failed, rep.results.size());
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
