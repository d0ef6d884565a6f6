#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstring>
#include <string>

#include "testutil.hpp"

std::string lorgeo_test::cli_path;

int main(int argc, char** argv) {
    // Extract --cli=<path> (used by the CLI suite) before doctest parses.
    std::vector<char*> args;
    for (int i = 0; i < argc; ++i) {
        if (std::strncmp(argv[i], "--cli=", 6) == 0) {
            lorgeo_test::cli_path = argv[i] + 6;
        } else {
            args.push_back(argv[i]);
        }
    }
    doctest::Context ctx(static_cast<int>(args.size()), args.data());
    return ctx.run();
}
